#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "acp/env.hpp"
#include "acp/nn.hpp"
#include "acp/replay.hpp"
#include "acp/rng.hpp"

namespace acp {

struct MaddpgConfig {
  double gamma = 0.95;
  double xi = 0.01;          // soft-update rate
  double lr_critic = 1e-2;
  double lr_actor = 1e-3;
  int batch = 1024;
  std::size_t buffer_capacity = 100000;
  double gumbel_temperature = 1.0;
  int episodes = 3000;
  std::vector<int> hidden = {64, 64};
  std::uint64_t seed = 1;
};

// Fixed observation scaling applied at the learner boundary (the env reports
// physical units): bandwidth by the total, workloads by the top state,
// distances by 100 m, previous mode raw.
struct ObsScale {
  double bandwidth_hz = 10.5e6;
  double workload = 8.0;
  double distance_m = 100.0;

  Eigen::VectorXd normalize(const AgentObservation& o) const;
};

// Multi-agent actor-critic with per-agent actors (local augmented
// observations, two-way softmax head) and per-agent centralized critics
// (global state + joint relaxed action), trained off a shared replay buffer
// with soft target updates.
class Maddpg {
 public:
  Maddpg(int num_agents, const MaddpgConfig& cfg, const ObsScale& scale);

  int num_agents() const { return num_agents_; }
  int obs_dim() const { return kObsDim; }
  int action_dim() const { return kActionDim; }
  const MaddpgConfig& config() const { return cfg_; }
  const ObsScale& obs_scale() const { return scale_; }

  // Relaxed two-component action for one agent. Explore mode perturbs the
  // logits with Gumbel noise at the configured temperature; deterministic
  // mode is the plain softmax. Components are positive and sum to one.
  Eigen::Vector2d act(int agent, const AgentObservation& obs, bool explore, Rng& rng) const;

  // Cooperation bit: index of the largest action component.
  static int discretize(const Eigen::Vector2d& action);

  double critic_value(int agent, const Eigen::VectorXd& global_state,
                      const Eigen::VectorXd& joint_action) const;

  struct TrainDiag {
    double critic_loss = 0;
    double actor_objective = 0;
  };
  // One critic descent step and one actor ascent step for the agent from a
  // fresh uniform batch. Throws DomainError if the buffer holds fewer than
  // batch transitions.
  TrainDiag train_agent(int agent, const ReplayBuffer& buffer, Rng& rng);

  void soft_update_targets();

  struct EpisodeLog {
    int episode = 0;
    double reward_train_mean = 0;
    double reward_exec_mean = 0;
    double critic_loss_mean = 0;
    double actor_objective_mean = 0;
    double penalty_rate = 0;  // fraction of slots whose joint action was infeasible
  };

  // Centralized training over seeded synthetic episodes. Deterministic in
  // (cfg.seed, scenario config). progress, if given, receives one line per
  // 50 episodes.
  std::vector<EpisodeLog> train(const ScenarioConfig& scenario, const EnvParams& env_params,
                                const DerivedCosts& costs, const PerceptionParams& perception,
                                const RadioParams& radio, std::ostream* progress = nullptr);

  struct EvalEpisode {
    double gain_mean = 0;        // slot-average realized gain (J)
    double cost_mean = 0;        // slot-average switching cost
    double reward_exec_mean = 0;
    double reward_train_mean = 0;
    double penalty_rate = 0;
    double alloc_iters_mean = 0;
  };
  // Deterministic execution of the trained actors on one environment.
  EvalEpisode execute(Env& env) const;

  // Checkpoint: header (magic, version, agent count, dims, hidden sizes,
  // seed) then per agent actor / critic / target-actor / target-critic
  // parameter blocks as little-endian f64. See docs/checkpoint-format in
  // README.
  void save(const std::filesystem::path& path) const;
  static Maddpg load(const std::filesystem::path& path, const ObsScale& scale);

  const Mlp& actor(int agent) const { return agents_[agent].actor; }
  Mlp& mutable_actor(int agent) { return agents_[agent].actor; }
  const Mlp& critic(int agent) const { return agents_[agent].critic; }

  static constexpr int kObsDim = 6;
  static constexpr int kActionDim = 2;

 private:
  struct AgentNets {
    Mlp actor, critic, target_actor, target_critic;
    Adam actor_opt, critic_opt;
  };

  Eigen::MatrixXd actor_logits(const Mlp& net, const Eigen::MatrixXd& obs) const;

  int num_agents_;
  MaddpgConfig cfg_;
  ObsScale scale_;
  std::vector<AgentNets> agents_;
};

}  // namespace acp
