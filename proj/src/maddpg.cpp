#include "acp/maddpg.hpp"

#include <cstring>
#include <fstream>
#include <ostream>
#include <utility>

#include "acp/errors.hpp"

namespace acp {
namespace {

Eigen::VectorXd flatten_obs(const std::vector<AgentObservation>& obs, const ObsScale& scale) {
  Eigen::VectorXd s(static_cast<int>(obs.size()) * Maddpg::kObsDim);
  for (std::size_t k = 0; k < obs.size(); ++k) {
    s.segment(static_cast<int>(k) * Maddpg::kObsDim, Maddpg::kObsDim) = scale.normalize(obs[k]);
  }
  return s;
}

Eigen::MatrixXd hcat(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

constexpr char kMagic[8] = {'A', 'C', 'P', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

Eigen::VectorXd ObsScale::normalize(const AgentObservation& o) const {
  Eigen::VectorXd v(Maddpg::kObsDim);
  v << o.bandwidth_hz / bandwidth_hz, o.shared_w / workload, o.distance_m / distance_m,
      o.prev_mode, o.avg_w / workload, o.avg_distance_m / distance_m;
  return v;
}

Maddpg::Maddpg(int num_agents, const MaddpgConfig& cfg, const ObsScale& scale)
    : num_agents_(num_agents), cfg_(cfg), scale_(scale) {
  if (num_agents < 1) throw ConfigError("learner needs at least one agent");
  if (cfg.batch < 1) throw ConfigError("batch size must be positive");
  if (cfg.gumbel_temperature <= 0) throw ConfigError("gumbel temperature must be positive");

  std::vector<int> actor_sizes{kObsDim};
  std::vector<int> critic_sizes{num_agents * (kObsDim + kActionDim)};
  for (int h : cfg.hidden) {
    actor_sizes.push_back(h);
    critic_sizes.push_back(h);
  }
  actor_sizes.push_back(kActionDim);
  critic_sizes.push_back(1);

  Rng init_rng(substream_seed(cfg.seed, "init"));
  agents_.reserve(num_agents);
  for (int i = 0; i < num_agents; ++i) {
    AgentNets a;
    a.actor = Mlp(actor_sizes);
    a.critic = Mlp(critic_sizes);
    a.actor.init_uniform_fanin(init_rng);
    a.critic.init_uniform_fanin(init_rng);
    a.target_actor = a.actor;
    a.target_critic = a.critic;
    a.actor_opt = Adam(a.actor, cfg.lr_actor);
    a.critic_opt = Adam(a.critic, cfg.lr_critic);
    agents_.push_back(std::move(a));
  }
}

Eigen::MatrixXd Maddpg::actor_logits(const Mlp& net, const Eigen::MatrixXd& obs) const {
  return net.forward(obs);
}

Eigen::Vector2d Maddpg::act(int agent, const AgentObservation& obs, bool explore, Rng& rng) const {
  Eigen::MatrixXd z = actor_logits(agents_[agent].actor, scale_.normalize(obs).transpose());
  if (explore) {
    for (int j = 0; j < z.cols(); ++j) z(0, j) = (z(0, j) + rng.gumbel()) / cfg_.gumbel_temperature;
  }
  const Eigen::MatrixXd y = softmax_rows(z);
  return Eigen::Vector2d(y(0, 0), y(0, 1));
}

int Maddpg::discretize(const Eigen::Vector2d& action) {
  return action(1) > action(0) ? 1 : 0;
}

double Maddpg::critic_value(int agent, const Eigen::VectorXd& global_state,
                            const Eigen::VectorXd& joint_action) const {
  Eigen::MatrixXd in(1, global_state.size() + joint_action.size());
  in << global_state.transpose(), joint_action.transpose();
  return agents_[agent].critic.forward(in)(0, 0);
}

Maddpg::TrainDiag Maddpg::train_agent(int agent, const ReplayBuffer& buffer, Rng& rng) {
  const auto batch = buffer.sample(static_cast<std::size_t>(cfg_.batch), rng);
  const int I = static_cast<int>(batch.states.rows());
  const int state_dim = num_agents_ * kObsDim;
  AgentNets& nets = agents_[agent];

  // Bootstrapped targets: every agent's target actor acts (deterministically)
  // on its slice of the next state, then the target critic scores the result.
  Eigen::MatrixXd next_joint(I, num_agents_ * kActionDim);
  for (int j = 0; j < num_agents_; ++j) {
    const Eigen::MatrixXd z = agents_[j].target_actor.forward(batch.next_states.middleCols(j * kObsDim, kObsDim));
    next_joint.middleCols(j * kActionDim, kActionDim) = softmax_rows(z);
  }
  const Eigen::VectorXd q_next =
      nets.target_critic.forward(hcat(batch.next_states, next_joint)).col(0);
  const Eigen::VectorXd y = batch.rewards + cfg_.gamma * q_next;

  // Critic regression on the stored joint actions.
  Mlp::Tape critic_tape;
  const Eigen::MatrixXd critic_in = hcat(batch.states, batch.actions);
  const Eigen::VectorXd q = nets.critic.forward(critic_in, critic_tape).col(0);
  const Eigen::VectorXd diff = q - y;
  const double critic_loss = diff.squaredNorm() / I;
  MlpGrads critic_grads = nets.critic.make_grads();
  nets.critic.backward(critic_tape, (2.0 / I) * diff, critic_grads);
  nets.critic_opt.step(nets.critic, critic_grads);

  // Actor ascent on the critic: replace this agent's stored action with a
  // fresh relaxed sample so the pathwise gradient reaches the logits.
  Mlp::Tape actor_tape;
  Eigen::MatrixXd z = nets.actor.forward(batch.states.middleCols(agent * kObsDim, kObsDim), actor_tape);
  Eigen::MatrixXd z_noisy = z;
  for (int r = 0; r < I; ++r) {
    for (int c = 0; c < kActionDim; ++c) {
      z_noisy(r, c) = (z_noisy(r, c) + rng.gumbel()) / cfg_.gumbel_temperature;
    }
  }
  const Eigen::MatrixXd relaxed = softmax_rows(z_noisy);
  Eigen::MatrixXd joint = batch.actions;
  joint.middleCols(agent * kActionDim, kActionDim) = relaxed;

  Mlp::Tape q_tape;
  const Eigen::VectorXd q_pi = nets.critic.forward(hcat(batch.states, joint), q_tape).col(0);
  const double actor_objective = q_pi.mean();
  MlpGrads scratch = nets.critic.make_grads();
  const Eigen::MatrixXd dq_din = nets.critic.backward(
      q_tape, Eigen::MatrixXd::Constant(I, 1, 1.0 / I), scratch);
  const Eigen::MatrixXd dj_da = dq_din.middleCols(state_dim + agent * kActionDim, kActionDim);
  const Eigen::MatrixXd dj_dz = softmax_backward_rows(relaxed, dj_da) / cfg_.gumbel_temperature;

  MlpGrads actor_grads = nets.actor.make_grads();
  nets.actor.backward(actor_tape, -dj_dz, actor_grads);  // negate: optimizer minimizes
  nets.actor_opt.step(nets.actor, actor_grads);

  return TrainDiag{critic_loss, actor_objective};
}

void Maddpg::soft_update_targets() {
  for (auto& a : agents_) {
    a.target_actor.soft_update_from(a.actor, cfg_.xi);
    a.target_critic.soft_update_from(a.critic, cfg_.xi);
  }
}

std::vector<Maddpg::EpisodeLog> Maddpg::train(const ScenarioConfig& scenario,
                                              const EnvParams& env_params,
                                              const DerivedCosts& costs,
                                              const PerceptionParams& perception,
                                              const RadioParams& radio, std::ostream* progress) {
  if (scenario.num_pairs != num_agents_) {
    throw ConfigError("scenario has " + std::to_string(scenario.num_pairs) +
                      " pairs but the learner was built for " + std::to_string(num_agents_));
  }
  const std::uint64_t scenario_stream = substream_seed(cfg_.seed, "scenario");
  Rng explore_rng(substream_seed(cfg_.seed, "explore"));
  Rng train_rng(substream_seed(cfg_.seed, "train"));

  ReplayBuffer buffer(cfg_.buffer_capacity, num_agents_ * kObsDim, num_agents_ * kActionDim);
  std::vector<EpisodeLog> logs;
  logs.reserve(cfg_.episodes);

  for (int e = 0; e < cfg_.episodes; ++e) {
    Env env(generate_episode(scenario, episode_seed(scenario_stream, e)), env_params, costs,
            perception, radio);
    std::vector<AgentObservation> obs = env.reset();

    EpisodeLog log;
    log.episode = e;
    int slots = 0, penalties = 0, updates = 0;
    double sum_train = 0, sum_exec = 0, sum_closs = 0, sum_aobj = 0;

    while (!env.done()) {
      Eigen::VectorXd joint(num_agents_ * kActionDim);
      std::vector<int> x(num_agents_);
      for (int k = 0; k < num_agents_; ++k) {
        const Eigen::Vector2d a = act(k, obs[k], /*explore=*/true, explore_rng);
        joint.segment(k * kActionDim, kActionDim) = a;
        x[k] = discretize(a);
      }
      const Eigen::VectorXd state = flatten_obs(obs, scale_);
      StepOutcome out = env.step(x);

      slots += 1;
      sum_train += out.reward_train;
      sum_exec += out.reward_exec;
      if (!out.feasible) penalties += 1;

      if (!out.next_obs.empty()) {
        buffer.add(state, joint, out.reward_train, flatten_obs(out.next_obs, scale_));
        obs = std::move(out.next_obs);
      }

      if (buffer.size() >= static_cast<std::size_t>(cfg_.batch)) {
        for (int k = 0; k < num_agents_; ++k) {
          const TrainDiag d = train_agent(k, buffer, train_rng);
          sum_closs += d.critic_loss;
          sum_aobj += d.actor_objective;
          updates += 1;
        }
        soft_update_targets();
      }
    }

    log.reward_train_mean = sum_train / slots;
    log.reward_exec_mean = sum_exec / slots;
    log.penalty_rate = static_cast<double>(penalties) / slots;
    if (updates > 0) {
      log.critic_loss_mean = sum_closs / updates;
      log.actor_objective_mean = sum_aobj / updates;
    }
    logs.push_back(log);

    if (progress && (e + 1) % 50 == 0) {
      double recent = 0;
      const int lookback = std::min<int>(50, static_cast<int>(logs.size()));
      for (int i = 0; i < lookback; ++i) recent += logs[logs.size() - 1 - i].reward_train_mean;
      (*progress) << "episode " << (e + 1) << "/" << cfg_.episodes
                  << "  reward_train(last50) " << recent / lookback << "  penalty_rate "
                  << log.penalty_rate << "  critic_loss " << log.critic_loss_mean << "\n";
      progress->flush();
    }
  }
  return logs;
}

Maddpg::EvalEpisode Maddpg::execute(Env& env) const {
  Rng unused(0);  // deterministic actions draw no randomness
  std::vector<AgentObservation> obs = env.reset();
  EvalEpisode ep;
  int slots = 0, penalties = 0;
  while (!env.done()) {
    std::vector<int> x(num_agents_);
    for (int k = 0; k < num_agents_; ++k) {
      x[k] = discretize(act(k, obs[k], /*explore=*/false, unused));
    }
    StepOutcome out = env.step(x);
    slots += 1;
    ep.gain_mean += out.gain_total;
    ep.cost_mean += out.switch_count;
    ep.reward_exec_mean += out.reward_exec;
    ep.reward_train_mean += out.reward_train;
    ep.alloc_iters_mean += out.alloc_iterations;
    if (!out.feasible) penalties += 1;
    if (!out.next_obs.empty()) obs = std::move(out.next_obs);
  }
  ep.gain_mean /= slots;
  ep.cost_mean /= slots;
  ep.reward_exec_mean /= slots;
  ep.reward_train_mean /= slots;
  ep.alloc_iters_mean /= slots;
  ep.penalty_rate = static_cast<double>(penalties) / slots;
  return ep;
}

void Maddpg::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(num_agents_));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(kObsDim));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(kActionDim));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(cfg_.hidden.size()));
  for (int h : cfg_.hidden) write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(h));
  write_pod<std::uint64_t>(out, cfg_.seed);
  for (const auto& a : agents_) {
    a.actor.write_params(out);
    a.critic.write_params(out);
    a.target_actor.write_params(out);
    a.target_critic.write_params(out);
  }
  if (!out) throw IoError("short write while saving checkpoint: " + path.string());
}

Maddpg Maddpg::load(const std::filesystem::path& path, const ObsScale& scale) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("not a policy checkpoint: " + path.string());
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto num_agents = read_pod<std::uint32_t>(in);
  const auto obs_dim = read_pod<std::uint32_t>(in);
  const auto action_dim = read_pod<std::uint32_t>(in);
  if (obs_dim != kObsDim || action_dim != kActionDim) {
    throw ParseError("checkpoint dimensions do not match this build");
  }
  const auto n_hidden = read_pod<std::uint32_t>(in);
  if (n_hidden > 16) throw ParseError("implausible hidden layer count in checkpoint");
  MaddpgConfig cfg;
  cfg.hidden.clear();
  for (std::uint32_t i = 0; i < n_hidden; ++i) {
    cfg.hidden.push_back(static_cast<int>(read_pod<std::uint32_t>(in)));
  }
  cfg.seed = read_pod<std::uint64_t>(in);
  if (!in) throw ParseError("truncated checkpoint header: " + path.string());

  Maddpg m(static_cast<int>(num_agents), cfg, scale);
  for (auto& a : m.agents_) {
    a.actor.read_params(in);
    a.critic.read_params(in);
    a.target_actor.read_params(in);
    a.target_critic.read_params(in);
  }
  if (!in) throw ParseError("truncated checkpoint payload: " + path.string());
  return m;
}

}  // namespace acp
