#pragma once

#include <span>
#include <vector>

#include "acp/allocator.hpp"
#include "acp/channel.hpp"
#include "acp/perception.hpp"
#include "acp/scenario.hpp"

namespace acp {

struct AgentObservation {
  double bandwidth_hz = 0;  // B(n), shared across agents
  double shared_w = 0;      // this pair's workload
  double distance_m = 0;    // this pair's tx-rx distance
  double prev_mode = 0;     // x_{k}(n-1)
  double avg_w = 0;         // cluster mean workload (augmentation)
  double avg_distance_m = 0;
};

struct EnvParams {
  double omega_tilde = 0.4;
  double penalty = -10.0;
  bool refinement_enabled = true;
};

struct StepOutcome {
  double reward_train = 0;  // with penalty on infeasible joint actions
  double reward_exec = 0;   // after refinement; never the penalty value
  bool feasible = true;
  double gain_total = 0;    // realized gain of the applied action (J)
  int switch_count = 0;     // realized switching cost of the applied action
  std::vector<int> x_applied;
  std::vector<AgentObservation> next_obs;  // empty on the final slot
  bool done = false;
  int alloc_iterations = 0;  // solver diagnostics (0 when no solve ran)
};

// Sum of |x_k - x_prev_k|. Throws DomainError on length mismatch.
int switching_cost(std::span<const int> x_prev, std::span<const int> x);

// Episodic environment over one trace: agents pick cooperation bits, the
// allocator prices the cooperative set, reward is gain minus weighted
// switching cost (or the penalty when infeasible, in which case execution
// falls back to all stand-alone when refinement is enabled).
class Env {
 public:
  Env(EpisodeTrace trace, EnvParams env_params, DerivedCosts costs,
      PerceptionParams perception, RadioParams radio);

  std::vector<AgentObservation> reset();
  StepOutcome step(std::span<const int> x);

  int num_agents() const { return static_cast<int>(trace_.slots.empty() ? 0 : trace_.slots[0].pairs.size()); }
  int slot() const { return slot_; }
  int num_slots() const { return static_cast<int>(trace_.slots.size()); }
  bool done() const { return slot_ >= num_slots(); }
  const EpisodeTrace& trace() const { return trace_; }
  const EnvParams& params() const { return env_params_; }

 private:
  std::vector<AgentObservation> observations_at(int slot) const;

  EpisodeTrace trace_;
  EnvParams env_params_;
  DerivedCosts costs_;
  PerceptionParams perception_;
  RadioParams radio_;
  std::vector<int> x_prev_;
  int slot_ = 0;
  bool started_ = false;
};

}  // namespace acp
