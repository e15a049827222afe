#include "acp/env.hpp"

#include <cmath>
#include <string>

#include "acp/errors.hpp"

namespace acp {

int switching_cost(std::span<const int> x_prev, std::span<const int> x) {
  if (x_prev.size() != x.size()) {
    throw DomainError("switching_cost: action length mismatch");
  }
  int c = 0;
  for (std::size_t k = 0; k < x.size(); ++k) c += std::abs(x[k] - x_prev[k]);
  return c;
}

Env::Env(EpisodeTrace trace, EnvParams env_params, DerivedCosts costs,
         PerceptionParams perception, RadioParams radio)
    : trace_(std::move(trace)),
      env_params_(std::move(env_params)),
      costs_(costs),
      perception_(perception),
      radio_(radio) {
  if (trace_.slots.empty()) throw DomainError("env: empty trace");
  if (env_params_.omega_tilde < 0) throw DomainError("env: omega_tilde must be >= 0");
  x_prev_.assign(trace_.slots[0].pairs.size(), 0);
}

std::vector<AgentObservation> Env::observations_at(int slot) const {
  const auto& rec = trace_.slots[slot];
  const std::size_t k_pairs = rec.pairs.size();
  double avg_w = 0, avg_d = 0;
  for (const auto& p : rec.pairs) {
    avg_w += p.shared_w;
    avg_d += p.distance_m;
  }
  if (k_pairs > 0) {
    avg_w /= static_cast<double>(k_pairs);
    avg_d /= static_cast<double>(k_pairs);
  }
  std::vector<AgentObservation> obs(k_pairs);
  for (std::size_t k = 0; k < k_pairs; ++k) {
    obs[k] = {rec.bandwidth_hz, static_cast<double>(rec.pairs[k].shared_w),
              rec.pairs[k].distance_m, static_cast<double>(x_prev_[k]), avg_w, avg_d};
  }
  return obs;
}

std::vector<AgentObservation> Env::reset() {
  slot_ = 0;
  started_ = true;
  x_prev_.assign(trace_.slots[0].pairs.size(), 0);
  return observations_at(0);
}

StepOutcome Env::step(std::span<const int> x) {
  if (!started_) reset();
  if (done()) throw DomainError("env: step after the episode is done");
  if (x.size() != x_prev_.size()) {
    throw DomainError("env: action length " + std::to_string(x.size()) + " != " +
                      std::to_string(x_prev_.size()) + " agents");
  }

  const auto& rec = trace_.slots[slot_];
  std::vector<PairSlotState> coop;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] != 0) coop.push_back(rec.pairs[k]);
  }

  StepOutcome out;
  out.x_applied.assign(x.begin(), x.end());

  double gain = 0;
  bool feasible = true;
  if (!coop.empty()) {
    const auto alloc = solve(std::span<const PairSlotState>(coop), rec.bandwidth_hz,
                             costs_, perception_, radio_);
    out.alloc_iterations = alloc.iterations;
    if (alloc.verdict == AllocVerdict::Infeasible) {
      feasible = false;
    } else {
      gain = alloc.gain_total;
    }
  }

  out.feasible = feasible;
  if (feasible) {
    const int c = switching_cost(x_prev_, x);
    out.switch_count = c;
    out.gain_total = gain;
    out.reward_train = gain - env_params_.omega_tilde * c;
    out.reward_exec = out.reward_train;
  } else {
    out.reward_train = env_params_.penalty;
    if (env_params_.refinement_enabled) {
      std::fill(out.x_applied.begin(), out.x_applied.end(), 0);
      const int c = switching_cost(x_prev_, out.x_applied);
      out.switch_count = c;
      out.gain_total = 0;
      out.reward_exec = -env_params_.omega_tilde * c;
    } else {
      out.switch_count = switching_cost(x_prev_, x);
      out.gain_total = 0;
      out.reward_exec = out.reward_train;
    }
  }

  x_prev_ = out.x_applied;
  ++slot_;
  out.done = done();
  if (!out.done) out.next_obs = observations_at(slot_);
  return out;
}

}  // namespace acp
