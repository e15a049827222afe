#pragma once

#include <span>
#include <vector>

#include "acp/env.hpp"
#include "acp/rng.hpp"

namespace acp {

struct PolicyContext {
  DerivedCosts costs;
  PerceptionParams perception;
  RadioParams radio;
  double omega_tilde = 0.4;
};

// Each pair cooperates with probability one half, independently per slot.
std::vector<int> random_action(int num_agents, Rng& rng);

std::vector<int> always_cooperate_action(int num_agents);

// Exhaustive slot-optimal mode selection: maximizes realized gain minus the
// weighted switching cost over all 2^K cooperation vectors, skipping
// infeasible ones (the all stand-alone vector is always feasible). Ties
// prefer fewer cooperating pairs, then the lexicographically smaller vector.
// Observations carry everything needed: bandwidth, workload, distance and
// the previous mode. Throws DomainError above 20 pairs.
std::vector<int> brute_force_action(std::span<const AgentObservation> obs,
                                    const PolicyContext& ctx);

}  // namespace acp
