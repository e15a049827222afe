#include "acp/baselines.hpp"

#include <cmath>
#include <cstdint>

#include "acp/allocator.hpp"
#include "acp/errors.hpp"

namespace acp {

std::vector<int> random_action(int num_agents, Rng& rng) {
  std::vector<int> x(num_agents);
  for (int& xi : x) xi = rng.bernoulli(0.5) ? 1 : 0;
  return x;
}

std::vector<int> always_cooperate_action(int num_agents) {
  return std::vector<int>(num_agents, 1);
}

std::vector<int> brute_force_action(std::span<const AgentObservation> obs,
                                    const PolicyContext& ctx) {
  const int n = static_cast<int>(obs.size());
  if (n < 1) throw DomainError("brute force needs at least one pair");
  if (n > 20) {
    throw DomainError("brute force enumerates 2^K vectors; refusing K=" + std::to_string(n));
  }
  const double bandwidth = obs[0].bandwidth_hz;

  std::vector<int> x_prev(n);
  for (int k = 0; k < n; ++k) x_prev[k] = obs[k].prev_mode > 0.5 ? 1 : 0;

  constexpr double kTieEps = 1e-12;
  bool have_best = false;
  double best_value = 0;
  int best_coop = 0;
  std::vector<int> best_x;

  std::vector<int> x(n);
  std::vector<PairSlotState> coop;
  coop.reserve(n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    coop.clear();
    int coop_count = 0, switches = 0;
    for (int k = 0; k < n; ++k) {
      x[k] = (mask >> k) & 1u;
      switches += std::abs(x[k] - x_prev[k]);
      if (x[k]) {
        coop_count += 1;
        PairSlotState p;
        p.shared_w = static_cast<int>(std::llround(obs[k].shared_w));
        p.distance_m = obs[k].distance_m;
        coop.push_back(p);
      }
    }

    double gain = 0;
    if (coop_count > 0) {
      const AllocationResult r = solve(coop, bandwidth, ctx.costs, ctx.perception, ctx.radio);
      if (r.verdict == AllocVerdict::Infeasible) continue;
      gain = r.gain_total;
    }
    const double value = gain - ctx.omega_tilde * switches;

    const bool better =
        !have_best || value > best_value + kTieEps ||
        (value >= best_value - kTieEps &&
         (coop_count < best_coop || (coop_count == best_coop && x < best_x)));
    if (better) {
      have_best = true;
      best_value = value;
      best_coop = coop_count;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace acp
