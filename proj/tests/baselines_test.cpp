#include <cmath>
#include <vector>

#include "doctest.h"

#include "acp/allocator.hpp"
#include "acp/baselines.hpp"
#include "acp/config.hpp"
#include "acp/env.hpp"
#include "acp/errors.hpp"

using namespace acp;

namespace {

PolicyContext make_ctx(double omega_tilde = 0.4) {
  const ModelParams m = default_config().model;
  return PolicyContext{m.costs, m.perception, m.radio, omega_tilde};
}

std::vector<AgentObservation> make_obs(double bandwidth_hz, const std::vector<double>& w,
                                       const std::vector<double>& d,
                                       const std::vector<double>& prev) {
  std::vector<AgentObservation> obs(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) {
    obs[k].bandwidth_hz = bandwidth_hz;
    obs[k].shared_w = w[k];
    obs[k].distance_m = d[k];
    obs[k].prev_mode = prev[k];
  }
  return obs;
}

// Independent enumeration with the documented tie order, for cross-checking.
std::vector<int> enumerate_best(const std::vector<AgentObservation>& obs,
                                const PolicyContext& ctx) {
  const int n = static_cast<int>(obs.size());
  std::vector<int> x_prev(n);
  for (int k = 0; k < n; ++k) x_prev[k] = obs[k].prev_mode > 0.5 ? 1 : 0;

  std::vector<int> best;
  double best_value = 0;
  int best_coop = -1;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> x(n);
    std::vector<PairSlotState> coop;
    for (int k = 0; k < n; ++k) {
      x[k] = (mask >> k) & 1u;
      if (x[k]) {
        PairSlotState p;
        p.shared_w = static_cast<int>(std::llround(obs[k].shared_w));
        p.distance_m = obs[k].distance_m;
        coop.push_back(p);
      }
    }
    double gain = 0;
    if (!coop.empty()) {
      const AllocationResult r =
          solve(coop, obs[0].bandwidth_hz, ctx.costs, ctx.perception, ctx.radio);
      if (r.verdict == AllocVerdict::Infeasible) continue;
      gain = r.gain_total;
    }
    const double value = gain - ctx.omega_tilde * switching_cost(x_prev, x);
    const int coop_count = static_cast<int>(coop.size());
    bool better = false;
    if (best_coop < 0 || value > best_value + 1e-12) {
      better = true;
    } else if (value >= best_value - 1e-12) {
      if (coop_count < best_coop) better = true;
      else if (coop_count == best_coop && x < best) better = true;
    }
    if (better) {
      best = x;
      best_value = value;
      best_coop = coop_count;
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("random policy is a fair seeded coin per agent") {
  Rng rng(42);
  int ones = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const auto x = random_action(3, rng);
    REQUIRE(x.size() == 3);
    for (int b : x) {
      REQUIRE((b == 0 || b == 1));
      ones += b;
    }
  }
  // 6000 draws at p=1/2: mean 3000, sigma ~38.7; allow 5 sigma
  CHECK(std::abs(ones - 3000) < 194);

  Rng r1(7), r2(7);
  for (int trial = 0; trial < 20; ++trial) CHECK(random_action(4, r1) == random_action(4, r2));
}

TEST_CASE("always-cooperate fills the vector with ones") {
  CHECK(always_cooperate_action(1) == std::vector<int>{1});
  CHECK(always_cooperate_action(4) == std::vector<int>{1, 1, 1, 1});
}

TEST_CASE("single pair: cooperate iff the gain clears the switching charge") {
  const auto obs_stay = make_obs(10.5e6, {6}, {20.0}, {0.0});

  // default weight: gain ~0.73 J beats 0.4, so switch into cooperation
  CHECK(brute_force_action(obs_stay, make_ctx(0.4)) == std::vector<int>{1});

  // prohibitive weight: staying out wins when currently out...
  CHECK(brute_force_action(obs_stay, make_ctx(100.0)) == std::vector<int>{0});

  // ...and staying in wins when currently in (no switch either way)
  const auto obs_in = make_obs(10.5e6, {6}, {20.0}, {1.0});
  CHECK(brute_force_action(obs_in, make_ctx(100.0)) == std::vector<int>{1});
}

TEST_CASE("matches an independent enumeration on random three-pair slots") {
  Rng rng(17);
  const PolicyContext ctx = make_ctx(0.4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> w(3), d(3), prev(3);
    for (int k = 0; k < 3; ++k) {
      w[k] = static_cast<double>(rng.uniform_int(4, 8));
      d[k] = rng.uniform(5.0, 60.0);
      prev[k] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    const double bw = rng.uniform(6e6, 10.5e6);
    const auto obs = make_obs(bw, w, d, prev);
    CHECK(brute_force_action(obs, ctx) == enumerate_best(obs, ctx));
  }
}

TEST_CASE("starved bandwidth rules out multi-pair subsets") {
  // 1.6 MHz supports any single pair here but no two together
  const auto obs = make_obs(1.6e6, {6, 6, 6}, {20.0, 20.0, 20.0}, {1.0, 1.0, 1.0});
  const auto x = brute_force_action(obs, make_ctx(0.0));
  int coop = 0;
  for (int b : x) coop += b;
  CHECK(coop <= 1);
  CHECK(x == enumerate_best(obs, make_ctx(0.0)));
}

TEST_CASE("exact ties resolve to the lexicographically smaller vector") {
  // identical pairs, budget fits exactly one, zero switching weight:
  // {pair 0} and {pair 1} tie, so the smaller vector [0,1] wins
  const auto obs = make_obs(1.6e6, {6, 6}, {20.0, 20.0}, {0.0, 0.0});
  CHECK(brute_force_action(obs, make_ctx(0.0)) == std::vector<int>{0, 1});
}

TEST_CASE("guards against empty and oversized clusters") {
  const PolicyContext ctx = make_ctx();
  CHECK_THROWS_AS(brute_force_action(std::vector<AgentObservation>{}, ctx), DomainError);
  CHECK_THROWS_AS(brute_force_action(std::vector<AgentObservation>(21), ctx), DomainError);
}

}  // TEST_SUITE
