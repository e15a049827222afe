#include <cmath>
#include <vector>

#include "doctest.h"

#include "acp/env.hpp"
#include "acp/errors.hpp"
#include "acp/rng.hpp"
#include "support/frozen.hpp"

using namespace acp;
namespace ft = acp::testing;

namespace {

struct Fixture {
  DerivedCosts costs = derive_costs(DnnProfile{});
  PerceptionParams params = make_perception_params(0.1, 8e9, 1e-28, costs);
  RadioParams radio;

  EpisodeTrace trace(int slots, std::vector<std::pair<int, double>> pairs,
                     double bandwidth_hz) const {
    EpisodeTrace t;
    for (int n = 0; n < slots; ++n) {
      SlotRecord slot;
      for (const auto& [w, d] : pairs) {
        PairSlotState p;
        p.shared_w = w;
        p.tx_w = 1;
        p.rx_w = 2;
        p.distance_m = d;
        slot.pairs.push_back(p);
      }
      slot.bandwidth_hz = bandwidth_hz;
      t.slots.push_back(slot);
    }
    return t;
  }

  Env env(EpisodeTrace t, double omega = 0.4, bool refine = true) const {
    EnvParams ep;
    ep.omega_tilde = omega;
    ep.refinement_enabled = refine;
    return Env(std::move(t), ep, costs, params, radio);
  }
};

}  // namespace

TEST_SUITE("env") {

TEST_CASE("reset starts everyone stand-alone with slot-0 observations") {
  const Fixture fx;
  Env env = fx.env(fx.trace(3, {{6, 20.0}, {8, 40.0}}, 10.5e6));
  const auto obs = env.reset();
  REQUIRE(obs.size() == 2);
  for (const auto& o : obs) {
    CHECK(o.bandwidth_hz == doctest::Approx(10.5e6).epsilon(1e-12));
    CHECK(o.prev_mode == 0.0);
    CHECK(o.avg_w == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(o.avg_distance_m == doctest::Approx(30.0).epsilon(1e-12));
  }
  CHECK(obs[0].shared_w == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(obs[1].distance_m == doctest::Approx(40.0).epsilon(1e-15));
}

TEST_CASE("all stand-alone is a zero-reward fixed point") {
  const Fixture fx;
  Env env = fx.env(fx.trace(2, {{6, 20.0}}, 10.5e6));
  env.reset();
  const auto out = env.step(std::vector<int>{0});
  CHECK(out.reward_train == 0.0);
  CHECK(out.reward_exec == 0.0);
  CHECK(out.feasible);
  CHECK(out.gain_total == 0.0);
  CHECK(out.switch_count == 0);
  CHECK(out.alloc_iterations == 0);  // nothing to price
}

TEST_CASE("cooperation pays the gain minus the switching charge") {
  const Fixture fx;
  Env env = fx.env(fx.trace(3, {{6, 20.0}}, 10.5e6));
  env.reset();
  auto out = env.step(std::vector<int>{1});
  CHECK(out.feasible);
  CHECK(out.switch_count == 1);
  CHECK(out.gain_total == doctest::Approx(ft::kSinglePairGain).epsilon(1e-9));
  CHECK(out.reward_train == doctest::Approx(ft::kSinglePairGain - 0.4).epsilon(1e-8));
  CHECK(out.reward_exec == out.reward_train);
  REQUIRE(out.next_obs.size() == 1);
  CHECK(out.next_obs[0].prev_mode == 1.0);

  // staying cooperative costs nothing extra
  out = env.step(std::vector<int>{1});
  CHECK(out.switch_count == 0);
  CHECK(out.reward_train == doctest::Approx(ft::kSinglePairGain).epsilon(1e-8));
}

TEST_CASE("infeasible joint actions are penalized and refined to stand-alone") {
  const Fixture fx;
  Env env = fx.env(fx.trace(2, {{6, 20.0}}, 1.0e6));  // pair needs ~1.52 MHz
  env.reset();
  const auto out = env.step(std::vector<int>{1});
  CHECK_FALSE(out.feasible);
  CHECK(out.reward_train == doctest::Approx(-10.0).epsilon(1e-12));
  REQUIRE(out.x_applied.size() == 1);
  CHECK(out.x_applied[0] == 0);
  // refined action: no gain, and no switch relative to the all-SP start
  CHECK(out.reward_exec == 0.0);
  CHECK(out.next_obs[0].prev_mode == 0.0);
}

TEST_CASE("refinement charges the switch away from a cooperative previous mode") {
  const Fixture fx;
  // slot 0 at a generous budget, slot 1 starved
  EpisodeTrace t = fx.trace(3, {{6, 20.0}}, 10.5e6);
  t.slots[1].bandwidth_hz = 1.0e6;
  Env env = fx.env(std::move(t));
  env.reset();
  env.step(std::vector<int>{1});  // now x_prev = [1]
  const auto out = env.step(std::vector<int>{1});
  CHECK_FALSE(out.feasible);
  CHECK(out.reward_train == doctest::Approx(-10.0).epsilon(1e-12));
  CHECK(out.x_applied[0] == 0);
  CHECK(out.switch_count == 1);  // realized switch 1 -> 0
  CHECK(out.reward_exec == doctest::Approx(-0.4).epsilon(1e-12));
}

TEST_CASE("without refinement the infeasible action stands") {
  const Fixture fx;
  Env env = fx.env(fx.trace(2, {{6, 20.0}}, 1.0e6), 0.4, /*refine=*/false);
  env.reset();
  const auto out = env.step(std::vector<int>{1});
  CHECK_FALSE(out.feasible);
  CHECK(out.x_applied[0] == 1);
  CHECK(out.reward_exec == doctest::Approx(-10.0).epsilon(1e-12));
  CHECK(out.next_obs[0].prev_mode == 1.0);
}

TEST_CASE("episode reward decomposes into gains, switches and penalties") {
  const Fixture fx;
  const ScenarioConfig cfg = [] {
    ScenarioConfig c;
    c.num_pairs = 3;
    return c;
  }();
  Env env = fx.env(generate_episode(cfg, 21), 0.4);
  Rng rng(3);
  auto obs = env.reset();
  double total_train = 0, gains = 0;
  int switches = 0, penalties = 0;
  while (!env.done()) {
    std::vector<int> x(3);
    for (int& b : x) b = rng.bernoulli(0.5) ? 1 : 0;
    const auto out = env.step(x);
    total_train += out.reward_train;
    if (out.feasible) {
      gains += out.gain_total;
      switches += out.switch_count;
    } else {
      penalties += 1;
    }
  }
  CHECK(total_train ==
        doctest::Approx(gains - 0.4 * switches - 10.0 * penalties).epsilon(1e-9));
}

TEST_CASE("guard rails") {
  const Fixture fx;
  Env env = fx.env(fx.trace(1, {{6, 20.0}}, 10.5e6));
  env.reset();
  CHECK_THROWS_AS(env.step(std::vector<int>{0, 1}), DomainError);  // wrong arity
  const auto out = env.step(std::vector<int>{0});
  CHECK(out.done);
  CHECK(out.next_obs.empty());
  CHECK_THROWS_AS(env.step(std::vector<int>{0}), DomainError);  // episode exhausted

  EpisodeTrace empty;
  CHECK_THROWS_AS(fx.env(std::move(empty)), DomainError);

  CHECK(switching_cost(std::vector<int>{0, 1}, std::vector<int>{1, 1}) == 1);
  CHECK(switching_cost(std::vector<int>{1, 1}, std::vector<int>{0, 0}) == 2);
  CHECK_THROWS_AS(switching_cost(std::vector<int>{0}, std::vector<int>{0, 1}), DomainError);
}

}  // TEST_SUITE
