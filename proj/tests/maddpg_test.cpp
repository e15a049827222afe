#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"

#include "acp/config.hpp"
#include "acp/env.hpp"
#include "acp/errors.hpp"
#include "acp/maddpg.hpp"
#include "acp/scenario.hpp"

using namespace acp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / "acp_maddpg_test";
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

AgentObservation sample_obs(Rng& rng) {
  AgentObservation o;
  o.bandwidth_hz = rng.uniform(8e6, 10.5e6);
  o.shared_w = static_cast<double>(rng.uniform_int(0, 8));
  o.distance_m = rng.uniform(5.0, 60.0);
  o.prev_mode = rng.bernoulli(0.5) ? 1.0 : 0.0;
  o.avg_w = rng.uniform(0.0, 8.0);
  o.avg_distance_m = rng.uniform(5.0, 60.0);
  return o;
}

MaddpgConfig tiny_config(std::uint64_t seed) {
  MaddpgConfig cfg;
  cfg.hidden = {16, 16};
  cfg.batch = 16;
  cfg.buffer_capacity = 512;
  cfg.episodes = 2;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("maddpg") {

TEST_CASE("actions live on the 2-simplex in both modes") {
  Maddpg net(2, tiny_config(5), ObsScale{});
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const AgentObservation obs = sample_obs(rng);
    for (int agent = 0; agent < 2; ++agent) {
      for (bool explore : {false, true}) {
        const Eigen::Vector2d a = net.act(agent, obs, explore, rng);
        CHECK(a(0) > 0);
        CHECK(a(1) > 0);
        CHECK(a.sum() == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }

  // deterministic mode ignores the rng stream; explore mode does not
  const AgentObservation obs = sample_obs(rng);
  Rng r1(3), r2(4);
  const Eigen::Vector2d d1 = net.act(0, obs, false, r1);
  const Eigen::Vector2d d2 = net.act(0, obs, false, r2);
  CHECK((d1 - d2).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::Vector2d e1 = net.act(0, obs, true, r1);
  const Eigen::Vector2d e2 = net.act(0, obs, true, r2);
  CHECK((e1 - e2).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("discretize picks the dominant component") {
  CHECK(Maddpg::discretize({0.8, 0.2}) == 0);
  CHECK(Maddpg::discretize({0.2, 0.8}) == 1);
  CHECK(Maddpg::discretize({0.499, 0.501}) == 1);
}

TEST_CASE("checkpoints reproduce the policy exactly") {
  TempDir tmp;
  Maddpg net(2, tiny_config(17), ObsScale{});
  const fs::path ckpt = tmp.path / "policy.ckpt";
  net.save(ckpt);
  const Maddpg loaded = Maddpg::load(ckpt, ObsScale{});

  CHECK(loaded.num_agents() == 2);
  CHECK(loaded.config().hidden == net.config().hidden);
  CHECK(loaded.config().seed == net.config().seed);

  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const AgentObservation obs = sample_obs(rng);
    for (int agent = 0; agent < 2; ++agent) {
      const Eigen::Vector2d a = net.act(agent, obs, false, rng);
      const Eigen::Vector2d b = loaded.act(agent, obs, false, rng);
      CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  Eigen::VectorXd gs(2 * Maddpg::kObsDim);
  Eigen::VectorXd ja(2 * Maddpg::kActionDim);
  gs.setLinSpaced(gs.size(), 0.0, 1.0);
  ja << 0.7, 0.3, 0.1, 0.9;
  for (int agent = 0; agent < 2; ++agent) {
    CHECK(net.critic_value(agent, gs, ja) == loaded.critic_value(agent, gs, ja));
  }
}

TEST_CASE("corrupt checkpoints are rejected") {
  TempDir tmp;
  Maddpg net(1, tiny_config(2), ObsScale{});
  const fs::path good = tmp.path / "good.ckpt";
  net.save(good);

  const fs::path bad_magic = tmp.path / "bad_magic.ckpt";
  {
    std::ifstream in(good, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    bytes[0] = 'X';
    std::ofstream out(bad_magic, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_AS(Maddpg::load(bad_magic, ObsScale{}), ParseError);

  const fs::path truncated = tmp.path / "truncated.ckpt";
  {
    std::ifstream in(good, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    bytes.resize(bytes.size() / 2);
    std::ofstream out(truncated, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  CHECK_THROWS_AS(Maddpg::load(truncated, ObsScale{}), ParseError);

  CHECK_THROWS_AS(Maddpg::load(tmp.path / "missing.ckpt", ObsScale{}), IoError);
}

TEST_CASE("critic regresses a constant reward when gamma is zero") {
  MaddpgConfig cfg = tiny_config(12);
  cfg.gamma = 0.0;
  cfg.batch = 32;
  Maddpg net(1, cfg, ObsScale{});

  ReplayBuffer buffer(64, Maddpg::kObsDim, Maddpg::kActionDim);
  Rng rng(77);
  Eigen::VectorXd s(Maddpg::kObsDim), ns(Maddpg::kObsDim);
  s << 0.9, 0.5, 0.2, 0.0, 0.4, 0.3;
  ns << 0.8, 0.4, 0.25, 1.0, 0.5, 0.35;
  Eigen::VectorXd a(2);
  a << 0.7, 0.3;
  for (int i = 0; i < 64; ++i) buffer.add(s, a, 1.0, ns);

  double loss = 0;
  for (int step = 0; step < 300; ++step) loss = net.train_agent(0, buffer, rng).critic_loss;
  CHECK(loss < 0.05);
  CHECK(net.critic_value(0, s, a) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("training is deterministic and logs every episode") {
  ExperimentConfig cfg = default_config();
  cfg.scenario.num_pairs = 1;
  cfg.scenario.travel_dist_m = 50.0;  // 4 slots per episode
  cfg.scenario.num_hdvs = 2;

  MaddpgConfig lc = tiny_config(99);
  auto run = [&](std::uint64_t seed) {
    MaddpgConfig c = lc;
    c.seed = seed;
    Maddpg net(1, c, ObsScale{});
    return net.train(cfg.scenario, cfg.env, cfg.model.costs, cfg.model.perception,
                     cfg.model.radio);
  };

  const auto log1 = run(99);
  const auto log2 = run(99);
  const auto log3 = run(100);
  REQUIRE(log1.size() == 2);
  CHECK(log1[0].episode == 0);
  CHECK(log1[1].episode == 1);
  for (std::size_t i = 0; i < log1.size(); ++i) {
    CHECK(log1[i].reward_train_mean == log2[i].reward_train_mean);
    CHECK(log1[i].reward_exec_mean == log2[i].reward_exec_mean);
    CHECK(log1[i].critic_loss_mean == log2[i].critic_loss_mean);
    CHECK(std::isfinite(log1[i].reward_train_mean));
    CHECK(log1[i].penalty_rate >= 0.0);
    CHECK(log1[i].penalty_rate <= 1.0);
  }
  CHECK(log1[0].reward_train_mean != log3[0].reward_train_mean);
}

TEST_CASE("executing an untrained policy still yields finite slot metrics") {
  ExperimentConfig cfg = default_config();
  cfg.scenario.num_pairs = 2;
  cfg.scenario.travel_dist_m = 100.0;

  const std::uint64_t stream = substream_seed(4, "scenario");
  const EpisodeTrace trace = generate_episode(cfg.scenario, episode_seed(stream, 0));
  Env env(trace, cfg.env, cfg.model.costs, cfg.model.perception, cfg.model.radio);

  Maddpg net(2, tiny_config(1), ObsScale{});
  const auto ep = net.execute(env);
  CHECK(std::isfinite(ep.reward_exec_mean));
  CHECK(std::isfinite(ep.gain_mean));
  CHECK(ep.cost_mean >= 0.0);
  CHECK(ep.penalty_rate >= 0.0);
  CHECK(ep.penalty_rate <= 1.0);
  CHECK(ep.alloc_iters_mean >= 0.0);
}

TEST_CASE("agent count mismatches are rejected") {
  CHECK_THROWS_AS(Maddpg(0, tiny_config(1), ObsScale{}), ConfigError);
  ExperimentConfig cfg = default_config();
  cfg.scenario.num_pairs = 3;
  Maddpg net(2, tiny_config(1), ObsScale{});
  CHECK_THROWS_AS(net.train(cfg.scenario, cfg.env, cfg.model.costs, cfg.model.perception,
                            cfg.model.radio),
                  ConfigError);
}

}  // TEST_SUITE
