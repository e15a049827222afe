#include "acp/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "acp/baselines.hpp"
#include "acp/errors.hpp"

namespace acp {
namespace {

std::string bits_to_string(std::span<const int> x) {
  std::string s;
  s.reserve(x.size());
  for (int b : x) s.push_back(b ? '1' : '0');
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const std::filesystem::path& path, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::filesystem::path& path, int line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(path.string() + ":" + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

constexpr const char* kSlotHeader =
    "slot,B_MHz,action_bits,feasible,G_star_J,C,reward_train,reward_exec";

struct EpisodeAccumulator {
  double gain = 0, cost = 0, exec = 0, train = 0, iters = 0;
  int slots = 0, penalties = 0;

  void add(const SlotResult& r) {
    gain += r.gain;
    cost += r.switch_count;
    exec += r.reward_exec;
    train += r.reward_train;
    iters += r.alloc_iterations;
    slots += 1;
    if (!r.feasible) penalties += 1;
  }

  EpisodeMetrics finish() const {
    EpisodeMetrics m;
    m.gain = gain / slots;
    m.switch_cost = cost / slots;
    m.reward_exec = exec / slots;
    m.reward_train = train / slots;
    m.penalty_rate = static_cast<double>(penalties) / slots;
    m.alloc_iterations = iters / slots;
    return m;
  }
};

}  // namespace

ObsScale make_obs_scale(const ExperimentConfig& cfg) {
  ObsScale s;
  s.bandwidth_hz = cfg.scenario.total_bandwidth_hz;
  s.workload = static_cast<double>(
      *std::max_element(cfg.scenario.workload_states.begin(), cfg.scenario.workload_states.end()));
  s.distance_m = 100.0;
  return s;
}

PolicyFn make_policy(const std::string& name, const ExperimentConfig& cfg) {
  if (name == "random") {
    return [](const std::vector<AgentObservation>& obs, Rng& rng) {
      return random_action(static_cast<int>(obs.size()), rng);
    };
  }
  if (name == "allcp") {
    return [](const std::vector<AgentObservation>& obs, Rng&) {
      return always_cooperate_action(static_cast<int>(obs.size()));
    };
  }
  if (name == "brute") {
    PolicyContext ctx{cfg.model.costs, cfg.model.perception, cfg.model.radio,
                      cfg.env.omega_tilde};
    return [ctx](const std::vector<AgentObservation>& obs, Rng&) {
      return brute_force_action(obs, ctx);
    };
  }
  if (name.rfind("learned:", 0) == 0) {
    const std::filesystem::path ckpt = name.substr(8);
    auto policy = std::make_shared<Maddpg>(Maddpg::load(ckpt, make_obs_scale(cfg)));
    return [policy](const std::vector<AgentObservation>& obs, Rng& rng) {
      if (static_cast<int>(obs.size()) != policy->num_agents()) {
        throw ConfigError("checkpoint was trained for " + std::to_string(policy->num_agents()) +
                          " pairs but the scenario has " + std::to_string(obs.size()));
      }
      std::vector<int> x(obs.size());
      for (std::size_t k = 0; k < obs.size(); ++k) {
        x[k] = Maddpg::discretize(
            policy->act(static_cast<int>(k), obs[k], /*explore=*/false, rng));
      }
      return x;
    };
  }
  throw ConfigError("unknown policy '" + name + "' (expected random|allcp|brute|learned:<path>)");
}

RunResult run_experiment(const ExperimentConfig& cfg, std::ostream* progress) {
  const PolicyFn policy = make_policy(cfg.policy, cfg);
  const std::uint64_t scenario_stream = substream_seed(cfg.seed, "scenario");
  const std::uint64_t policy_stream = substream_seed(cfg.seed, "policy");

  RunResult result;
  for (int e = 0; e < cfg.episodes; ++e) {
    Env env(generate_episode(cfg.scenario, episode_seed(scenario_stream, e)), cfg.env,
            cfg.model.costs, cfg.model.perception, cfg.model.radio);
    Rng policy_rng(episode_seed(policy_stream, e));

    std::vector<AgentObservation> obs = env.reset();
    EpisodeAccumulator acc;
    int n = 0;
    while (!env.done()) {
      const std::vector<int> x = policy(obs, policy_rng);
      StepOutcome out = env.step(x);
      SlotResult row;
      row.slot = n++;
      row.bandwidth_mhz = obs[0].bandwidth_hz / 1e6;
      row.action_bits = bits_to_string(out.x_applied);
      row.feasible = out.feasible;
      row.gain = out.gain_total;
      row.switch_count = out.switch_count;
      row.reward_train = out.reward_train;
      row.reward_exec = out.reward_exec;
      row.alloc_iterations = out.alloc_iterations;
      acc.add(row);
      result.slots.push_back(std::move(row));
      if (!out.next_obs.empty()) obs = std::move(out.next_obs);
    }
    result.episodes.push_back(acc.finish());
    if (progress && (e + 1) % 20 == 0) {
      (*progress) << "episode " << (e + 1) << "/" << cfg.episodes << "\n";
      progress->flush();
    }
  }
  result.summary = summarize(result.episodes);

  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    write_slot_csv(result.slots, cfg.output_dir / "slots.csv");
    std::ofstream summary(cfg.output_dir / "summary.json");
    summary << summary_to_json(result.summary);
    std::ofstream config(cfg.output_dir / "config.json");
    config << config_to_json(cfg);
  }
  return result;
}

void write_slot_csv(std::span<const SlotResult> slots, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << kSlotHeader << "\n";
  out << std::setprecision(17);
  for (const SlotResult& r : slots) {
    out << r.slot << ',' << r.bandwidth_mhz << ',' << r.action_bits << ',' << (r.feasible ? 1 : 0)
        << ',' << r.gain << ',' << r.switch_count << ',' << r.reward_train << ','
        << r.reward_exec << "\n";
  }
  if (!out) throw IoError("short write: " + path.string());
}

std::vector<SlotResult> read_slot_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file (missing header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kSlotHeader) {
    throw ParseError(path.string() + ": unexpected header '" + line + "'");
  }
  std::vector<SlotResult> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    lineno += 1;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected 8 fields, got " +
                       std::to_string(f.size()));
    }
    SlotResult r;
    r.slot = parse_int(f[0], path, lineno);
    r.bandwidth_mhz = parse_double(f[1], path, lineno);
    r.action_bits = f[2];
    for (char c : r.action_bits) {
      if (c != '0' && c != '1') {
        throw ParseError(path.string() + ":" + std::to_string(lineno) + ": bad action bits '" +
                         f[2] + "'");
      }
    }
    r.feasible = parse_int(f[3], path, lineno) != 0;
    r.gain = parse_double(f[4], path, lineno);
    r.switch_count = parse_int(f[5], path, lineno);
    r.reward_train = parse_double(f[6], path, lineno);
    r.reward_exec = parse_double(f[7], path, lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<EpisodeMetrics> episodes_from_slots(std::span<const SlotResult> slots) {
  std::vector<EpisodeMetrics> episodes;
  EpisodeAccumulator acc;
  bool open = false;
  for (const SlotResult& r : slots) {
    if (r.slot == 0 && open) {
      episodes.push_back(acc.finish());
      acc = EpisodeAccumulator{};
    }
    acc.add(r);
    open = true;
  }
  if (open) episodes.push_back(acc.finish());
  return episodes;
}

MetricsSummary aggregate_slots(std::span<const SlotResult> slots) {
  return summarize(episodes_from_slots(slots));
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const std::string& param,
                                std::span<const double> values, std::ostream* progress) {
  std::vector<SweepRow> rows;
  for (const double v : values) {
    ExperimentConfig cfg = base;
    cfg.output_dir.clear();  // sub-runs stay in memory; only sweep.csv lands on disk
    if (param == "omega_tilde") {
      cfg.env.omega_tilde = v;
    } else if (param == "K") {
      const int k = static_cast<int>(std::llround(v));
      if (std::abs(v - k) > 1e-9 || k < 1) {
        throw ConfigError("K sweep values must be positive integers");
      }
      cfg.scenario.num_pairs = k;
    } else {
      throw ConfigError("unknown sweep parameter '" + param + "' (expected omega_tilde|K)");
    }
    if (progress) {
      (*progress) << "sweep " << param << " = " << v << "\n";
      progress->flush();
    }
    const RunResult r = run_experiment(cfg, nullptr);
    const auto push = [&](const char* metric, const SummaryStat& s) {
      rows.push_back(SweepRow{param, v, metric, s});
    };
    push("gain_J", r.summary.gain);
    push("switch_cost", r.summary.switch_cost);
    push("reward_exec", r.summary.reward_exec);
    push("reward_train", r.summary.reward_train);
    push("penalty_rate", r.summary.penalty_rate);
    push("alloc_iterations", r.summary.alloc_iterations);
  }
  if (!base.output_dir.empty()) {
    std::filesystem::create_directories(base.output_dir);
    write_sweep_csv(rows, base.output_dir / "sweep.csv");
  }
  return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "param,value,metric,mean,p25,p50,p75\n";
  out << std::setprecision(17);
  for (const SweepRow& r : rows) {
    out << r.param << ',' << r.value << ',' << r.metric << ',' << r.stat.mean << ',' << r.stat.p25
        << ',' << r.stat.p50 << ',' << r.stat.p75 << "\n";
  }
  if (!out) throw IoError("short write: " + path.string());
}

TrainResult train_experiment(const ExperimentConfig& cfg, std::ostream* progress) {
  MaddpgConfig learner = cfg.learner;
  learner.seed = cfg.seed;
  Maddpg agent(cfg.scenario.num_pairs, learner, make_obs_scale(cfg));

  TrainResult result;
  result.log = agent.train(cfg.scenario, cfg.env, cfg.model.costs, cfg.model.perception,
                           cfg.model.radio, progress);

  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    result.checkpoint = cfg.output_dir / "policy.ckpt";
    agent.save(result.checkpoint);
    write_training_log(result.log, cfg.output_dir / "training_log.csv");
    std::ofstream config(cfg.output_dir / "config.json");
    config << config_to_json(cfg);
  }
  return result;
}

void write_training_log(std::span<const Maddpg::EpisodeLog> log,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "episode,reward_train_mean,reward_exec_mean,critic_loss_mean,actor_objective_mean,"
         "penalty_rate\n";
  out << std::setprecision(17);
  for (const auto& row : log) {
    out << row.episode << ',' << row.reward_train_mean << ',' << row.reward_exec_mean << ','
        << row.critic_loss_mean << ',' << row.actor_objective_mean << ',' << row.penalty_rate
        << "\n";
  }
  if (!out) throw IoError("short write: " + path.string());
}

std::vector<Maddpg::EpisodeLog> read_training_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file (missing header)");
  std::vector<Maddpg::EpisodeLog> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    lineno += 1;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected 6 fields, got " +
                       std::to_string(f.size()));
    }
    Maddpg::EpisodeLog r;
    r.episode = parse_int(f[0], path, lineno);
    r.reward_train_mean = parse_double(f[1], path, lineno);
    r.reward_exec_mean = parse_double(f[2], path, lineno);
    r.critic_loss_mean = parse_double(f[3], path, lineno);
    r.actor_objective_mean = parse_double(f[4], path, lineno);
    r.penalty_rate = parse_double(f[5], path, lineno);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace acp
