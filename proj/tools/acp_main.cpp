#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "acp/allocator.hpp"
#include "acp/config.hpp"
#include "acp/errors.hpp"
#include "acp/harness.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonFlags {
  std::string config_path;
  std::string policy;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int episodes = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_policy) {
  cmd->add_option("--config", flags.config_path, "experiment config JSON");
  cmd->add_option("--seed", flags.seed, "master seed")->each([&](const std::string&) {
    flags.seed_set = true;
  });
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--episodes", flags.episodes, "episode count override");
  if (with_policy) {
    cmd->add_option("--policy", flags.policy,
                    "random | allcp | brute | learned:<checkpoint>");
  }
}

acp::ExperimentConfig resolve_config(const CommonFlags& flags) {
  acp::ExperimentConfig cfg =
      flags.config_path.empty() ? acp::default_config() : acp::load_config(flags.config_path);
  if (flags.seed_set) {
    cfg.seed = flags.seed;
    cfg.learner.seed = flags.seed;
  }
  if (!flags.policy.empty()) cfg.policy = flags.policy;
  if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
  if (flags.episodes >= 0) cfg.episodes = flags.episodes;
  return cfg;
}

std::string read_arg_or_file(const std::string& arg) {
  if (arg.empty() || arg[0] != '@') return arg;
  std::ifstream in(arg.substr(1));
  if (!in) throw acp::IoError("cannot open: " + arg.substr(1));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json allocation_to_json(const acp::AllocationResult& r) {
  const char* verdict = r.verdict == acp::AllocVerdict::Optimal      ? "optimal"
                        : r.verdict == acp::AllocVerdict::TightAtCap ? "tight_at_cap"
                                                                     : "infeasible";
  return json{{"verdict", verdict},
              {"f_star_hz", r.f_star},
              {"beta_star", r.beta_star},
              {"rate_star_bps", r.rate_star},
              {"gain_star_J", r.gain_star},
              {"lambda_star", r.lambda_star},
              {"gain_total_J", r.gain_total},
              {"nu_star", r.nu_star},
              {"h_residual", r.h_residual},
              {"iterations", r.iterations}};
}

int cmd_allocate(const CommonFlags& flags, const std::string& pairs_arg, double b_mhz) {
  const acp::ExperimentConfig cfg = resolve_config(flags);
  json pairs_json;
  try {
    pairs_json = json::parse(read_arg_or_file(pairs_arg));
  } catch (const json::exception& e) {
    throw acp::ParseError(std::string("--pairs is not valid JSON: ") + e.what());
  }
  if (!pairs_json.is_array() || pairs_json.empty()) {
    throw acp::ConfigError("--pairs must be a non-empty JSON array of {\"W\":..,\"D_m\":..}");
  }
  std::vector<acp::PairSlotState> pairs;
  for (const auto& item : pairs_json) {
    if (!item.is_object() || !item.contains("W") || !item.contains("D_m")) {
      throw acp::ConfigError("each pair needs W and D_m");
    }
    acp::PairSlotState p;
    p.shared_w = item.at("W").get<int>();
    p.distance_m = item.at("D_m").get<double>();
    pairs.push_back(p);
  }
  const acp::AllocationResult r = acp::solve(pairs, b_mhz * 1e6, cfg.model.costs,
                                             cfg.model.perception, cfg.model.radio);
  std::cout << allocation_to_json(r).dump(2) << "\n";
  return kExitOk;
}

int cmd_regions(const CommonFlags& flags, double w, const std::string& grid_path,
                double rate_max_mbps, int samples) {
  const acp::ExperimentConfig cfg = resolve_config(flags);
  const auto th = acp::frequencies_and_thresholds(w, cfg.model.costs, cfg.model.perception);
  json j{{"W", w},
         {"f_default_hz", th.f_default},
         {"f_zero_gain_hz", th.f_zero_gain},
         {"f_cap_hz", th.f_cap},
         {"f_max_hz", cfg.model.perception.f_max_hz},
         {"regime", th.regime == acp::WorkloadRegime::Low ? "low" : "high"},
         {"rate_at_f_max_bps", th.rate_at_f_max},
         {"rate_at_zero_gain_bps", th.rate_at_zero_gain},
         {"rate_at_default_bps", th.rate_at_default}};
  std::cout << j.dump(2) << "\n";

  if (!grid_path.empty()) {
    std::ofstream out(grid_path);
    if (!out) throw acp::IoError("cannot open for writing: " + grid_path);
    out << "rate_mbps,freq_ghz,region\n";
    const double f_hi = cfg.model.perception.f_max_hz * 1.1;
    for (int i = 1; i <= samples; ++i) {
      const double rate = rate_max_mbps * 1e6 * i / samples;
      for (int k = 1; k <= samples; ++k) {
        const double f = f_hi * k / samples;
        const acp::Region reg =
            acp::classify_region(rate, f, w, cfg.model.costs, cfg.model.perception);
        out << rate / 1e6 << ',' << f / 1e9 << ',' << acp::to_string(reg) << "\n";
      }
    }
  }
  return kExitOk;
}

int cmd_simulate(const CommonFlags& flags, bool dump_traces) {
  const acp::ExperimentConfig cfg = resolve_config(flags);
  if (dump_traces) {
    if (cfg.output_dir.empty()) throw acp::ConfigError("--traces needs --out");
    std::filesystem::create_directories(cfg.output_dir);
    const std::uint64_t stream = acp::substream_seed(cfg.seed, "scenario");
    for (int e = 0; e < cfg.episodes; ++e) {
      char name[32];
      std::snprintf(name, sizeof(name), "trace_%04d.csv", e);
      acp::export_trace(acp::generate_episode(cfg.scenario, acp::episode_seed(stream, e)),
                        cfg.output_dir / name);
    }
  }
  const acp::RunResult r = acp::run_experiment(cfg, &std::cerr);
  std::cout << acp::summary_to_json(r.summary);
  return kExitOk;
}

int cmd_train(const CommonFlags& flags) {
  acp::ExperimentConfig cfg = resolve_config(flags);
  if (flags.episodes >= 0) cfg.learner.episodes = flags.episodes;
  if (cfg.output_dir.empty()) throw acp::ConfigError("train needs --out for the checkpoint");
  const acp::TrainResult r = acp::train_experiment(cfg, &std::cerr);
  std::cout << "checkpoint " << r.checkpoint.string() << "\n";
  return kExitOk;
}

int cmd_evaluate(const CommonFlags& flags, const std::string& checkpoint) {
  CommonFlags f = flags;
  f.policy = "learned:" + checkpoint;
  return cmd_simulate(f, /*dump_traces=*/false);
}

int cmd_sweep(const CommonFlags& flags, const std::string& param,
              const std::vector<double>& values) {
  const acp::ExperimentConfig cfg = resolve_config(flags);
  if (values.empty()) throw acp::ConfigError("sweep needs at least one --values entry");
  const auto rows = acp::run_sweep(cfg, param, values, &std::cerr);
  std::cout << "param,value,metric,mean,p25,p50,p75\n";
  for (const auto& r : rows) {
    std::cout << r.param << ',' << r.value << ',' << r.metric << ',' << r.stat.mean << ','
              << r.stat.p25 << ',' << r.stat.p50 << ',' << r.stat.p75 << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cooperative perception resource allocation and mode selection"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto* allocate = app.add_subcommand("allocate", "price one cooperative set");
  std::string pairs_arg;
  double b_mhz = 10.5;
  add_common(allocate, flags, /*with_policy=*/false);
  allocate->add_option("--pairs", pairs_arg, "JSON [{\"W\":6,\"D_m\":20},...] or @file")
      ->required();
  allocate->add_option("--B_MHz", b_mhz, "V2V bandwidth budget in MHz");

  auto* regions = app.add_subcommand("regions", "operating-region thresholds for a workload");
  double region_w = 6;
  std::string grid_path;
  double rate_max_mbps = 60;
  int grid_samples = 120;
  add_common(regions, flags, /*with_policy=*/false);
  regions->add_option("--W", region_w, "shared workload");
  regions->add_option("--grid", grid_path, "also write a rate x frequency region grid CSV");
  regions->add_option("--rate-max-mbps", rate_max_mbps, "grid rate ceiling");
  regions->add_option("--samples", grid_samples, "grid resolution per axis");

  auto* simulate = app.add_subcommand("simulate", "run a policy over seeded episodes");
  bool dump_traces = false;
  add_common(simulate, flags, /*with_policy=*/true);
  simulate->add_flag("--traces", dump_traces, "also export the scenario trace CSVs");

  auto* train = app.add_subcommand("train", "train the learned policy");
  add_common(train, flags, /*with_policy=*/false);

  auto* evaluate = app.add_subcommand("evaluate", "evaluate a trained checkpoint");
  std::string checkpoint;
  add_common(evaluate, flags, /*with_policy=*/false);
  evaluate->add_option("--checkpoint", checkpoint, "policy checkpoint path")->required();

  auto* sweep = app.add_subcommand("sweep", "paired runs over omega_tilde or K");
  std::string sweep_param = "omega_tilde";
  std::vector<double> sweep_values;
  add_common(sweep, flags, /*with_policy=*/true);
  sweep->add_option("--param", sweep_param, "omega_tilde | K");
  sweep->add_option("--values", sweep_values, "sweep values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (allocate->parsed()) return cmd_allocate(flags, pairs_arg, b_mhz);
    if (regions->parsed()) return cmd_regions(flags, region_w, grid_path, rate_max_mbps, grid_samples);
    if (simulate->parsed()) return cmd_simulate(flags, dump_traces);
    if (train->parsed()) return cmd_train(flags);
    if (evaluate->parsed()) return cmd_evaluate(flags, checkpoint);
    if (sweep->parsed()) return cmd_sweep(flags, sweep_param, sweep_values);
  } catch (const acp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const acp::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
