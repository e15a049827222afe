#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "acp/config.hpp"
#include "acp/maddpg.hpp"
#include "acp/metrics.hpp"

namespace acp {

// One row of the per-slot results CSV:
//   slot,B_MHz,action_bits,feasible,G_star_J,C,reward_train,reward_exec
// Episodes are concatenated; a row with slot == 0 starts a new episode.
// alloc_iterations is carried in memory for diagnostics but is not part of
// the declared schema, so aggregation from disk reports it as zero.
struct SlotResult {
  int slot = 0;
  double bandwidth_mhz = 0;
  std::string action_bits;
  bool feasible = true;
  double gain = 0;
  int switch_count = 0;
  double reward_train = 0;
  double reward_exec = 0;
  double alloc_iterations = 0;
};

// Per-slot action chooser over the agents' observations.
using PolicyFn = std::function<std::vector<int>(const std::vector<AgentObservation>&, Rng&)>;

// Resolves a policy name: random | allcp | brute | learned:<checkpoint>.
// Throws ConfigError for unknown names, IoError/ParseError for bad
// checkpoints.
PolicyFn make_policy(const std::string& name, const ExperimentConfig& cfg);

// Observation scaling consistent with a config (bandwidth by the scenario
// budget, workload by the largest chain state).
ObsScale make_obs_scale(const ExperimentConfig& cfg);

struct RunResult {
  std::vector<SlotResult> slots;
  std::vector<EpisodeMetrics> episodes;
  MetricsSummary summary;
};

// Runs cfg.episodes seeded episodes under cfg.policy. Trace seeds derive
// from substream(seed, "scenario") and policy noise from substream(seed,
// "policy"), so runs differing only in policy are variance-paired. With a
// non-empty output_dir writes slots.csv, summary.json and config.json.
RunResult run_experiment(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

void write_slot_csv(std::span<const SlotResult> slots, const std::filesystem::path& path);
std::vector<SlotResult> read_slot_csv(const std::filesystem::path& path);

std::vector<EpisodeMetrics> episodes_from_slots(std::span<const SlotResult> slots);
MetricsSummary aggregate_slots(std::span<const SlotResult> slots);

struct SweepRow {
  std::string param;
  double value = 0;
  std::string metric;
  SummaryStat stat;
};

// One paired run per value of "omega_tilde" or "K". With a non-empty
// output_dir writes sweep.csv (tidy: param,value,metric,mean,p25,p50,p75).
std::vector<SweepRow> run_sweep(const ExperimentConfig& base, const std::string& param,
                                std::span<const double> values, std::ostream* progress = nullptr);

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path);

struct TrainResult {
  std::vector<Maddpg::EpisodeLog> log;
  std::filesystem::path checkpoint;  // empty if no output_dir was given
};

// Trains a learner (learner.seed is forced to cfg.seed) and, with a
// non-empty output_dir, writes policy.ckpt, training_log.csv, config.json.
TrainResult train_experiment(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

void write_training_log(std::span<const Maddpg::EpisodeLog> log,
                        const std::filesystem::path& path);
std::vector<Maddpg::EpisodeLog> read_training_log(const std::filesystem::path& path);

}  // namespace acp
