#pragma once

#include <filesystem>
#include <string>

#include "acp/channel.hpp"
#include "acp/env.hpp"
#include "acp/maddpg.hpp"
#include "acp/perception.hpp"
#include "acp/scenario.hpp"

namespace acp {

// Everything the physics needs: the DNN cost profile, its derived
// aggregates, the timing/energy knobs and the radio parameters.
struct ModelParams {
  DnnProfile profile;
  double deadline_s = 0.1;
  double f_max_hz = 8e9;
  double kappa = 1e-28;
  RadioParams radio;
  DerivedCosts costs;           // derive_costs(profile)
  PerceptionParams perception;  // make_perception_params(...)
};

ModelParams make_model_params(const DnnProfile& profile, double deadline_s, double f_max_hz,
                              double kappa, const RadioParams& radio);

// One experiment = model + scenario + env + (optionally) learner settings,
// a policy name, an episode count, an output directory and a master seed.
// Per-episode trace seeds and all policy/learner randomness derive from the
// master seed through named sub-streams, so two configs differing only in
// policy see identical traffic.
struct ExperimentConfig {
  ModelParams model;
  ScenarioConfig scenario;
  EnvParams env;
  MaddpgConfig learner;
  std::string policy = "brute";  // random | allcp | brute | learned:<checkpoint>
  int episodes = 100;
  std::filesystem::path output_dir;
  std::uint64_t seed = 1;
};

ExperimentConfig default_config();

// Strict JSON ingestion: unknown keys anywhere are ConfigErrors (they are
// nearly always typos), missing keys keep their defaults. Nested seeds are
// intentionally not accepted; the one top-level "seed" drives everything.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Resolved round-trippable view of a config (written next to outputs).
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace acp
