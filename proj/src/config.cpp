#include "acp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "acp/errors.hpp"

namespace acp {
namespace {

using nlohmann::json;

void expect_keys(const json& j, const std::string& scope, std::set<std::string> allowed) {
  if (!j.is_object()) throw ConfigError(scope + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown config key " + scope + "." + key);
  }
}

template <typename T>
void read_field(const json& j, const std::string& scope, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw ConfigError("bad value for " + scope + "." + key + ": " + e.what());
  }
}

void parse_dnn(const json& j, DnnProfile& p) {
  expect_keys(j, "dnn", {"delta1", "delta2", "delta3", "delta4", "rho", "rho_tilde", "feature_bits"});
  read_field(j, "dnn", "delta1", p.delta1);
  read_field(j, "dnn", "delta2", p.delta2);
  read_field(j, "dnn", "delta3", p.delta3);
  read_field(j, "dnn", "delta4", p.delta4);
  read_field(j, "dnn", "rho", p.rho);
  read_field(j, "dnn", "rho_tilde", p.rho_tilde);
  read_field(j, "dnn", "feature_bits", p.feature_bits);
}

void parse_perception(const json& j, ModelParams& m) {
  expect_keys(j, "perception", {"deadline_s", "f_max_hz", "kappa"});
  read_field(j, "perception", "deadline_s", m.deadline_s);
  read_field(j, "perception", "f_max_hz", m.f_max_hz);
  read_field(j, "perception", "kappa", m.kappa);
}

void parse_radio(const json& j, RadioParams& r) {
  expect_keys(j, "radio", {"fc_ghz", "tx_power_dbm", "noise_dbm"});
  read_field(j, "radio", "fc_ghz", r.fc_ghz);
  read_field(j, "radio", "tx_power_dbm", r.tx_power_dbm);
  read_field(j, "radio", "noise_dbm", r.noise_dbm);
}

void parse_scenario(const json& j, ScenarioConfig& s) {
  expect_keys(j, "scenario",
              {"num_pairs", "num_hdvs", "lanes", "lane_width_m", "segment_len_m", "rsu_x_m",
               "rsu_offset_m", "rsu_radius_m", "speed_min_mps", "speed_max_mps", "slot_len_s",
               "travel_dist_m", "total_bandwidth_hz", "hdv_request_prob", "hdv_bandwidth_hz",
               "workload_states", "workload_transition", "pair_dist_min_m", "pair_dist_max_m"});
  read_field(j, "scenario", "num_pairs", s.num_pairs);
  read_field(j, "scenario", "num_hdvs", s.num_hdvs);
  read_field(j, "scenario", "lanes", s.lanes);
  read_field(j, "scenario", "lane_width_m", s.lane_width_m);
  read_field(j, "scenario", "segment_len_m", s.segment_len_m);
  read_field(j, "scenario", "rsu_x_m", s.rsu_x_m);
  read_field(j, "scenario", "rsu_offset_m", s.rsu_offset_m);
  read_field(j, "scenario", "rsu_radius_m", s.rsu_radius_m);
  read_field(j, "scenario", "speed_min_mps", s.speed_min_mps);
  read_field(j, "scenario", "speed_max_mps", s.speed_max_mps);
  read_field(j, "scenario", "slot_len_s", s.slot_len_s);
  read_field(j, "scenario", "travel_dist_m", s.travel_dist_m);
  read_field(j, "scenario", "total_bandwidth_hz", s.total_bandwidth_hz);
  read_field(j, "scenario", "hdv_request_prob", s.hdv_request_prob);
  read_field(j, "scenario", "hdv_bandwidth_hz", s.hdv_bandwidth_hz);
  read_field(j, "scenario", "workload_states", s.workload_states);
  read_field(j, "scenario", "workload_transition", s.workload_transition);
  read_field(j, "scenario", "pair_dist_min_m", s.pair_dist_min_m);
  read_field(j, "scenario", "pair_dist_max_m", s.pair_dist_max_m);
}

void parse_env(const json& j, EnvParams& e) {
  expect_keys(j, "env", {"omega_tilde", "penalty", "refinement_enabled"});
  read_field(j, "env", "omega_tilde", e.omega_tilde);
  read_field(j, "env", "penalty", e.penalty);
  read_field(j, "env", "refinement_enabled", e.refinement_enabled);
}

void parse_learner(const json& j, MaddpgConfig& l) {
  expect_keys(j, "learner",
              {"gamma", "xi", "lr_critic", "lr_actor", "batch", "buffer_capacity",
               "gumbel_temperature", "episodes", "hidden"});
  read_field(j, "learner", "gamma", l.gamma);
  read_field(j, "learner", "xi", l.xi);
  read_field(j, "learner", "lr_critic", l.lr_critic);
  read_field(j, "learner", "lr_actor", l.lr_actor);
  read_field(j, "learner", "batch", l.batch);
  read_field(j, "learner", "buffer_capacity", l.buffer_capacity);
  read_field(j, "learner", "gumbel_temperature", l.gumbel_temperature);
  read_field(j, "learner", "episodes", l.episodes);
  read_field(j, "learner", "hidden", l.hidden);
}

}  // namespace

ModelParams make_model_params(const DnnProfile& profile, double deadline_s, double f_max_hz,
                              double kappa, const RadioParams& radio) {
  ModelParams m;
  m.profile = profile;
  m.deadline_s = deadline_s;
  m.f_max_hz = f_max_hz;
  m.kappa = kappa;
  m.radio = radio;
  m.costs = derive_costs(profile);
  m.perception = make_perception_params(deadline_s, f_max_hz, kappa, m.costs);
  return m;
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.model = make_model_params(DnnProfile{}, 0.1, 8e9, 1e-28, RadioParams{});
  return cfg;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  expect_keys(j, "config",
              {"dnn", "perception", "radio", "scenario", "env", "learner", "policy", "episodes",
               "output_dir", "seed"});

  ExperimentConfig cfg = default_config();
  DnnProfile profile = cfg.model.profile;
  double deadline = cfg.model.deadline_s, f_max = cfg.model.f_max_hz, kappa = cfg.model.kappa;
  RadioParams radio = cfg.model.radio;

  if (j.contains("dnn")) parse_dnn(j["dnn"], profile);
  if (j.contains("perception")) {
    ModelParams tmp;
    tmp.deadline_s = deadline;
    tmp.f_max_hz = f_max;
    tmp.kappa = kappa;
    parse_perception(j["perception"], tmp);
    deadline = tmp.deadline_s;
    f_max = tmp.f_max_hz;
    kappa = tmp.kappa;
  }
  if (j.contains("radio")) parse_radio(j["radio"], radio);
  if (j.contains("scenario")) parse_scenario(j["scenario"], cfg.scenario);
  if (j.contains("env")) parse_env(j["env"], cfg.env);
  if (j.contains("learner")) parse_learner(j["learner"], cfg.learner);
  read_field(j, "config", "policy", cfg.policy);
  read_field(j, "config", "episodes", cfg.episodes);
  std::string out_dir = cfg.output_dir.string();
  read_field(j, "config", "output_dir", out_dir);
  cfg.output_dir = out_dir;
  read_field(j, "config", "seed", cfg.seed);

  // The V2V budget is a scenario property; the radio struct mirrors it so
  // channel helpers and observation scaling agree with the simulator.
  radio.total_bandwidth_hz = cfg.scenario.total_bandwidth_hz;
  cfg.model = make_model_params(profile, deadline, f_max, kappa, radio);
  cfg.learner.seed = cfg.seed;

  if (cfg.episodes < 0) throw ConfigError("episodes must be non-negative");
  if (cfg.learner.episodes < 1) throw ConfigError("learner.episodes must be positive");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["dnn"] = {{"delta1", cfg.model.profile.delta1},     {"delta2", cfg.model.profile.delta2},
              {"delta3", cfg.model.profile.delta3},     {"delta4", cfg.model.profile.delta4},
              {"rho", cfg.model.profile.rho},           {"rho_tilde", cfg.model.profile.rho_tilde},
              {"feature_bits", cfg.model.profile.feature_bits}};
  j["perception"] = {{"deadline_s", cfg.model.deadline_s},
                     {"f_max_hz", cfg.model.f_max_hz},
                     {"kappa", cfg.model.kappa}};
  j["radio"] = {{"fc_ghz", cfg.model.radio.fc_ghz},
                {"tx_power_dbm", cfg.model.radio.tx_power_dbm},
                {"noise_dbm", cfg.model.radio.noise_dbm}};
  j["scenario"] = {{"num_pairs", cfg.scenario.num_pairs},
                   {"num_hdvs", cfg.scenario.num_hdvs},
                   {"lanes", cfg.scenario.lanes},
                   {"lane_width_m", cfg.scenario.lane_width_m},
                   {"segment_len_m", cfg.scenario.segment_len_m},
                   {"rsu_x_m", cfg.scenario.rsu_x_m},
                   {"rsu_offset_m", cfg.scenario.rsu_offset_m},
                   {"rsu_radius_m", cfg.scenario.rsu_radius_m},
                   {"speed_min_mps", cfg.scenario.speed_min_mps},
                   {"speed_max_mps", cfg.scenario.speed_max_mps},
                   {"slot_len_s", cfg.scenario.slot_len_s},
                   {"travel_dist_m", cfg.scenario.travel_dist_m},
                   {"total_bandwidth_hz", cfg.scenario.total_bandwidth_hz},
                   {"hdv_request_prob", cfg.scenario.hdv_request_prob},
                   {"hdv_bandwidth_hz", cfg.scenario.hdv_bandwidth_hz},
                   {"workload_states", cfg.scenario.workload_states},
                   {"workload_transition", workload_transition_matrix(cfg.scenario)},
                   {"pair_dist_min_m", cfg.scenario.pair_dist_min_m},
                   {"pair_dist_max_m", cfg.scenario.pair_dist_max_m}};
  j["env"] = {{"omega_tilde", cfg.env.omega_tilde},
              {"penalty", cfg.env.penalty},
              {"refinement_enabled", cfg.env.refinement_enabled}};
  j["learner"] = {{"gamma", cfg.learner.gamma},
                  {"xi", cfg.learner.xi},
                  {"lr_critic", cfg.learner.lr_critic},
                  {"lr_actor", cfg.learner.lr_actor},
                  {"batch", cfg.learner.batch},
                  {"buffer_capacity", cfg.learner.buffer_capacity},
                  {"gumbel_temperature", cfg.learner.gumbel_temperature},
                  {"episodes", cfg.learner.episodes},
                  {"hidden", cfg.learner.hidden}};
  j["policy"] = cfg.policy;
  j["episodes"] = cfg.episodes;
  j["output_dir"] = cfg.output_dir.string();
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

}  // namespace acp
