#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace acp {

struct ScenarioConfig {
  int num_pairs = 2;
  int num_hdvs = 10;
  int lanes = 4;
  double lane_width_m = 3.5;
  double segment_len_m = 1500.0;
  double rsu_x_m = 750.0;
  double rsu_offset_m = 10.0;
  double rsu_radius_m = 250.0;
  double speed_min_mps = 23.0;
  double speed_max_mps = 27.0;
  double slot_len_s = 0.5;
  double travel_dist_m = 1000.0;
  double total_bandwidth_hz = 10.5e6;
  double hdv_request_prob = 0.5;
  double hdv_bandwidth_hz = 0.5e6;
  std::vector<int> workload_states = {4, 5, 6, 7, 8};
  // Row-stochastic, indexed by workload_states position. Empty selects the
  // default lazy walk: stay 0.4, step +/-1 with 0.3 each, blocked steps at
  // the ends fold into staying put.
  std::vector<std::vector<double>> workload_transition;
  double pair_dist_min_m = 5.0;
  double pair_dist_max_m = 60.0;
  std::uint64_t seed = 1;
};

// Validated transition matrix for a config (the default if none is given).
// Throws ConfigError on shape or row-sum violations.
std::vector<std::vector<double>> workload_transition_matrix(const ScenarioConfig& cfg);

// Number of slots an episode spans: ceil(travel / (mean_speed * slot_len)).
int episode_slot_count(const ScenarioConfig& cfg);

// True iff a vehicle at longitudinal position x lies within RSU range.
bool coverage(double x_m, const ScenarioConfig& cfg);

// Longitudinal position where the RSU circle first intersects the road.
double coverage_entry_x(const ScenarioConfig& cfg);

// One CAV pair's state in one slot. prev_mode is only meaningful inside the
// environment (traces carry the exogenous fields and leave it 0).
struct PairSlotState {
  int shared_w = 0;
  int tx_w = 0;
  int rx_w = 0;
  double distance_m = 0;
  int prev_mode = 0;
};

enum class VehicleKind { Cav, Hdv };
enum class PairRole { Tx, Rx, None };

struct Vehicle {
  int id = 0;
  VehicleKind kind = VehicleKind::Cav;
  int lane = 0;
  int pair_id = -1;        // -1 for HDVs
  PairRole role = PairRole::None;
};

struct VehicleSlotState {
  double x_m = 0;
  double speed_mps = 0;
  bool requesting = false;  // HDV V2R request; always false for CAVs
};

struct SlotRecord {
  std::vector<PairSlotState> pairs;
  std::vector<VehicleSlotState> vehicles;  // aligned with EpisodeTrace::vehicles
  std::vector<bool> in_coverage;           // aligned with vehicles
  double bandwidth_hz = 0;                 // B(n) left for V2V after HDV requests
  int hdvs_requesting = 0;
  double cluster_head_x_m = 0;
};

struct EpisodeTrace {
  std::vector<Vehicle> vehicles;  // pair k's members are ids 2k (tx) and 2k+1 (rx)
  std::vector<SlotRecord> slots;
};

bool operator==(const Vehicle& a, const Vehicle& b);
bool operator==(const VehicleSlotState& a, const VehicleSlotState& b);
bool operator==(const PairSlotState& a, const PairSlotState& b);
bool operator==(const SlotRecord& a, const SlotRecord& b);
bool operator==(const EpisodeTrace& a, const EpisodeTrace& b);

// Synthesizes one episode: the cluster enters RSU coverage at slot 0 and
// rolls for travel_dist at constant base speeds; pair followers jitter so
// distances wander inside pair_dist bounds; workloads follow the Markov
// chain; in-coverage HDVs consume bandwidth. Deterministic in (cfg, seed).
EpisodeTrace generate_episode(const ScenarioConfig& cfg, std::uint64_t seed);

// CSV round trip. Schema:
//   slot,vehicle_id,kind,lane,x_m,speed_mps,requesting,W_shared,W_T,W_R,pair_id,pair_role
// Floats are printed with max_digits10 so ingest reproduces the trace
// bit-for-bit. Ingest needs the config for RSU geometry and bandwidth
// bookkeeping, which the file does not carry.
void export_trace(const EpisodeTrace& trace, const std::filesystem::path& path);
EpisodeTrace ingest_trace(const std::filesystem::path& path, const ScenarioConfig& cfg);

}  // namespace acp
