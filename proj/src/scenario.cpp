#include "acp/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "acp/errors.hpp"
#include "acp/rng.hpp"

namespace acp {

namespace {

void validate(const ScenarioConfig& cfg) {
  if (cfg.num_pairs < 0 || cfg.num_hdvs < 0 || cfg.lanes < 1) {
    throw ConfigError("scenario: counts out of range");
  }
  if (cfg.speed_min_mps <= 0 || cfg.speed_max_mps < cfg.speed_min_mps) {
    throw ConfigError("scenario: bad speed range");
  }
  if (cfg.slot_len_s <= 0 || cfg.travel_dist_m <= 0) {
    throw ConfigError("scenario: slot length and travel distance must be positive");
  }
  if (cfg.rsu_radius_m <= cfg.rsu_offset_m) {
    throw ConfigError("scenario: RSU radius must exceed its lateral offset");
  }
  if (cfg.hdv_bandwidth_hz * cfg.num_hdvs > cfg.total_bandwidth_hz) {
    throw ConfigError("scenario: HDVs could exhaust the sidelink bandwidth");
  }
  if (cfg.hdv_request_prob < 0 || cfg.hdv_request_prob > 1) {
    throw ConfigError("scenario: request probability outside [0,1]");
  }
  if (cfg.workload_states.empty()) throw ConfigError("scenario: no workload states");
  if (cfg.pair_dist_min_m <= 0 || cfg.pair_dist_max_m <= cfg.pair_dist_min_m) {
    throw ConfigError("scenario: bad pair distance bounds");
  }
}

// Fold g back into [lo, hi].
double reflect(double g, double lo, double hi) {
  for (int guard = 0; guard < 64 && (g < lo || g > hi); ++guard) {
    if (g < lo) g = 2 * lo - g;
    if (g > hi) g = 2 * hi - g;
  }
  return std::clamp(g, lo, hi);
}

}  // namespace

std::vector<std::vector<double>> workload_transition_matrix(const ScenarioConfig& cfg) {
  const std::size_t n = cfg.workload_states.size();
  std::vector<std::vector<double>> m = cfg.workload_transition;
  if (m.empty()) {
    m.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      double stay = 0.4;
      if (i > 0) m[i][i - 1] = 0.3; else stay += 0.3;
      if (i + 1 < n) m[i][i + 1] = 0.3; else stay += 0.3;
      m[i][i] = n == 1 ? 1.0 : stay;
    }
  }
  if (m.size() != n) throw ConfigError("workload transition: wrong row count");
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) throw ConfigError("workload transition: wrong column count");
    double sum = 0;
    for (double p : m[i]) {
      if (p < 0) throw ConfigError("workload transition: negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ConfigError("workload transition: row does not sum to 1");
    }
  }
  return m;
}

int episode_slot_count(const ScenarioConfig& cfg) {
  const double mean_speed = 0.5 * (cfg.speed_min_mps + cfg.speed_max_mps);
  return static_cast<int>(std::ceil(cfg.travel_dist_m / (mean_speed * cfg.slot_len_s)));
}

bool coverage(double x_m, const ScenarioConfig& cfg) {
  const double dx = x_m - cfg.rsu_x_m;
  return std::sqrt(dx * dx + cfg.rsu_offset_m * cfg.rsu_offset_m) <= cfg.rsu_radius_m;
}

double coverage_entry_x(const ScenarioConfig& cfg) {
  const double half_chord = std::sqrt(cfg.rsu_radius_m * cfg.rsu_radius_m -
                                      cfg.rsu_offset_m * cfg.rsu_offset_m);
  return cfg.rsu_x_m - half_chord;
}

bool operator==(const Vehicle& a, const Vehicle& b) {
  return a.id == b.id && a.kind == b.kind && a.lane == b.lane &&
         a.pair_id == b.pair_id && a.role == b.role;
}
bool operator==(const VehicleSlotState& a, const VehicleSlotState& b) {
  return a.x_m == b.x_m && a.speed_mps == b.speed_mps && a.requesting == b.requesting;
}
bool operator==(const PairSlotState& a, const PairSlotState& b) {
  return a.shared_w == b.shared_w && a.tx_w == b.tx_w && a.rx_w == b.rx_w &&
         a.distance_m == b.distance_m && a.prev_mode == b.prev_mode;
}
bool operator==(const SlotRecord& a, const SlotRecord& b) {
  return a.pairs == b.pairs && a.vehicles == b.vehicles &&
         a.in_coverage == b.in_coverage && a.bandwidth_hz == b.bandwidth_hz &&
         a.hdvs_requesting == b.hdvs_requesting &&
         a.cluster_head_x_m == b.cluster_head_x_m;
}
bool operator==(const EpisodeTrace& a, const EpisodeTrace& b) {
  return a.vehicles == b.vehicles && a.slots == b.slots;
}

EpisodeTrace generate_episode(const ScenarioConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  Rng rng(seed);
  const auto chain = workload_transition_matrix(cfg);
  const int n_slots = episode_slot_count(cfg);
  const int k_pairs = cfg.num_pairs;
  const int n_vehicles = 2 * k_pairs + cfg.num_hdvs;

  EpisodeTrace trace;
  trace.vehicles.reserve(n_vehicles);

  // Layout: one "unit" per pair (receiver leads, transmitter behind by a
  // gap) plus one unit per HDV, round-robin across lanes with 25 m headway
  // and +/-5 m jitter. Fixed draw order keeps the trace reproducible.
  struct PairDyn {
    double rx_x, base_speed, gap, lat, gap_lo, gap_hi;
    int lane_rx, lane_tx, w_idx;
  };
  struct HdvDyn {
    double x, speed;
  };
  std::vector<PairDyn> pairs(k_pairs);
  std::vector<HdvDyn> hdvs(cfg.num_hdvs);

  int unit = 0;
  for (int k = 0; k < k_pairs; ++k, ++unit) {
    PairDyn& p = pairs[k];
    p.lane_rx = unit % cfg.lanes;
    p.rx_x = -25.0 * unit + rng.uniform(-5.0, 5.0);
    p.base_speed = rng.uniform(cfg.speed_min_mps, cfg.speed_max_mps);
    const bool lane_apart = cfg.lanes > 1 && rng.bernoulli(0.5);
    p.lane_tx = !lane_apart ? p.lane_rx
                : p.lane_rx + 1 < cfg.lanes ? p.lane_rx + 1 : p.lane_rx - 1;
    p.lat = cfg.lane_width_m * std::abs(p.lane_tx - p.lane_rx);
    p.gap = rng.uniform(5.0, 25.0);
    p.gap_lo = std::sqrt(std::max(0.0, cfg.pair_dist_min_m * cfg.pair_dist_min_m - p.lat * p.lat));
    p.gap_hi = std::sqrt(cfg.pair_dist_max_m * cfg.pair_dist_max_m - p.lat * p.lat);
    p.gap = reflect(p.gap, p.gap_lo, p.gap_hi);
  }
  for (int h = 0; h < cfg.num_hdvs; ++h, ++unit) {
    hdvs[h].x = -25.0 * unit + rng.uniform(-5.0, 5.0);
    hdvs[h].speed = rng.uniform(cfg.speed_min_mps, cfg.speed_max_mps);
  }
  for (auto& p : pairs) p.w_idx = rng.uniform_int(0, static_cast<int>(cfg.workload_states.size()) - 1);

  // Shift so the leading vehicle starts exactly at the coverage entry.
  double head = -1e300;
  for (const auto& p : pairs) head = std::max(head, std::max(p.rx_x, p.rx_x - p.gap));
  for (const auto& h : hdvs) head = std::max(head, h.x);
  const double shift = coverage_entry_x(cfg) - head;
  for (auto& p : pairs) p.rx_x += shift;
  for (auto& h : hdvs) h.x += shift;

  for (int k = 0; k < k_pairs; ++k) {
    trace.vehicles.push_back({2 * k, VehicleKind::Cav, pairs[k].lane_tx, k, PairRole::Tx});
    trace.vehicles.push_back({2 * k + 1, VehicleKind::Cav, pairs[k].lane_rx, k, PairRole::Rx});
  }
  for (int h = 0; h < cfg.num_hdvs; ++h) {
    trace.vehicles.push_back({2 * k_pairs + h, VehicleKind::Hdv,
                              (k_pairs + h) % cfg.lanes, -1, PairRole::None});
  }

  trace.slots.reserve(n_slots);
  for (int n = 0; n < n_slots; ++n) {
    if (n > 0) {
      // Advance dynamics. Draw order per slot: per pair (workload step,
      // tx jitter), then per HDV nothing positional (constant speed).
      for (auto& p : pairs) {
        const double u = rng.uniform();
        double acc = 0;
        int next = static_cast<int>(chain[p.w_idx].size()) - 1;
        for (std::size_t j = 0; j < chain[p.w_idx].size(); ++j) {
          acc += chain[p.w_idx][j];
          if (u < acc) { next = static_cast<int>(j); break; }
        }
        p.w_idx = next;
        p.rx_x += p.base_speed * cfg.slot_len_s;
        const double jitter = rng.uniform(-0.5, 0.5);
        p.gap = reflect(p.gap - jitter * cfg.slot_len_s, p.gap_lo, p.gap_hi);
      }
      for (auto& h : hdvs) h.x += h.speed * cfg.slot_len_s;
    }

    SlotRecord rec;
    rec.pairs.resize(k_pairs);
    rec.vehicles.resize(n_vehicles);
    rec.in_coverage.resize(n_vehicles);
    double head_x = -1e300;

    for (int k = 0; k < k_pairs; ++k) {
      auto& p = pairs[k];
      const double tx_x = p.rx_x - p.gap;
      rec.vehicles[2 * k] = {tx_x, p.base_speed, false};
      rec.vehicles[2 * k + 1] = {p.rx_x, p.base_speed, false};
      auto& st = rec.pairs[k];
      st.shared_w = cfg.workload_states[p.w_idx];
      st.tx_w = rng.uniform_int(0, 4);
      st.rx_w = rng.uniform_int(0, 4);
      st.distance_m = std::hypot(p.rx_x - tx_x, p.lat);
      head_x = std::max(head_x, std::max(tx_x, p.rx_x));
    }
    int requesting = 0;
    for (int h = 0; h < cfg.num_hdvs; ++h) {
      const int vid = 2 * k_pairs + h;
      bool req = false;
      if (coverage(hdvs[h].x, cfg)) req = rng.bernoulli(cfg.hdv_request_prob);
      rec.vehicles[vid] = {hdvs[h].x, hdvs[h].speed, req};
      requesting += req ? 1 : 0;
      head_x = std::max(head_x, hdvs[h].x);
    }
    for (int v = 0; v < n_vehicles; ++v) {
      rec.in_coverage[v] = coverage(rec.vehicles[v].x_m, cfg);
    }
    rec.hdvs_requesting = requesting;
    rec.bandwidth_hz = cfg.total_bandwidth_hz - cfg.hdv_bandwidth_hz * requesting;
    rec.cluster_head_x_m = head_x;
    trace.slots.push_back(std::move(rec));
  }
  return trace;
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

const char* role_name(PairRole r) {
  switch (r) {
    case PairRole::Tx: return "tx";
    case PairRole::Rx: return "rx";
    default: return "na";
  }
}

}  // namespace

void export_trace(const EpisodeTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open trace file for writing: " + path.string());
  out << "slot,vehicle_id,kind,lane,x_m,speed_mps,requesting,W_shared,W_T,W_R,pair_id,pair_role\n";
  for (std::size_t n = 0; n < trace.slots.size(); ++n) {
    const auto& rec = trace.slots[n];
    for (const auto& v : trace.vehicles) {
      const auto& vs = rec.vehicles[v.id];
      int ws = 0, wt = 0, wr = 0;
      if (v.pair_id >= 0) {
        const auto& ps = rec.pairs[v.pair_id];
        ws = ps.shared_w; wt = ps.tx_w; wr = ps.rx_w;
      }
      out << n << ',' << v.id << ',' << (v.kind == VehicleKind::Cav ? "cav" : "hdv")
          << ',' << v.lane << ',' << fmt_double(vs.x_m) << ',' << fmt_double(vs.speed_mps)
          << ',' << (vs.requesting ? 1 : 0) << ',' << ws << ',' << wt << ',' << wr
          << ',' << v.pair_id << ',' << role_name(v.role) << '\n';
    }
  }
  if (!out.good()) throw IoError("short write on trace file: " + path.string());
}

namespace {

struct Row {
  int slot, vehicle_id, lane, requesting, w_shared, w_t, w_r, pair_id;
  std::string kind, role;
  double x_m, speed_mps;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') { out.push_back(cur); cur.clear(); }
    else cur.push_back(c);
  }
  out.push_back(cur);
  return out;
}

int parse_int(const std::string& s, int line_no, const char* col) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ParseError("trace line " + std::to_string(line_no) + ": bad integer in column '" +
                     col + "': '" + s + "'");
  }
  return v;
}

double parse_double(const std::string& s, int line_no, const char* col) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("trace line " + std::to_string(line_no) + ": bad number in column '" +
                     col + "': '" + s + "'");
  }
}

}  // namespace

EpisodeTrace ingest_trace(const std::filesystem::path& path, const ScenarioConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file: " + path.string());

  std::string header;
  if (!std::getline(in, header)) throw ParseError("trace file is empty");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const std::vector<std::string> expect = {
      "slot", "vehicle_id", "kind", "lane", "x_m", "speed_mps", "requesting",
      "W_shared", "W_T", "W_R", "pair_id", "pair_role"};
  const auto cols = split_csv(header);
  for (const auto& name : expect) {
    if (std::find(cols.begin(), cols.end(), name) == cols.end()) {
      throw ParseError("trace schema mismatch: missing column '" + name + "'");
    }
  }
  if (cols != expect) throw ParseError("trace schema mismatch: unexpected column order");

  std::vector<Row> rows;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != expect.size()) {
      throw ParseError("trace line " + std::to_string(line_no) + ": expected " +
                       std::to_string(expect.size()) + " columns, got " +
                       std::to_string(f.size()));
    }
    Row r;
    r.slot = parse_int(f[0], line_no, "slot");
    r.vehicle_id = parse_int(f[1], line_no, "vehicle_id");
    r.kind = f[2];
    r.lane = parse_int(f[3], line_no, "lane");
    r.x_m = parse_double(f[4], line_no, "x_m");
    r.speed_mps = parse_double(f[5], line_no, "speed_mps");
    r.requesting = parse_int(f[6], line_no, "requesting");
    r.w_shared = parse_int(f[7], line_no, "W_shared");
    r.w_t = parse_int(f[8], line_no, "W_T");
    r.w_r = parse_int(f[9], line_no, "W_R");
    r.pair_id = parse_int(f[10], line_no, "pair_id");
    r.role = f[11];
    if (r.kind != "cav" && r.kind != "hdv") {
      throw ParseError("trace line " + std::to_string(line_no) + ": kind must be cav|hdv");
    }
    if (!rows.empty() && r.slot < rows.back().slot) {
      throw ParseError("trace line " + std::to_string(line_no) +
                       ": slot index decreases (non-monotone time)");
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ParseError("trace file has no data rows");

  // First slot defines the vehicle set.
  EpisodeTrace trace;
  std::size_t i = 0;
  for (; i < rows.size() && rows[i].slot == rows[0].slot; ++i) {
    const Row& r = rows[i];
    Vehicle v;
    v.id = r.vehicle_id;
    v.kind = r.kind == "cav" ? VehicleKind::Cav : VehicleKind::Hdv;
    v.lane = r.lane;
    v.pair_id = r.pair_id;
    v.role = r.role == "tx" ? PairRole::Tx : r.role == "rx" ? PairRole::Rx : PairRole::None;
    if (v.id != static_cast<int>(trace.vehicles.size())) {
      throw ParseError("trace: vehicle ids must be dense and ordered from 0");
    }
    trace.vehicles.push_back(v);
  }
  const int n_vehicles = static_cast<int>(trace.vehicles.size());
  if (rows.size() % n_vehicles != 0) {
    throw ParseError("trace: row count is not a multiple of the vehicle count");
  }
  int n_pairs = 0;
  for (const auto& v : trace.vehicles) n_pairs = std::max(n_pairs, v.pair_id + 1);

  const std::size_t n_slots = rows.size() / n_vehicles;
  for (std::size_t s = 0; s < n_slots; ++s) {
    SlotRecord rec;
    rec.pairs.resize(n_pairs);
    rec.vehicles.resize(n_vehicles);
    rec.in_coverage.resize(n_vehicles);
    std::vector<double> tx_x(n_pairs, 0), rx_x(n_pairs, 0);
    std::vector<int> tx_lane(n_pairs, 0), rx_lane(n_pairs, 0);
    double head_x = -1e300;
    int requesting = 0;
    for (int v = 0; v < n_vehicles; ++v) {
      const Row& r = rows[s * n_vehicles + v];
      if (r.vehicle_id != v || r.slot != rows[s * n_vehicles].slot) {
        throw ParseError("trace: rows within a slot must list every vehicle once, in id order");
      }
      rec.vehicles[v] = {r.x_m, r.speed_mps, r.requesting != 0};
      rec.in_coverage[v] = coverage(r.x_m, cfg);
      head_x = std::max(head_x, r.x_m);
      if (trace.vehicles[v].kind == VehicleKind::Hdv) requesting += r.requesting != 0;
      if (r.pair_id >= n_pairs) {
        throw ParseError("trace line: pair_id " + std::to_string(r.pair_id) +
                         " not present in the first slot's vehicle set");
      }
      if (r.pair_id >= 0) {
        auto& ps = rec.pairs[r.pair_id];
        ps.shared_w = r.w_shared;
        ps.tx_w = r.w_t;
        ps.rx_w = r.w_r;
        if (trace.vehicles[v].role == PairRole::Tx) { tx_x[r.pair_id] = r.x_m; tx_lane[r.pair_id] = r.lane; }
        else { rx_x[r.pair_id] = r.x_m; rx_lane[r.pair_id] = r.lane; }
      }
    }
    for (int k = 0; k < n_pairs; ++k) {
      const double lat = cfg.lane_width_m * std::abs(rx_lane[k] - tx_lane[k]);
      const double d = std::hypot(rx_x[k] - tx_x[k], lat);
      if (d <= 0) {
        throw ParseError("trace slot " + std::to_string(s) + ": pair " + std::to_string(k) +
                         " has zero transmitter-receiver distance");
      }
      rec.pairs[k].distance_m = d;
    }
    rec.hdvs_requesting = requesting;
    rec.bandwidth_hz = cfg.total_bandwidth_hz - cfg.hdv_bandwidth_hz * requesting;
    rec.cluster_head_x_m = head_x;
    trace.slots.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace acp
