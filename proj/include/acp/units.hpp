#pragma once

#include <cmath>

// Unit conversions used throughout. All internal math is SI: Hz, bps,
// seconds, meters, Joules, Watts. dBm/MHz/GHz appear only at boundaries
// (config, CSV, CLI).

namespace acp::units {

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt / 1e-3); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double mhz_to_hz(double mhz) { return mhz * 1e6; }

inline double hz_to_mhz(double hz) { return hz * 1e-6; }

inline double ghz_to_hz(double ghz) { return ghz * 1e9; }

// log2 computed as a natural-log ratio.
inline double log2_ratio(double x) { return std::log(x) / std::log(2.0); }

}  // namespace acp::units
