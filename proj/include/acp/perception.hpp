#pragma once

#include <string>

namespace acp {

// Per-object DNN cost constants. delta1..delta4 are the CPU cycle costs of
// feature extraction, feature fusion, fast inference, and full inference;
// rho / rho_tilde are the early-exit probabilities of the stand-alone and
// fusion inference paths; feature_bits is the compressed feature size per
// object sent over the V2V link.
struct DnnProfile {
  double delta1 = 4e6;
  double delta2 = 1e3;
  double delta3 = 3.1e5;
  double delta4 = 7.7e7;
  double rho = 0.3;
  double rho_tilde = 0.6;
  double feature_bits = 0.29e6;
};

// Aggregates derived from a DnnProfile. All in cycles except phi
// (dimensionless) and feature_bits (bits, copied through for convenience).
struct DerivedCosts {
  double delta = 0;              // mean per-object cycles, stand-alone path
  double delta_tilde = 0;        // mean per-object cycles, fusion path (both CPUs)
  double h_hat = 0;              // receiver-side fusion cycles per object
  double phi = 0;                // sqrt(2 delta^3 / (h_hat^2 delta_tilde))
  double savings_per_object = 0; // 2*delta - delta_tilde
  double feature_bits = 0;
};

struct PerceptionParams {
  double deadline_s = 0.1;   // per-slot classification deadline
  double f_max_hz = 8e9;     // CPU frequency ceiling
  double kappa = 1e-28;      // J per cycle per Hz^2
  double w_max_cont = 0;     // f_max * deadline / delta (real-valued workload cap)
};

PerceptionParams make_perception_params(double deadline_s, double f_max_hz,
                                        double kappa, const DerivedCosts& costs);

// Throws DomainError if any stage cost is non-positive, the probability
// ordering 0 < rho < rho_tilde < 1 fails, feature_bits <= 0, cooperation
// never saves cycles (2*delta <= delta_tilde), or phi <= 1.
// The soft expectation delta2 << min(delta3, delta4) is only warned about
// (stderr), never rejected.
DerivedCosts derive_costs(const DnnProfile& profile);

enum class PerceptionMode { StandAlone, Cooperative };

enum class WorkloadRegime { Low, High };

// Characteristic frequencies and minimum-rate thresholds for a shared
// workload W: f_default sustains W alone within the deadline, f_zero_gain is
// where the cooperative energy equals the stand-alone energy, f_cap is the
// usable ceiling min(f_zero_gain, f_max). The rates are the minimum link
// rates at which the deadline is met with the CPU at f_max / f_zero_gain /
// f_default respectively.
struct FrequencyThresholds {
  double f_default = 0;
  double f_zero_gain = 0;
  double f_cap = 0;
  WorkloadRegime regime = WorkloadRegime::Low;
  double rate_at_f_max = 0;
  double rate_at_zero_gain = 0;
  double rate_at_default = 0;
};

// Throws DomainError if W <= 0 or W exceeds params.w_max_cont.
FrequencyThresholds frequencies_and_thresholds(double shared_workload,
                                               const DerivedCosts& costs,
                                               const PerceptionParams& params);

// Energy saved by cooperating on W shared objects with the receiver CPU at
// freq_hz, relative to both vehicles processing them stand-alone at the
// default frequency. Negative when freq_hz > f_zero_gain.
double computing_gain(double shared_workload, double freq_hz,
                      const DerivedCosts& costs, const PerceptionParams& params);

// Frequency that exactly meets the deadline for W objects on one CPU.
double default_frequency(double workload, const DerivedCosts& costs,
                         const PerceptionParams& params);

// Total pair computing energy for one slot: shared objects at shared_freq
// (cooperative) or at the default frequency (stand-alone, both CPUs), plus
// the individual objects of each vehicle at tx_freq / rx_freq.
double pair_energy(double shared_w, double tx_w, double rx_w,
                   double shared_freq, double tx_freq, double rx_freq,
                   PerceptionMode mode, const DerivedCosts& costs,
                   const PerceptionParams& params);

// Convenience overload: individual frequencies at their defaults
// delta*W/deadline (zero when the workload is zero).
double pair_energy(double shared_w, double tx_w, double rx_w,
                   double shared_freq, PerceptionMode mode,
                   const DerivedCosts& costs, const PerceptionParams& params);

// Operating-point classification for a (rate, frequency) pair at workload W:
//   R1 deadline violated; R2 deadline met but f above the hardware ceiling;
//   R3 deadline met, f feasible but above the zero-gain point (scale-up
//      room, negative gain); R4 deadline met, f in (f_default, f_cap]
//      (positive-gain scale-down range); R5 f at or below f_default.
enum class Region { R1, R2, R3, R4, R5 };

Region classify_region(double rate_bps, double freq_hz, double shared_workload,
                       const DerivedCosts& costs, const PerceptionParams& params);

std::string to_string(Region r);

}  // namespace acp
