#include "acp/perception.hpp"

#include <cmath>
#include <iostream>

#include "acp/errors.hpp"

namespace acp {

PerceptionParams make_perception_params(double deadline_s, double f_max_hz,
                                        double kappa, const DerivedCosts& costs) {
  if (deadline_s <= 0 || f_max_hz <= 0 || kappa <= 0) {
    throw DomainError("perception params must be positive");
  }
  PerceptionParams p;
  p.deadline_s = deadline_s;
  p.f_max_hz = f_max_hz;
  p.kappa = kappa;
  p.w_max_cont = f_max_hz * deadline_s / costs.delta;
  return p;
}

DerivedCosts derive_costs(const DnnProfile& profile) {
  if (profile.delta1 <= 0 || profile.delta2 <= 0 || profile.delta3 <= 0 ||
      profile.delta4 <= 0) {
    throw DomainError("degenerate profile: stage costs must be positive");
  }
  if (!(profile.rho > 0 && profile.rho < profile.rho_tilde && profile.rho_tilde < 1)) {
    throw DomainError("degenerate profile: need 0 < rho < rho_tilde < 1");
  }
  if (profile.feature_bits <= 0) {
    throw DomainError("degenerate profile: feature size must be positive");
  }
  if (profile.delta2 * 10 > std::min(profile.delta3, profile.delta4)) {
    std::cerr << "warning: fusion cost delta2 is not small against inference costs\n";
  }

  DerivedCosts c;
  c.delta = profile.delta1 + profile.delta3 + (1 - profile.rho) * profile.delta4;
  c.delta_tilde = 2 * profile.delta1 + profile.delta2 + profile.delta3 +
                  (1 - profile.rho_tilde) * profile.delta4;
  c.h_hat = profile.delta1 + profile.delta2 + profile.delta3 +
            (1 - profile.rho_tilde) * profile.delta4;
  c.savings_per_object = 2 * c.delta - c.delta_tilde;
  c.feature_bits = profile.feature_bits;
  if (c.savings_per_object <= 0) {
    throw DomainError("cooperation never reduces computing demand (2*delta <= delta_tilde)");
  }
  c.phi = std::sqrt(2 * c.delta * c.delta * c.delta /
                    (c.h_hat * c.h_hat * c.delta_tilde));
  if (c.phi <= 1) {
    throw DomainError("rate constant phi must exceed 1");
  }
  return c;
}

double default_frequency(double workload, const DerivedCosts& costs,
                         const PerceptionParams& params) {
  return costs.delta * workload / params.deadline_s;
}

FrequencyThresholds frequencies_and_thresholds(double shared_workload,
                                               const DerivedCosts& costs,
                                               const PerceptionParams& params) {
  if (shared_workload <= 0) throw DomainError("workload must be positive");
  if (shared_workload > params.w_max_cont) {
    throw DomainError("workload exceeds cap: even the maximum CPU frequency misses the deadline");
  }
  FrequencyThresholds t;
  t.f_default = default_frequency(shared_workload, costs, params);
  t.f_zero_gain = std::sqrt(2 * costs.delta / costs.delta_tilde) * t.f_default;
  t.f_cap = std::min(t.f_zero_gain, params.f_max_hz);
  const double boundary =
      std::sqrt(costs.delta_tilde / (2 * costs.delta)) * params.w_max_cont;
  t.regime = shared_workload <= boundary ? WorkloadRegime::Low : WorkloadRegime::High;

  const double b = params.deadline_s / shared_workload;  // per-object delay budget
  t.rate_at_f_max = costs.feature_bits / (b - costs.h_hat / params.f_max_hz);
  t.rate_at_zero_gain =
      shared_workload * costs.feature_bits * costs.phi / ((costs.phi - 1) * params.deadline_s);
  t.rate_at_default = costs.feature_bits / (b - costs.h_hat / t.f_default);
  return t;
}

double computing_gain(double shared_workload, double freq_hz,
                      const DerivedCosts& costs, const PerceptionParams& params) {
  if (shared_workload <= 0 || freq_hz <= 0) {
    throw DomainError("computing_gain needs positive workload and frequency");
  }
  const double f_d = default_frequency(shared_workload, costs, params);
  return 2 * params.kappa * costs.delta * f_d * f_d * shared_workload -
         params.kappa * costs.delta_tilde * freq_hz * freq_hz * shared_workload;
}

double pair_energy(double shared_w, double tx_w, double rx_w,
                   double shared_freq, double tx_freq, double rx_freq,
                   PerceptionMode mode, const DerivedCosts& costs,
                   const PerceptionParams& params) {
  if (shared_w < 0 || tx_w < 0 || rx_w < 0) {
    throw DomainError("workloads must be non-negative");
  }
  if ((shared_w > 0 && mode == PerceptionMode::Cooperative && shared_freq <= 0) ||
      (tx_w > 0 && tx_freq <= 0) || (rx_w > 0 && rx_freq <= 0)) {
    throw DomainError("frequency must be positive where workload is positive");
  }
  const double k = params.kappa;
  double shared_term = 0;
  if (shared_w > 0) {
    if (mode == PerceptionMode::Cooperative) {
      shared_term = k * costs.delta_tilde * shared_w * shared_freq * shared_freq;
    } else {
      const double f_d = default_frequency(shared_w, costs, params);
      shared_term = 2 * k * costs.delta * shared_w * f_d * f_d;
    }
  }
  const double tx_term = tx_w > 0 ? k * costs.delta * tx_w * tx_freq * tx_freq : 0.0;
  const double rx_term = rx_w > 0 ? k * costs.delta * rx_w * rx_freq * rx_freq : 0.0;
  return shared_term + tx_term + rx_term;
}

double pair_energy(double shared_w, double tx_w, double rx_w,
                   double shared_freq, PerceptionMode mode,
                   const DerivedCosts& costs, const PerceptionParams& params) {
  const double f_t = tx_w > 0 ? default_frequency(tx_w, costs, params) : 0.0;
  const double f_r = rx_w > 0 ? default_frequency(rx_w, costs, params) : 0.0;
  return pair_energy(shared_w, tx_w, rx_w, shared_freq, f_t, f_r, mode, costs, params);
}

Region classify_region(double rate_bps, double freq_hz, double shared_workload,
                       const DerivedCosts& costs, const PerceptionParams& params) {
  if (rate_bps <= 0 || freq_hz <= 0) {
    throw DomainError("classify_region needs positive rate and frequency");
  }
  const auto t = frequencies_and_thresholds(shared_workload, costs, params);
  const double budget = params.deadline_s / shared_workload;
  const double delay = costs.feature_bits / rate_bps + costs.h_hat / freq_hz;
  if (delay > budget) return Region::R1;
  if (freq_hz > params.f_max_hz) return Region::R2;
  if (freq_hz > t.f_zero_gain) return Region::R3;  // only reachable in the Low regime
  if (freq_hz > t.f_default) return Region::R4;
  return Region::R5;
}

std::string to_string(Region r) {
  switch (r) {
    case Region::R1: return "R1";
    case Region::R2: return "R2";
    case Region::R3: return "R3";
    case Region::R4: return "R4";
    case Region::R5: return "R5";
  }
  return "?";
}

}  // namespace acp
