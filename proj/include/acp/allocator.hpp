#pragma once

#include <span>
#include <vector>

#include "acp/channel.hpp"
#include "acp/perception.hpp"
#include "acp/scenario.hpp"

namespace acp {

// Per-pair constants of the bandwidth-constraint form
//   h(f) = sum_k c_k / (b_k - h_hat / f_k) - 1 <= 0,  f_k > h_floor_k,
// where b is the per-object delay budget deadline/W, c the bandwidth cost
// w / (B * log2(1+SNR)), f0 the usable frequency ceiling min(f_zero_gain,
// f_max) and h_floor = h_hat/b the domain pole. h_hat is recoverable as
// h_floor * b.
struct PairCoefficients {
  double b = 0;        // seconds per object
  double c = 0;        // seconds
  double workload = 0; // shared objects W
  double f0 = 0;       // Hz
  double h_floor = 0;  // Hz
};

enum class AllocVerdict { Optimal, TightAtCap, Infeasible };

struct AllocationResult {
  AllocVerdict verdict = AllocVerdict::Infeasible;
  std::vector<double> f_star;       // Hz
  std::vector<double> beta_star;    // bandwidth fractions, sums to ~1 when solved
  std::vector<double> rate_star;    // bps
  std::vector<double> gain_star;    // J per pair
  std::vector<double> lambda_star;  // cap multipliers
  double gain_total = 0;            // J
  double nu_star = 0;               // bandwidth multiplier
  double h_residual = 0;            // h(f*) at termination
  int iterations = 0;               // outer bisection steps
};

struct SolverOptions {
  // Accept as soon as h lands in (stop_band_lo, 0]; anything in
  // (accept_band_lo, 0] still counts as solved if bisection exhausts the
  // interval first. stop_band_lo is well inside accept_band_lo so that the
  // duality gap at acceptance is far below measurement tolerances.
  double stop_band_lo = -1e-9;
  double accept_band_lo = -1e-4;
  double tight_tol = 1e-12;    // |h(f0)| below this means caps are exactly binding
  double root_rel_tol = 1e-10; // inner root bisection width, relative
  int max_iterations = 200;
};

// Throws DomainError on non-positive bandwidth or out-of-range workloads.
std::vector<PairCoefficients> build_coefficients(std::span<const PairSlotState> pairs,
                                                 double bandwidth_hz,
                                                 const DerivedCosts& costs,
                                                 const PerceptionParams& params,
                                                 const RadioParams& radio);

// Sum of bandwidth fractions minus one at the given frequencies. Throws
// DomainError if any frequency is at or below its pair's pole.
double constraint_h(std::span<const double> freqs,
                    std::span<const PairCoefficients> coeffs);

// Root of S(f, nu) = nu*c*h_hat/(b f - h_hat)^2 - 2 W f on f > h_floor;
// nu = 0 returns the pole itself (limit). Monotone increasing in nu.
double s_root(double nu, const PairCoefficients& coeff, double rel_tol = 1e-10);

double s_value(double freq, double nu, const PairCoefficients& coeff);

// Minimizes sum W_k f_k^2 subject to h(f) <= 0 and f <= f0 by bisecting the
// bandwidth multiplier nu; per-candidate frequencies are min(s_root(nu), f0).
// Infeasible and TightAtCap are verdicts, not exceptions. Throws SolverError
// only if the bisection cannot reach the acceptance band (indicates a bug).
AllocationResult solve(std::span<const PairCoefficients> coeffs,
                       const DerivedCosts& costs, const PerceptionParams& params,
                       const SolverOptions& opt = {});

// Convenience: build coefficients from pair states, then solve.
AllocationResult solve(std::span<const PairSlotState> pairs, double bandwidth_hz,
                       const DerivedCosts& costs, const PerceptionParams& params,
                       const RadioParams& radio, const SolverOptions& opt = {});

}  // namespace acp
