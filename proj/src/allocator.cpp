#include "acp/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "acp/errors.hpp"

namespace acp {

std::vector<PairCoefficients> build_coefficients(std::span<const PairSlotState> pairs,
                                                 double bandwidth_hz,
                                                 const DerivedCosts& costs,
                                                 const PerceptionParams& params,
                                                 const RadioParams& radio) {
  if (bandwidth_hz <= 0) throw DomainError("allocator: bandwidth must be positive");
  std::vector<PairCoefficients> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.shared_w <= 0 || p.shared_w > params.w_max_cont) {
      throw DomainError("allocator: shared workload " + std::to_string(p.shared_w) +
                        " outside (0, W_max]");
    }
    const auto link = make_link(p.distance_m, radio);
    const double full_rate = link_rate(1.0, bandwidth_hz, link, radio);
    const auto thr = frequencies_and_thresholds(p.shared_w, costs, params);
    PairCoefficients c;
    c.b = params.deadline_s / p.shared_w;
    c.c = costs.feature_bits / full_rate;
    c.workload = p.shared_w;
    c.f0 = thr.f_cap;
    c.h_floor = costs.h_hat / c.b;
    out.push_back(c);
  }
  return out;
}

double constraint_h(std::span<const double> freqs,
                    std::span<const PairCoefficients> coeffs) {
  if (freqs.size() != coeffs.size()) {
    throw DomainError("constraint_h: frequency/coefficient length mismatch");
  }
  double sum = -1.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const auto& c = coeffs[k];
    if (freqs[k] <= c.h_floor) {
      throw DomainError("constraint_h: frequency at or below the domain pole for pair " +
                        std::to_string(k));
    }
    const double h_hat = c.h_floor * c.b;
    sum += c.c / (c.b - h_hat / freqs[k]);
  }
  return sum;
}

double s_value(double freq, double nu, const PairCoefficients& coeff) {
  const double h_hat = coeff.h_floor * coeff.b;
  const double d = coeff.b * freq - h_hat;
  return nu * coeff.c * h_hat / (d * d) - 2.0 * coeff.workload * freq;
}

double s_root(double nu, const PairCoefficients& coeff, double rel_tol) {
  if (nu < 0) throw DomainError("s_root: nu must be non-negative");
  if (nu == 0) return coeff.h_floor;
  double lo = coeff.h_floor * (1.0 + 1e-12);
  if (s_value(lo, nu, coeff) <= 0) return lo;  // root is numerically at the pole
  double hi = std::max(2.0 * coeff.h_floor, lo * 2.0);
  for (int i = 0; i < 2048 && s_value(hi, nu, coeff) > 0; ++i) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (s_value(mid, nu, coeff) > 0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// Smallest nu at which pair k's unconstrained root reaches its cap:
// S(f0, nu) = 0  =>  nu = 2 W f0 (b f0 - h_hat)^2 / (c h_hat).
double nu_at_cap(const PairCoefficients& c) {
  const double h_hat = c.h_floor * c.b;
  const double d = c.b * c.f0 - h_hat;
  return 2.0 * c.workload * c.f0 * d * d / (c.c * h_hat);
}

void fill_solution(AllocationResult& r, std::span<const PairCoefficients> coeffs,
                   const DerivedCosts& costs, const PerceptionParams& params) {
  const std::size_t n = coeffs.size();
  r.beta_star.resize(n);
  r.rate_star.resize(n);
  r.gain_star.resize(n);
  r.lambda_star.resize(n);
  r.gain_total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& c = coeffs[k];
    const double h_hat = c.h_floor * c.b;
    const double slack = c.b - h_hat / r.f_star[k];
    r.beta_star[k] = c.c / slack;
    r.rate_star[k] = costs.feature_bits / slack;
    r.gain_star[k] = computing_gain(c.workload, r.f_star[k], costs, params);
    // The cap multiplier is nonzero only where the cap binds; off the cap the
    // inner root solve already drove S to zero, so reporting its residual
    // would present solver noise as a multiplier.
    const bool at_cap = r.f_star[k] >= c.f0 * (1.0 - 1e-12);
    r.lambda_star[k] = at_cap ? std::max(0.0, s_value(r.f_star[k], r.nu_star, c)) : 0.0;
    r.gain_total += r.gain_star[k];
  }
}

}  // namespace

AllocationResult solve(std::span<const PairCoefficients> coeffs,
                       const DerivedCosts& costs, const PerceptionParams& params,
                       const SolverOptions& opt) {
  if (coeffs.empty()) {
    throw DomainError("solve: empty pair set (callers handle the no-cooperation case)");
  }
  const std::size_t n = coeffs.size();
  AllocationResult res;
  res.f_star.assign(n, 0.0);

  std::vector<double> f_cap(n);
  for (std::size_t k = 0; k < n; ++k) {
    f_cap[k] = coeffs[k].f0;
    if (!(coeffs[k].f0 > coeffs[k].h_floor)) {
      // No frequency in the domain can serve this pair: the constraint
      // cannot be met no matter what the others do.
      res.verdict = AllocVerdict::Infeasible;
      res.h_residual = std::numeric_limits<double>::infinity();
      return res;
    }
  }

  const double h0 = constraint_h(f_cap, coeffs);
  if (std::abs(h0) <= opt.tight_tol) {
    res.verdict = AllocVerdict::TightAtCap;
    res.f_star = f_cap;
    res.h_residual = h0;
    res.nu_star = 0;
    for (const auto& c : coeffs) res.nu_star = std::max(res.nu_star, nu_at_cap(c));
    fill_solution(res, coeffs, costs, params);
    return res;
  }
  if (h0 > 0) {
    res.verdict = AllocVerdict::Infeasible;
    res.h_residual = h0;
    return res;
  }

  // h(f0) < 0: strong duality holds; bisect the bandwidth multiplier.
  // Invariant: h(candidate(nu_lo)) > 0 >= h(candidate(nu_hi)).
  double nu_lo = 0;
  double nu_hi = 0;
  for (const auto& c : coeffs) nu_hi = std::max(nu_hi, nu_at_cap(c));

  std::vector<double> f_hat(n);
  std::vector<double> best_f;
  double best_h = -std::numeric_limits<double>::infinity();
  double best_nu = nu_hi;
  int used = 0;

  for (int it = 1; it <= opt.max_iterations; ++it) {
    const double nu = 0.5 * (nu_lo + nu_hi);
    for (std::size_t k = 0; k < n; ++k) {
      f_hat[k] = std::min(s_root(nu, coeffs[k], opt.root_rel_tol), coeffs[k].f0);
    }
    const double h = constraint_h(f_hat, coeffs);
    used = it;
    if (h > 0) {
      nu_lo = nu;
    } else {
      nu_hi = nu;
      if (h > best_h) {
        best_h = h;
        best_nu = nu;
        best_f = f_hat;
      }
      if (h > opt.stop_band_lo) break;
    }
    if (nu_hi - nu_lo <= 1e-16 * nu_hi) break;
  }

  if (best_f.empty() || best_h <= opt.accept_band_lo) {
    throw SolverError("dual bisection stalled: best h(f) = " + std::to_string(best_h) +
                      " after " + std::to_string(used) + " iterations");
  }
  res.verdict = AllocVerdict::Optimal;
  res.f_star = std::move(best_f);
  res.nu_star = best_nu;
  res.h_residual = best_h;
  res.iterations = used;
  fill_solution(res, coeffs, costs, params);
  return res;
}

AllocationResult solve(std::span<const PairSlotState> pairs, double bandwidth_hz,
                       const DerivedCosts& costs, const PerceptionParams& params,
                       const RadioParams& radio, const SolverOptions& opt) {
  const auto coeffs = build_coefficients(pairs, bandwidth_hz, costs, params, radio);
  return solve(coeffs, costs, params, opt);
}

}  // namespace acp
