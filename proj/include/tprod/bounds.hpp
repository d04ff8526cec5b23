#pragma once

// Tail-bound evaluators: the Psi and Phi integrals, the Bernstein bounds for
// extreme T-eigenvalues and for Ky Fan norms of g(sum X_j), and the 1-D
// infimum search over the Laplace parameter t.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <nlohmann/json.hpp>

#include "tprod/errors.hpp"
#include "tprod/quadrature.hpp"
#include "tprod/random.hpp"
#include "tprod/spectral.hpp"

namespace tprod {

// ----------------------------------------------------------------------------
// Psi(m, gamma, c1, c2) = (3 m c1 c2 / 2) int_2^inf (y-2)^{1/2} exp[gamma y - c2 m (y-2)^{3/2}] dy
//
// With y = 2 + v^2 this is (3 c1 c / 2) e^{2 gamma} int_0^inf 2 v^2 exp(gamma v^2 - c v^3) dv,
// c = c2 m, a smooth integrand with a single peak. The integral is taken
// relative to the peak so the logarithm stays exact for large |gamma|.

inline constexpr double kPsiRelTol = 1e-12;

namespace detail {

// Positive root of 3c v^3 - 2 gamma v^2 - 2 = 0 (the integrand's log-peak).
inline double psi_peak(double gamma, double c) {
  auto f = [&](double v) { return (3.0 * c * v - 2.0 * gamma) * v * v - 2.0; };
  double lo = 0.0, hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline double log_psi(double m, double gamma, double c1, double c2) {
  if (!(m >= 1.0) || !(c1 > 0.0) || !(c2 > 0.0) || !std::isfinite(gamma))
    throw ParameterError("psi: need m >= 1, c1 > 0, c2 > 0 and finite gamma");
  const double c = c2 * m;
  const double vs = detail::psi_peak(gamma, c);
  const double phi_s = gamma * vs * vs - c * vs * vs * vs;
  // Integrand over its peak value as a function of d = v - vs. The peak
  // condition 2 gamma vs - 3 c vs^2 = -2 / vs removes the cancelling
  // large terms from the exponent.
  const double quad_coef = gamma - 3.0 * c * vs;
  auto rel = [&](double d) {
    if (d <= -vs) return 0.0;
    const double x = d / vs;
    return std::exp(2.0 * std::log1p(x) - 2.0 * x + d * d * quad_coef - c * d * d * d);
  };
  // curvature width at the peak and the right cut-off where the integrand drops below e^-80
  const double curv = 2.0 / (vs * vs) - 2.0 * quad_coef;
  const double width = 1.0 / std::sqrt(std::max(curv, 1e-300));
  double hi = width;
  while (rel(hi) > std::exp(-80.0)) hi *= 2.0;
  std::vector<double> breaks;
  for (int j = -8; j <= 8; ++j) {
    const double b = j * width;
    if (b > -vs && b < hi) breaks.push_back(b);
  }
  QuadratureSpec spec;
  spec.rel_tol = kPsiRelTol;
  spec.abs_tol = 0.0;
  spec.max_intervals = 4000;
  const QuadResult q = integrate(rel, -vs, hi, spec, breaks);
  if (!q.converged || !(q.value > 0.0)) throw NumericError("psi: quadrature did not converge");
  return 2.0 * gamma + std::log(1.5 * c1 * c) + std::log(2.0) + 2.0 * std::log(vs) + phi_s + std::log(q.value);
}

inline double psi(double m, double gamma, double c1, double c2) {
  const double lp = log_psi(m, gamma, c1, c2);
  if (lp > std::log(std::numeric_limits<double>::max())) throw NumericError("psi: value overflows; use log_psi");
  return std::exp(lp);
}

// ----------------------------------------------------------------------------
// Phi(m, d1, d2) = int_0^inf Pr-bound(y) dy with the bound equal to 1 on
// [0, 2] and min(1, d1 exp[-d2 m (y-2)^{3/2}]) above 2:
//   Phi = 2 + int_0^inf min(1, d1 e^{-c u^{3/2}}) du,  c = d2 m.
// Closed forms: d1 <= 1 gives 2 + d1 Gamma(5/3) c^{-2/3}; d1 > 1 splits at
// u0 = (log d1 / c)^{2/3} and uses the upper incomplete gamma function.

inline double phi(double m, double d1, double d2) {
  if (!(m >= 1.0) || !(d1 >= 0.0) || !(d2 > 0.0) || !std::isfinite(d1) || !std::isfinite(d2))
    throw ParameterError("phi: need m >= 1, d1 >= 0, d2 > 0");
  const double c = d2 * m;
  const double scale = std::pow(c, -2.0 / 3.0);
  if (d1 <= 1.0) return 2.0 + d1 * std::tgamma(5.0 / 3.0) * scale;
  const double ld = std::log(d1);
  const double u0 = std::pow(ld / c, 2.0 / 3.0);
  return 2.0 + u0 + d1 * (2.0 / 3.0) * scale * boost::math::tgamma(2.0 / 3.0, ld);
}

// ----------------------------------------------------------------------------
// 1-D infimum search

struct InfimumResult {
  double t_star = 0.0;
  double f_star = 0.0;
  bool boundary = false;  // t_star is an end of the domain
  std::size_t evaluations = 0;
};

inline constexpr std::size_t kInfimumGrid = 256;
inline constexpr double kInfimumRelTol = 1e-9;

// Coarse log-spaced grid on [lo, hi], then golden-section refinement inside
// the bracket around the best grid point. Non-finite values count as +inf.
inline InfimumResult infimum_over_t(const std::function<double(double)>& f, double lo, double hi) {
  if (!(lo > 0.0) || !(lo < hi) || !std::isfinite(hi)) throw ParameterError("infimum_over_t: need 0 < lo < hi < inf");
  InfimumResult r;
  auto eval = [&](double t) {
    ++r.evaluations;
    const double v = f(t);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  const std::size_t n = kInfimumGrid;
  std::vector<double> ts(n), fs(n);
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = i + 1 == n ? hi : lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
    fs[i] = eval(ts[i]);
  }
  const std::size_t best = static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
  if (!std::isfinite(fs[best])) throw NumericError("infimum_over_t: objective is not finite anywhere on the grid");
  r.t_star = ts[best];
  r.f_star = fs[best];

  double a = ts[best == 0 ? 0 : best - 1], b = ts[best + 1 == n ? n - 1 : best + 1];
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = eval(x1), f2 = eval(x2);
  while (b - a > kInfimumRelTol * 0.5 * (a + b)) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = eval(x2);
    }
  }
  for (const auto& [t, v] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
    if (v < r.f_star) {
      r.f_star = v;
      r.t_star = t;
    }
  }
  r.boundary = r.t_star == lo || r.t_star == hi;
  return r;
}

// ----------------------------------------------------------------------------
// Bernstein bounds

// Parameters. The summand count n_sum is kept apart from the block
// dimension m; the Hoelder weights are p_j = n_sum. a is the envelope
// (sigma_1(A^2) = a^2). [t_lo, t_hi] is the search range of the eigenvalue
// bounds; the Ky Fan bound searches its own feasible range.
struct TailBoundParams {
  std::size_t m = 4;
  std::size_t p = 1;
  std::size_t n_sum = 1;
  std::size_t k = 1;
  FnSpec g = FnSpec::polynomial({0.0, 1.0});
  Envelope env{};
  double c1 = 1.0, c2 = 1.0, d1 = 1.0, d2 = 1.0;
  double t_lo = 1e-6, t_hi = 50.0;

  void validate() const {
    if (m < 1 || p < 1 || n_sum < 1 || k < 1) throw ParameterError("TailBoundParams: m, p, n_sum, k must be >= 1");
    if (k > m * p) throw ParameterError("TailBoundParams: k exceeds m*p");
    if (g.kind() != FnSpec::Kind::polynomial || !g.has_nonnegative_coeffs())
      throw ParameterError("TailBoundParams: g must be a polynomial with nonnegative coefficients");
    env.validate();
    for (double v : {c1, c2, d1, d2})
      if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError("TailBoundParams: c1, c2, d1, d2 must be positive");
    if (!(t_lo > 0.0) || !(t_lo < t_hi) || !std::isfinite(t_hi)) throw ParameterError("TailBoundParams: need 0 < t_lo < t_hi");
  }
};

inline nlohmann::json to_json(const TailBoundParams& q) {
  return nlohmann::json{{"m", q.m},   {"p", q.p},   {"n_sum", q.n_sum}, {"k", q.k},
                        {"g", {{"coeffs", q.g.coeffs()}, {"power", q.g.outer_power()}}},
                        {"envelope", q.env.a}, {"c1", q.c1}, {"c2", q.c2}, {"d1", q.d1}, {"d2", q.d2}};
}

struct BoundResult {
  double bound = 0.0;
  double t_star = 0.0;
  double log_bound = 0.0;
  bool boundary = false;
};

enum class EigenSide { max, min };

// log of e^{-|theta| t} Psi(m, n_sum t). The min side is the max side of
// -sum X_j, which has the same law; Psi is only a bound on
// E exp(gamma lambda_1) for gamma >= 0, so the min side also uses +n_sum t.
inline double eigen_log_objective(const TailBoundParams& q, double theta, double t) {
  const double ns = static_cast<double>(q.n_sum);
  return -std::abs(theta) * t + log_psi(static_cast<double>(q.m), ns * t, q.c1, q.c2);
}

inline BoundResult eigen_bernstein_bound(const TailBoundParams& q, double theta, EigenSide side = EigenSide::max) {
  q.validate();
  if (side == EigenSide::max && !(theta > 0.0)) throw ParameterError("eigen_bernstein_bound: theta must be > 0 for the max side");
  if (side == EigenSide::min && !(theta < 0.0)) throw ParameterError("eigen_bernstein_bound: theta must be < 0 for the min side");
  const InfimumResult r = infimum_over_t([&](double t) { return eigen_log_objective(q, theta, t); }, q.t_lo, q.t_hi);
  return {std::exp(r.f_star), r.t_star, r.f_star, r.boundary};
}

// Largest feasible t for the Ky Fan bound: every 1 - n_sum l s t stays positive.
inline double kyfan_t_max(const TailBoundParams& q) {
  const std::size_t n = q.g.degree();
  if (n == 0) throw ParameterError("kyfan_bernstein_bound: g has degree 0, the t-domain is unbounded");
  return 1.0 / (static_cast<double>(q.n_sum) * static_cast<double>(n) * q.g.outer_power());
}

// log of (n+1)^{s-1} e^{-theta t} k {a0^s + sum_l a_l^{ls} [1 + x_l Phi + x_l^2 a^2 / (2 (1 - x_l))]},
// x_l = n_sum l s t; +inf outside the feasible domain.
inline double kyfan_log_objective(const TailBoundParams& q, double theta, double t, double phi_value) {
  const auto& a = q.g.coeffs();
  const double s = q.g.outer_power();
  const double n = static_cast<double>(q.g.degree());
  const double a2 = q.env.a * q.env.a;
  double bracket = std::pow(a[0], s);
  for (std::size_t l = 1; l < a.size(); ++l) {
    const double x = static_cast<double>(q.n_sum) * static_cast<double>(l) * s * t;
    if (!(x < 1.0)) return std::numeric_limits<double>::infinity();
    bracket += std::pow(a[l], static_cast<double>(l) * s) * (1.0 + x * phi_value + x * x * a2 / (2.0 * (1.0 - x)));
  }
  return (s - 1.0) * std::log(n + 1.0) - theta * t + std::log(static_cast<double>(q.k)) + std::log(bracket);
}

// Search range (t_max * 1e-8, t_max * (1 - 1e-9)) inside the open feasible interval.
inline constexpr double kKyFanLoFrac = 1e-8;
inline constexpr double kKyFanHiFrac = 1.0 - 1e-9;

inline BoundResult kyfan_bernstein_bound(const TailBoundParams& q, double theta) {
  q.validate();
  if (!(theta > 0.0)) throw ParameterError("kyfan_bernstein_bound: theta must be > 0");
  const double t_max = kyfan_t_max(q);
  const double ph = phi(static_cast<double>(q.m), q.d1, q.d2);
  const InfimumResult r = infimum_over_t([&](double t) { return kyfan_log_objective(q, theta, t, ph); },
                                         t_max * kKyFanLoFrac, t_max * kKyFanHiFrac);
  return {std::exp(r.f_star), r.t_star, r.f_star, r.boundary};
}

// Upper bound on E ||exp(theta X)||_(k) for one summand: k [1 + theta Phi + theta^2 a^2 / (2 (1 - theta))].
inline double kyfan_expectation_bound(double theta, const Envelope& env, double m, double d1, double d2, std::size_t k) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("kyfan_expectation_bound: theta must lie in (0, 1)");
  env.validate();
  return static_cast<double>(k) *
         (1.0 + theta * phi(m, d1, d2) + theta * theta * env.a * env.a / (2.0 * (1.0 - theta)));
}

}  // namespace tprod
