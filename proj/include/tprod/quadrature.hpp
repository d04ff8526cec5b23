#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature with a global error queue, plus
// the interpolation weights beta_0 and beta_theta and their tail masses.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

#include "tprod/errors.hpp"

namespace tprod {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;        // estimated absolute error
  std::size_t evaluations = 0;
  bool converged = false;
};

struct QuadratureSpec {
  double rel_tol = 1e-9;
  double abs_tol = 1e-13;
  std::size_t max_intervals = 2000;
  double tail_mass = 1e-12;  // mass of the weight left outside [-T, T]
};

namespace detail {

// 15-point Kronrod nodes on [0, 1] (symmetric), with the embedded 7-point
// Gauss rule on the odd-indexed nodes.
inline constexpr double kKronrodX[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kKronrodW[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussW[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

template <typename F>
Interval gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kKronrodW[7];
  double gauss = fc * kGaussW[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodX[j];
    const double s = f(c - dx) + f(c + dx);
    kronrod += kKronrodW[j] * s;
    if (j % 2 == 1) gauss += kGaussW[j / 2] * s;
  }
  const double value = kronrod * h;
  double err = std::abs((kronrod - gauss) * h);
  // Guard against accidental agreement of the two rules.
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(value));
  return {a, b, value, err};
}

}  // namespace detail

// Integrate f over the finite interval [a, b] (optionally pre-split at the
// given interior points). Stops when err <= max(abs_tol, rel_tol*|value|).
template <typename F>
QuadResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}, std::vector<double> breaks = {}) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw ParameterError("integrate: need finite a < b");
  std::size_t evals = 0;
  auto counted = [&](double x) {
    ++evals;
    const double v = f(x);
    if (!std::isfinite(v)) throw NumericError("integrate: integrand is not finite");
    return v;
  };
  std::vector<double> points = {a};
  std::sort(breaks.begin(), breaks.end());
  for (double x : breaks)
    if (x > a && x < b) points.push_back(x);
  points.push_back(b);

  std::priority_queue<detail::Interval> queue;
  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const auto iv = detail::gk15(counted, points[i], points[i + 1]);
    total += iv.value;
    total_err += iv.error;
    queue.push(iv);
  }
  while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total)) && queue.size() < spec.max_intervals) {
    const auto worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      queue.push(worst);
      break;  // interval can no longer be split in floating point
    }
    const auto left = detail::gk15(counted, worst.a, mid);
    const auto right = detail::gk15(counted, mid, worst.b);
    queue.push(left);
    queue.push(right);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
  }
  // Exact re-summation in a fixed (interval) order for determinism.
  std::vector<detail::Interval> all;
  all.reserve(queue.size());
  while (!queue.empty()) {
    all.push_back(queue.top());
    queue.pop();
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  QuadResult r;
  for (const auto& iv : all) {
    r.value += iv.value;
    r.error += iv.error;
  }
  r.evaluations = evals;
  r.converged = r.error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(r.value));
  return r;
}

// Integrate over [a, inf) by mapping x = a + s / (1 - s), s in [0, 1).
template <typename F>
QuadResult integrate_to_infinity(F&& f, double a, const QuadratureSpec& spec = {}) {
  auto mapped = [&](double s) {
    const double one_minus = 1.0 - s;
    const double x = a + s / one_minus;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, spec);
}

// ----------------------------------------------------------------------------
// Interpolation weights

// beta_0(t) = pi / (2 (cosh(pi t) + 1)) = (pi/4) sech^2(pi t / 2).
inline double beta0(double t) {
  const double s = 1.0 / std::cosh(0.5 * std::numbers::pi * t);
  return 0.25 * std::numbers::pi * s * s;
}

// beta_theta(t) = sin(pi theta) / (2 theta (cosh(pi t) + cos(pi theta))),
// a probability density for theta in (0, 1); beta_theta -> beta_0 as theta -> 0.
inline double beta_theta(double t, double theta) {
  if (!(theta >= 0.0 && theta < 1.0)) throw ParameterError("beta_theta: theta must lie in [0, 1)");
  if (theta == 0.0) return beta0(t);
  const double pt = std::numbers::pi * theta;
  const double ch = std::cosh(std::numbers::pi * t);
  if (!std::isfinite(ch)) return 0.0;
  return std::sin(pt) / (2.0 * theta * (ch + std::cos(pt)));
}

// Mass of beta_0 outside [-T, T]: 1 - tanh(pi T / 2), exact.
inline double beta0_tail_mass(double T) { return 2.0 / (std::exp(std::numbers::pi * T) + 1.0); }

// Upper bound on the mass of beta_theta outside [-T, T], valid for
// e^{pi T} >= 4: (4/pi) (sin(pi theta)/theta) e^{-pi T}.
inline double beta_theta_tail_bound(double T, double theta) {
  if (theta == 0.0) return beta0_tail_mass(T);
  if (std::exp(std::numbers::pi * T) < 4.0) return 1.0;
  return 4.0 / std::numbers::pi * std::sin(std::numbers::pi * theta) / theta * std::exp(-std::numbers::pi * T);
}

// Smallest half-width T (to 1e-3) whose tail mass is <= target.
inline double truncation_point(double theta, double target) {
  if (!(target > 0.0 && target < 1.0)) throw ParameterError("truncation_point: target must lie in (0, 1)");
  double T = 1.0;
  while (beta_theta_tail_bound(T, theta) > target) T *= 1.5;
  double lo = T / 1.5, hi = T;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (beta_theta_tail_bound(mid, theta) > target ? lo : hi) = mid;
  }
  return hi;
}

struct WeightedIntegral {
  QuadResult quad;
  double half_width = 0.0;
  double tail_mass = 0.0;
};

// Integrate h(t) beta_theta(t) over [-T, T] with T from spec.tail_mass.
// The truncation error is at most tail_mass * sup|h| (callers supply sup|h|).
template <typename H>
WeightedIntegral integrate_beta(H&& h, double theta, const QuadratureSpec& spec = {}) {
  const double T = truncation_point(theta, spec.tail_mass);
  auto integrand = [&](double t) {
    const double w = beta_theta(t, theta);
    return w == 0.0 ? 0.0 : h(t) * w;
  };
  std::vector<double> breaks;
  for (double x = -T + 1.0; x < T; x += 1.0) breaks.push_back(x);
  WeightedIntegral out;
  out.quad = integrate(integrand, -T, T, spec, breaks);
  out.half_width = T;
  out.tail_mass = beta_theta_tail_bound(T, theta);
  return out;
}

}  // namespace tprod
