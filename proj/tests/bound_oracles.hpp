#pragma once

// Boost quadrature oracles for the bound integrals, evaluated in the original
// variables and independent of the library's closed forms.

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "tprod/bounds.hpp"

namespace tprod::testing {

// Psi by Boost exp-sinh quadrature in the original variable y in [2, inf).
inline double psi_oracle(double m, double gamma, double c1, double c2) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double y) {
    const double u = y - 2.0;
    if (u <= 0.0) return 0.0;
    return std::sqrt(u) * std::exp(gamma * y - c2 * m * u * std::sqrt(u));
  };
  return 1.5 * m * c1 * c2 * integrator.integrate(f, 2.0, std::numeric_limits<double>::infinity(), 1e-14);
}

// Phi by Boost quadrature of min(1, d1 exp(-d2 m u^{3/2})) in u = y - 2 over
// [0, inf), split at the crossover, plus the unit mass on y in [0, 2].
inline double phi_oracle(double m, double d1, double d2) {
  boost::math::quadrature::tanh_sinh<double> finite;
  boost::math::quadrature::exp_sinh<double> tail;
  auto bound = [&](double u) {
    u = std::max(u, 0.0);
    return std::min(1.0, d1 * std::exp(-d2 * m * u * std::sqrt(u)));
  };
  double total = finite.integrate([](double) { return 1.0; }, 0.0, 2.0);
  double split = 0.0;
  if (d1 > 1.0) {
    split = std::pow(std::log(d1) / (d2 * m), 2.0 / 3.0);
    total += finite.integrate(bound, 0.0, split, 1e-14);
  }
  return total + tail.integrate(bound, split, std::numeric_limits<double>::infinity(), 1e-14);
}

// Ky Fan objective straight from the formula, with Phi supplied by the caller.
inline double kyfan_objective_oracle(const TailBoundParams& q, double theta, double t, double phi_value) {
  const auto& a = q.g.coeffs();
  const double s = q.g.outer_power();
  const double n = static_cast<double>(a.size() - 1);
  double sum = std::pow(a[0], s);
  for (std::size_t l = 1; l < a.size(); ++l) {
    const double x = static_cast<double>(q.n_sum * l) * s * t;
    sum += std::pow(a[l], static_cast<double>(l) * s) *
           (1.0 + x * phi_value + x * x * q.env.a * q.env.a / (2.0 * (1.0 - x)));
  }
  return std::pow(n + 1.0, s - 1.0) * std::exp(-theta * t) * static_cast<double>(q.k) * sum;
}

// Brute force over a log-spaced grid of `points` values in [lo, hi].
template <typename F>
double grid_min(F&& f, double lo, double hi, std::size_t points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double t = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1));
    best = std::min(best, f(t));
  }
  return best;
}

}  // namespace tprod::testing
