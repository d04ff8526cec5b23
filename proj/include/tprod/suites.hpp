#pragma once

// Randomized verification suites over the inequality checkers. Instance i of
// a suite draws from derive_seed(seed, suite stream, i) and reports merge in
// instance order, so results do not depend on the thread count.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tprod/check_report.hpp"
#include "tprod/errors.hpp"
#include "tprod/ineq.hpp"
#include "tprod/norms.hpp"
#include "tprod/parallel.hpp"
#include "tprod/rng.hpp"
#include "tprod/tensor.hpp"

namespace tprod {

namespace gen {

inline TTensor random_tensor(CounterRng& rng, std::size_t m, std::size_t n, std::size_t p, Field field = Field::real) {
  return TTensor::generate(m, n, p, field, [&](std::size_t, std::size_t, std::size_t) {
    const double re = rng.normal();
    return Complex(re, field == Field::complex ? rng.normal() : 0.0);
  });
}

// (G + G^T) / 2 with the slice-reversing transpose: real and symmetric.
inline TTensor random_symmetric(CounterRng& rng, std::size_t m, std::size_t p) {
  const TTensor g = random_tensor(rng, m, m, p);
  return TTensor::generate(m, m, p, Field::real, [&](std::size_t i, std::size_t j, std::size_t k) {
    return 0.5 * (g(i, j, k) + g(j, i, (p - k) % p));
  });
}

// G^T * G scaled to spectral norm 1, plus `shift` I: T-eigenvalues in
// [shift, 1 + shift].
inline TTensor random_tpd(CounterRng& rng, std::size_t m, std::size_t p, double shift = 0.1) {
  const TTensor g = random_tensor(rng, m, m, p);
  const TTensor gg = tprod(transpose(g), g);
  const double top = gauge_norm(gg, GaugeSpec::spectral());
  return (1.0 / std::max(top, 1e-300)) * gg + shift * identity(m, p);
}

// f-diagonal real symmetric tensor; any two of them commute.
inline TTensor fdiag_symmetric(CounterRng& rng, std::size_t m, std::size_t p) {
  std::vector<std::vector<double>> c(m, std::vector<double>(p));
  for (auto& row : c)
    for (std::size_t k = 0; 2 * k <= p; ++k) row[k] = row[(p - k) % p] = rng.normal();
  return TTensor::generate(m, m, p, Field::real, [&](std::size_t i, std::size_t j, std::size_t k) { return i == j ? c[i][k] : 0.0; });
}

inline TTensor unit_spectral(const TTensor& t) {
  const double n = gauge_norm(t, GaugeSpec::spectral());
  return n > 0.0 ? (1.0 / n) * t : t;
}

// Positive weights summing to 1 exactly (the last takes the remainder).
inline std::vector<double> random_weights(CounterRng& rng, std::size_t n) {
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& a : w) s += (a = rng.uniform(0.2, 1.0));
  double rest = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) rest -= (w[i] /= s);
  w.back() = rest;
  return w;
}

inline std::size_t pick(CounterRng& rng, std::size_t lo, std::size_t hi) {
  return static_cast<std::size_t>(rng.uniform_int(static_cast<int>(lo), static_cast<int>(hi)));
}

inline std::vector<std::size_t> random_block_dims(CounterRng& rng, std::size_t m, std::size_t p) {
  std::vector<std::size_t> k(p);
  for (auto& a : k) a = pick(rng, 1, m);
  return k;
}

}  // namespace gen

// ----------------------------------------------------------------------------

struct SuiteOptions {
  std::uint64_t seed = 0;
  std::size_t trials = 100;  // random instances per suite
  unsigned threads = 0;
  double tol = kIneqTol;
};

using SuiteInstance = std::function<CheckReport(CounterRng&, std::size_t index, const SuiteOptions&)>;

struct SuiteDef {
  const char* name;
  std::uint64_t stream;
  const char* summary;
  SuiteInstance instance;
};

namespace detail {

inline CheckReport courant_fischer_instance(CounterRng& rng, std::size_t, const SuiteOptions& o) {
  const std::size_t m = gen::pick(rng, 1, 5), p = gen::pick(rng, 1, 5);
  const TTensor c = gen::random_symmetric(rng, m, p);
  return check_courant_fischer(c, gen::random_block_dims(rng, m, p), 20, rng(), o.tol);
}

inline CheckReport extreme_sum_instance(CounterRng& rng, std::size_t, const SuiteOptions& o) {
  const std::size_t m = gen::pick(rng, 1, 5), p = gen::pick(rng, 1, 5);
  const TTensor c = gen::random_symmetric(rng, m, p);
  return check_extreme_sum_rep(c, gen::random_block_dims(rng, m, p), 10, rng(), o.tol);
}

inline CheckReport sv_major_instance(CounterRng& rng, std::size_t i, const SuiteOptions& o) {
  const std::size_t m = gen::pick(rng, 1, 5), p = gen::pick(rng, 1, 5);
  const Field f = i % 2 ? Field::complex : Field::real;
  return check_sv_majorization(gen::random_tensor(rng, m, m, p, f), gen::random_tensor(rng, m, m, p, f), o.tol);
}

inline CheckReport kyfan_prod_instance(CounterRng& rng, std::size_t, const SuiteOptions& o) {
  const std::size_t n = gen::pick(rng, 2, 3), m = gen::pick(rng, 1, 4), p = gen::pick(rng, 1, 4);
  std::vector<TTensor> cs;
  for (std::size_t j = 0; j < n; ++j) cs.push_back(gen::random_tensor(rng, m, m, p));
  // conjugate exponents p_j = 1 / w_j; the last is fixed so the 1/p_j sum to 1
  const std::vector<double> w = gen::random_weights(rng, n);
  std::vector<double> e(n);
  double rest = 1.0;
  for (std::size_t j = 0; j + 1 < n; ++j) rest -= 1.0 / (e[j] = 1.0 / w[j]);
  e.back() = 1.0 / rest;
  const double s = rng.uniform(1.0, 3.0);
  return check_kyfan_product(cs, e, s, gen::pick(rng, 1, m * p), o.tol);
}

inline CheckReport kyfan_sum_instance(CounterRng& rng, std::size_t i, const SuiteOptions& o) {
  const std::size_t n = gen::pick(rng, 2, 4), m = gen::pick(rng, 1, 4), p = gen::pick(rng, 1, 4);
  std::vector<TTensor> cs;
  for (std::size_t j = 0; j < n; ++j) cs.push_back(gen::random_tensor(rng, m, m, p, i % 2 ? Field::complex : Field::real));
  const double s = i % 3 == 0 ? 1.0 : rng.uniform(1.0, 3.0);
  return check_kyfan_sum(cs, s, gen::pick(rng, 1, m * p), o.tol);
}

inline std::vector<unsigned long long> trotter_ladder() {
  std::vector<unsigned long long> steps;
  for (unsigned long long q = 8; q <= 16384; q *= 2) steps.push_back(q);
  return steps;
}

// Every fifth instance uses commuting (f-diagonal) inputs.
inline CheckReport lie_trotter_instance(CounterRng& rng, std::size_t i, const SuiteOptions& o) {
  const std::size_t n = gen::pick(rng, 2, 3), m = gen::pick(rng, 2, 3), p = gen::pick(rng, 1, 3);
  std::vector<TTensor> ls;
  if (i % 5 == 4) {
    for (std::size_t j = 0; j < n; ++j) ls.push_back(gen::unit_spectral(gen::fdiag_symmetric(rng, m, p)));
    static const std::vector<unsigned long long> short_ladder{8, 16, 32, 64};
    return check_lie_trotter(ls, short_ladder, GaugeSpec::spectral(), o.tol);
  }
  for (std::size_t j = 0; j < n; ++j) ls.push_back(gen::unit_spectral(gen::random_symmetric(rng, m, p)));
  static const std::vector<unsigned long long> ladder = trotter_ladder();
  return check_lie_trotter(ls, ladder, GaugeSpec::spectral(), o.tol);
}

inline CheckReport multivariate_instance(CounterRng& rng, std::size_t i, const SuiteOptions& o) {
  const std::size_t n = 2 + i % 2, m = gen::pick(rng, 2, 4), p = gen::pick(rng, 1, 3);
  std::vector<TTensor> cs;
  for (std::size_t j = 0; j < n; ++j) cs.push_back(gen::random_tpd(rng, m, p));
  static const double thetas[] = {0.0, 0.25, 0.5, 0.75};
  static const FnSpec fs[] = {FnSpec::power(2.0), FnSpec::exp(0.5), FnSpec::power(0.5)};
  static const FnSpec gs[] = {FnSpec::exp(0.1), FnSpec::power(1.0), FnSpec::power(3.0)};
  MultivariateOptions opt;
  opt.theta = thetas[i % 4];
  opt.tol = o.tol;
  return check_multivariate_norm_ineq(cs, fs[i % 3], gs[(i / 3) % 3], GaugeSpec::ky_fan(gen::pick(rng, 1, m * p)), opt);
}

inline DiscreteMeasure random_measure(CounterRng& rng, std::size_t m, std::size_t p, bool tpd) {
  const std::size_t atoms = gen::pick(rng, 1, 4);
  std::vector<TTensor> d;
  for (std::size_t j = 0; j < atoms; ++j) d.push_back(tpd ? gen::random_tpd(rng, m, p) : gen::random_symmetric(rng, m, p));
  return DiscreteMeasure(gen::random_weights(rng, atoms), std::move(d));
}

inline GaugeSpec random_gauge(CounterRng& rng, std::size_t n) {
  switch (gen::pick(rng, 0, 3)) {
    case 0: return GaugeSpec::ky_fan(gen::pick(rng, 1, n));
    case 1: return GaugeSpec::schatten(rng.uniform(1.0, 4.0));
    case 2: return GaugeSpec::spectral();
    default: return GaugeSpec::trace_norm();
  }
}

// Even instances: arithmetic mode over convex f. Odd: log mode over
// log f(e^x)-convex f. Every third uses a weak premise with nondecreasing f.
inline CheckReport integral_major_instance(CounterRng& rng, std::size_t i, const SuiteOptions& o) {
  const std::size_t m = gen::pick(rng, 1, 3), p = gen::pick(rng, 1, 3);
  const bool log_mode = i % 2 == 1;
  const bool weak = i % 3 == 2;
  const DiscreteMeasure mu = random_measure(rng, m, p, log_mode);
  const AverageMode mode = log_mode ? AverageMode::log : AverageMode::arith;
  const TTensor c = build_transfer_premise(mu, mode, weak ? rng.uniform(0.01, 0.5) : 0.0);
  std::vector<FnSpec> family;
  if (log_mode) {
    family = {FnSpec::exp(0.5), FnSpec::shifted_relu(0.3), FnSpec::power(2.0), FnSpec::power(0.5)};
    if (!weak) family.push_back(FnSpec::power(-1.0));
  } else {
    family = {FnSpec::exp(0.5), FnSpec::shifted_relu(0.3)};
    if (!weak) {
      family.push_back(FnSpec::exp(-0.5));
      family.push_back(FnSpec::power(2.0));
    }
  }
  return check_integral_majorization_transfer(c, mu, mode, family, random_gauge(rng, m * p), o.tol);
}

inline CheckReport antisym_instance(CounterRng& rng, std::size_t i, const SuiteOptions& o) {
  const std::size_t m = gen::pick(rng, 1, 4), p = gen::pick(rng, 1, 4);
  const TTensor e = gen::random_tensor(rng, m, m, p, i % 2 ? Field::complex : Field::real);
  return check_antisym_product_identity(e, gen::pick(rng, 1, m * p), o.tol);
}

inline CheckReport holder_instance(CounterRng& rng, std::size_t, const SuiteOptions& o) {
  const std::size_t n = gen::pick(rng, 2, 4), len = gen::pick(rng, 1, 12);
  std::vector<std::vector<double>> vs(n, std::vector<double>(len));
  for (auto& v : vs)
    for (auto& x : v) x = std::abs(rng.normal()) * rng.uniform(0.1, 3.0);
  const std::vector<double> w = gen::random_weights(rng, n);
  return holder_gauge_check(vs, w, random_gauge(rng, len), o.tol);
}

}  // namespace detail

inline const std::vector<SuiteDef>& suite_registry() {
  static const std::vector<SuiteDef> suites = {
      {"courant-fischer", 0xC0F1, "Courant-Fischer characterization of tilde-k T-eigenvalues", detail::courant_fischer_instance},
      {"extreme-sum", 0xE5A1, "extreme sums of T-eigenvalues over isometries", detail::extreme_sum_instance},
      {"sv-major", 0x5B3A, "T-singular values of a sum weakly majorized by the sum", detail::sv_major_instance},
      {"kyfan-prod", 0xCF01, "Ky Fan norm of products: Holder and Young bounds", detail::kyfan_prod_instance},
      {"kyfan-sum", 0xCF02, "Ky Fan norm of sums of powers", detail::kyfan_sum_instance},
      {"lie-trotter", 0x1770, "Lie-Trotter product formula, first-order convergence", detail::lie_trotter_instance},
      {"multivariate", 0x3B70, "multivariate gauge-norm inequalities (log-average and average forms)", detail::multivariate_instance},
      {"integral-major", 0x1A7E, "majorization transfer through integral averages", detail::integral_major_instance},
      {"antisym", 0xA471, "products of top-k T-singular values against bcirc", detail::antisym_instance},
      {"holder", 0x401D, "Holder inequality for symmetric gauge functions", detail::holder_instance},
  };
  return suites;
}

inline const SuiteDef& find_suite(const std::string& name) {
  for (const auto& s : suite_registry())
    if (name == s.name) return s;
  std::string known;
  for (const auto& s : suite_registry()) known += std::string(known.empty() ? "" : ", ") + s.name;
  throw ParameterError("unknown suite '" + name + "' (known: " + known + ", all)");
}

inline CheckReport run_suite(const SuiteDef& suite, const SuiteOptions& opt) {
  if (opt.trials < 1) throw ParameterError("run_suite: trials must be >= 1");
  std::vector<CheckReport> parts(opt.trials);
  parallel_for(opt.trials, opt.threads, [&](std::size_t i) {
    CounterRng rng(derive_seed(opt.seed, suite.stream, i));
    try {
      parts[i] = suite.instance(rng, i, opt);
    } catch (const Error& e) {
      throw NumericError(std::string(suite.name) + " instance " + std::to_string(i) + ": " + e.what());
    }
    parts[i].witness["instance"] = i;
  });
  CheckReport total(suite.name, opt.tol);
  for (const auto& p : parts) total.merge(p);
  return total;
}

inline CheckReport run_suite(const std::string& name, const SuiteOptions& opt) { return run_suite(find_suite(name), opt); }

}  // namespace tprod
