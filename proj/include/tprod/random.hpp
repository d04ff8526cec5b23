#pragma once

// Random symmetric T-product tensors with Gaussian (GUE-like) frequency
// blocks, sub-exponential envelope checks, and the g/exp ordering check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tprod/check_report.hpp"
#include "tprod/errors.hpp"
#include "tprod/rng.hpp"
#include "tprod/spectral.hpp"
#include "tprod/tensor.hpp"

namespace tprod {

enum class SampleMode { paper_literal, real_tensor };

inline const char* to_string(SampleMode m) { return m == SampleMode::paper_literal ? "paper_literal" : "real_tensor"; }

inline SampleMode parse_sample_mode(const std::string& s) {
  if (s == "paper_literal") return SampleMode::paper_literal;
  if (s == "real_tensor") return SampleMode::real_tensor;
  throw ParameterError("unknown sample mode '" + s + "' (expected paper_literal or real_tensor)");
}

struct RandomModel {
  std::size_t m = 1;
  std::size_t p = 1;
  SampleMode mode = SampleMode::paper_literal;
  std::uint64_t seed = 0;

  void validate() const {
    if (m < 1 || p < 1) throw ParameterError("RandomModel: m and p must be >= 1");
  }
};

namespace detail {

// Hermitian m x m block: diagonal N(0, 1/m); off-diagonal real and imaginary
// parts N(0, 1/(2m)). `real_only` drops the imaginary parts (self-conjugate
// frequencies of a real tensor).
inline BlockMatrix gue_block(CounterRng& rng, std::size_t m, bool real_only) {
  const auto n = static_cast<Eigen::Index>(m);
  const double sd_diag = std::sqrt(1.0 / static_cast<double>(m));
  const double sd_off = std::sqrt(0.5 / static_cast<double>(m));
  BlockMatrix b(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    b(j, j) = Complex(sd_diag * rng.normal(), 0.0);
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const double re = sd_off * rng.normal();
      const double im = real_only ? 0.0 : sd_off * rng.normal();
      b(j, k) = Complex(re, im);
      b(k, j) = Complex(re, -im);
    }
  }
  return b;
}

}  // namespace detail

// One draw from `rng`. paper_literal: p independent blocks. real_tensor:
// blocks 0..floor(p/2) are drawn and the rest mirrored, block_{p-j} =
// conj(block_j), so the spatial tensor is real.
inline BlockSpectrum sample_spectrum(const RandomModel& model, CounterRng& rng) {
  model.validate();
  const std::size_t p = model.p;
  std::vector<BlockMatrix> blocks(p);
  if (model.mode == SampleMode::paper_literal) {
    for (std::size_t i = 0; i < p; ++i) blocks[i] = detail::gue_block(rng, model.m, false);
    return BlockSpectrum(std::move(blocks), false);
  }
  for (std::size_t i = 0; 2 * i <= p; ++i) {
    const std::size_t mirror = (p - i) % p;
    const bool self_conjugate = mirror == i;
    blocks[i] = detail::gue_block(rng, model.m, self_conjugate);
    if (!self_conjugate) blocks[mirror] = blocks[i].conjugate();
  }
  return BlockSpectrum(std::move(blocks), true);
}

// The index-th draw of the model's stream; independent of any other draw.
inline BlockSpectrum sample_spectrum(const RandomModel& model, std::uint64_t index = 0) {
  CounterRng rng(derive_seed(model.seed, 0x5A3D, index));
  return sample_spectrum(model, rng);
}

// Spatial tensor of a draw: real in real_tensor mode, complex otherwise.
inline TTensor sample_tensor(const RandomModel& model, std::uint64_t index = 0) {
  return from_spectrum(sample_spectrum(model, index));
}

// ----------------------------------------------------------------------------
// Sub-exponential envelope  X^q <= q! a^2 / 2 * I  for q = 2..p_max

// Smallest positive double; stands in for a -> 0+ on all-zero samples.
inline constexpr double kMinEnvelope = std::numeric_limits<double>::min();

struct Envelope {
  double a = 1.0;
  unsigned p_max = 8;

  void validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("Envelope: a must be positive and finite");
    if (p_max < 2) throw ParameterError("Envelope: p_max must be >= 2");
  }
};

namespace detail {

// lambda_max(X^q) from the T-eigenvalues of X (spectral mapping); for even q
// this is r^q, for odd q it is lambda_max(X)^q.
inline double max_power_eig(double lmax, double lmin, unsigned q) {
  const double qd = static_cast<double>(q);
  if (q % 2 == 0) return std::pow(std::max(std::abs(lmax), std::abs(lmin)), qd);
  return std::pow(lmax, qd);
}

inline double half_factorial(unsigned q) { return 0.5 * std::tgamma(static_cast<double>(q) + 1.0); }

}  // namespace detail

inline CheckReport check_subexp_domination(const BlockSpectrum& x, const Envelope& env) {
  env.validate();
  const TEigenSystem e = t_eigenvalues(x);
  CheckReport report("subexp-domination", kDefaultCheckTol);
  const double a2 = env.a * env.a;
  for (unsigned q = 2; q <= env.p_max; ++q) {
    const double lhs = detail::max_power_eig(e.max(), e.min(), q);
    const double rhs = detail::half_factorial(q) * a2;
    report.record_sides(lhs, rhs, 0.0, [&] { return nlohmann::json{{"q", q}}; });
  }
  return report;
}

inline CheckReport check_subexp_domination(const TTensor& x, const Envelope& env) {
  if (!is_symmetric(x))
    throw PreconditionError("check_subexp_domination: tensor is not symmetric");
  return check_subexp_domination(to_spectrum(x), env);
}

// Per-sample smallest a: max over q of sqrt(lambda_max(X^q) / (q!/2)).
inline double envelope_of(const BlockSpectrum& x, unsigned p_max) {
  if (p_max < 2) throw ParameterError("envelope_of: p_max must be >= 2");
  const TEigenSystem e = t_eigenvalues(x);
  double a = 0.0;
  for (unsigned q = 2; q <= p_max; ++q)
    a = std::max(a, std::sqrt(std::max(0.0, detail::max_power_eig(e.max(), e.min(), q)) / detail::half_factorial(q)));
  return a;
}

inline Envelope calibrate_envelope(std::span<const BlockSpectrum> samples, unsigned p_max = 8) {
  if (samples.empty()) throw ParameterError("calibrate_envelope: no samples");
  double a = 0.0;
  for (const auto& s : samples) a = std::max(a, envelope_of(s, p_max));
  return Envelope{std::max(a, kMinEnvelope), p_max};
}

inline Envelope calibrate_envelope(std::span<const TTensor> samples, unsigned p_max = 8) {
  std::vector<BlockSpectrum> spectra;
  spectra.reserve(samples.size());
  for (const auto& t : samples) spectra.push_back(to_spectrum(t));
  return calibrate_envelope(std::span<const BlockSpectrum>(spectra), p_max);
}

// ----------------------------------------------------------------------------
// g(exp(t S)) >= exp(t g(S)) in the Loewner order

inline CheckReport check_g_exp_condition(const BlockSpectrum& s, const FnSpec& g, double t, double tol = kDefaultCheckTol) {
  if (g.kind() != FnSpec::Kind::polynomial || !g.has_nonnegative_coeffs())
    throw ParameterError("check_g_exp_condition: g must be a polynomial with nonnegative coefficients");
  if (!(t > 0.0) || !std::isfinite(t)) throw ParameterError("check_g_exp_condition: t must be positive");
  const BlockSpectrum lhs = apply_fn(apply_fn(s, FnSpec::exp(t)), g);
  const BlockSpectrum rhs = apply_fn(apply_fn(s, g), FnSpec::exp(t));
  const LoewnerResult cmp = loewner_compare(lhs, rhs, tol);
  CheckReport report("g-exp-condition", tol);
  report.record(cmp.min_eig / cmp.scale, [&] {
    return nlohmann::json{{"min_eig", cmp.min_eig}, {"max_eig", cmp.max_eig}, {"order", to_string(cmp.order)}, {"t", t}};
  });
  return report;
}

inline CheckReport check_g_exp_condition(const TTensor& s, const FnSpec& g, double t, double tol = kDefaultCheckTol) {
  if (!is_symmetric(s))
    throw PreconditionError("check_g_exp_condition: tensor is not symmetric");
  return check_g_exp_condition(to_spectrum(s), g, t, tol);
}

}  // namespace tprod
