#pragma once

// Numerical checks of the spectral inequalities. Each check evaluates both
// sides on concrete inputs and folds the outcome into a CheckReport; random
// auxiliary objects (subspaces, isometries) come from a CounterRng keyed by
// the caller's seed, so a report is a pure function of its arguments.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tprod/check_report.hpp"
#include "tprod/errors.hpp"
#include "tprod/major.hpp"
#include "tprod/norms.hpp"
#include "tprod/quadrature.hpp"
#include "tprod/rng.hpp"
#include "tprod/spectral.hpp"
#include "tprod/tensor.hpp"

namespace tprod {

inline constexpr double kIneqTol = 1e-8;

namespace detail {

inline BlockMatrix gaussian_block(CounterRng& rng, Eigen::Index rows, Eigen::Index cols) {
  BlockMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = rng.normal();
      g(i, j) = Complex(re, rng.normal());
    }
  return g;
}

// m x k matrix with orthonormal columns spanning a uniformly random subspace.
inline BlockMatrix random_orthonormal_columns(CounterRng& rng, Eigen::Index m, Eigen::Index k) {
  const BlockMatrix g = gaussian_block(rng, m, k);
  Eigen::HouseholderQR<BlockMatrix> qr(g);
  return qr.householderQ() * BlockMatrix::Identity(m, k);
}

inline double min_eig(const BlockMatrix& h) {
  Eigen::SelfAdjointEigenSolver<BlockMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double max_eig(const BlockMatrix& h) {
  Eigen::SelfAdjointEigenSolver<BlockMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

inline void check_block_counts(std::span<const std::size_t> k, std::size_t m, std::size_t p, const char* op) {
  if (k.size() != p) {
    std::ostringstream os;
    os << op << ": need " << p << " block dimensions, got " << k.size();
    throw ParameterError(os.str());
  }
  for (std::size_t i = 0; i < p; ++i)
    if (k[i] < 1 || k[i] > m) {
      std::ostringstream os;
      os << op << ": k_" << i << " = " << k[i] << " outside [1, " << m << "]";
      throw ParameterError(os.str());
    }
}

// Equality record: margin -|a - b| / max(1, |b|).
inline double equality_margin(double a, double b) {
  if (a == b) return 0.0;
  if (std::isnan(a) || std::isnan(b)) return -std::numeric_limits<double>::infinity();
  return -std::abs(a - b) / std::max(1.0, std::abs(b));
}

inline std::vector<double> singular_values_of(const std::vector<BlockMatrix>& blocks) {
  std::vector<double> v;
  for (const auto& b : blocks) {
    const Eigen::VectorXd s = singular_values(b);
    v.insert(v.end(), s.data(), s.data() + s.size());
  }
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

inline double spectral_norm(const BlockSpectrum& s) {
  double r = 0.0;
  for (const auto& b : s.blocks()) r = std::max(r, singular_values(b)(0));
  return r;
}

}  // namespace detail

// ----------------------------------------------------------------------------
// Courant-Fischer and extreme eigenvalue sums

// Rayleigh quotient <X, C*X> / <X, X> of an m x 1 x p tensor X.
inline double rayleigh_quotient(const TTensor& c, const TTensor& x) {
  const Complex num = inner(x, tprod(c, x));
  const Complex den = inner(x, x);
  if (!(std::abs(den) > 0.0)) throw DomainError("rayleigh_quotient: X is zero");
  return num.real() / den.real();
}

// k holds one 1-based dimension k_i per frequency block. Checks that the
// leading eigenvector subspace attains the value lambda at tilde k, that no
// random subspace with the same block dimensions exceeds it as a min-quotient,
// and the mirrored min-max statement.
inline CheckReport check_courant_fischer(const TTensor& c, std::span<const std::size_t> k, std::size_t trials,
                                         std::uint64_t seed, double tol = kIneqTol) {
  const BlockSpectrum s = hermitian_spectrum(c);
  const std::size_t m = s.m(), p = s.p();
  detail::check_block_counts(k, m, p, "check_courant_fischer");
  const TEigenSystem eig = t_eigenvalues(s);
  const TildeK tk = tilde_k(eig, k);
  const std::vector<std::size_t> kv(k.begin(), k.end());
  const auto mi = static_cast<Eigen::Index>(m);

  std::vector<BlockEig> eigs(p);
  for (std::size_t i = 0; i < p; ++i) eigs[i] = hermitian_eig(s.block(i));

  CheckReport r("courant-fischer", tol);
  auto base_witness = [&] { return nlohmann::json{{"k", kv}, {"lambda_tilde", tk.value}, {"k_tilde", tk.k_tilde}}; };

  // (a) attained by the top-k_i eigenvectors; the min over the subspace is
  // min_i lambda_{i,k_i}, realized by the spatial tensor X whose only
  // frequency component is v_{i~, k_i~}.
  double attained = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p; ++i) {
    const BlockMatrix q = eigs[i].vectors.leftCols(static_cast<Eigen::Index>(kv[i]));
    attained = std::min(attained, detail::min_eig(q.adjoint() * s.block(i) * q));
  }
  r.record(detail::equality_margin(attained, tk.value), [&] {
    auto w = base_witness();
    w["part"] = "max-min attained";
    w["value"] = attained;
    return w;
  });
  std::vector<BlockMatrix> xb(p, BlockMatrix::Zero(mi, 1));
  xb[tk.i_tilde] = eigs[tk.i_tilde].vectors.col(static_cast<Eigen::Index>(kv[tk.i_tilde] - 1));
  const TTensor x = tensor_from_blocks(xb, false, 1.0, "check_courant_fischer");
  const double quotient = rayleigh_quotient(c, x);
  r.record(detail::equality_margin(quotient, tk.value), [&] {
    auto w = base_witness();
    w["part"] = "spatial rayleigh quotient";
    w["value"] = quotient;
    return w;
  });

  // Mirror: dimensions m - k_i, except m - k_i + 1 at block i~. Any such
  // subspace meets the top-k_i~ eigenspace of block i~, so its max-quotient
  // is >= lambda~. The bottom eigenvectors attain max(lambda~, lambda_{i,k_i+1}
  // over i != i~), which equals lambda~ exactly when the k_i satisfy the index
  // condition lambda~ >= lambda_{i, k_i + 1} for all i.
  bool index_condition = true;
  for (std::size_t i = 0; i < p; ++i)
    if (kv[i] < m && eig.at(i, kv[i]) > tk.value) index_condition = false;
  auto mirror_dim = [&](std::size_t i) { return i == tk.i_tilde ? m - kv[i] + 1 : m - kv[i]; };
  double mirror_bottom = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p; ++i) {
    const auto d = static_cast<Eigen::Index>(mirror_dim(i));
    if (d == 0) continue;
    const BlockMatrix q = eigs[i].vectors.rightCols(d);
    mirror_bottom = std::max(mirror_bottom, detail::max_eig(q.adjoint() * s.block(i) * q));
  }
  const double mirror_margin = index_condition ? detail::equality_margin(mirror_bottom, tk.value)
                                               : CheckReport::scaled_margin(tk.value, mirror_bottom);
  r.record(mirror_margin, [&] {
    auto w = base_witness();
    w["part"] = index_condition ? "min-max attained" : "min-max bottom eigenvectors";
    w["index_condition"] = index_condition;
    w["value"] = mirror_bottom;
    return w;
  });

  // (b) random subspaces.
  CounterRng rng(derive_seed(seed, 0x43465f7375627370ULL));
  for (std::size_t t = 0; t < trials; ++t) {
    double min_quotient = std::numeric_limits<double>::infinity();
    double max_quotient = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p; ++i) {
      const BlockMatrix q = detail::random_orthonormal_columns(rng, mi, static_cast<Eigen::Index>(kv[i]));
      min_quotient = std::min(min_quotient, detail::min_eig(q.adjoint() * s.block(i) * q));
      const auto d = static_cast<Eigen::Index>(mirror_dim(i));
      if (d == 0) continue;
      const BlockMatrix u = detail::random_orthonormal_columns(rng, mi, d);
      max_quotient = std::max(max_quotient, detail::max_eig(u.adjoint() * s.block(i) * u));
    }
    r.record(CheckReport::scaled_margin(min_quotient, tk.value), [&] {
      auto w = base_witness();
      w["part"] = "max-min random subspace";
      w["trial"] = t;
      w["value"] = min_quotient;
      return w;
    });
    r.record(CheckReport::scaled_margin(tk.value, max_quotient), [&] {
      auto w = base_witness();
      w["part"] = "min-max random subspace";
      w["trial"] = t;
      w["value"] = max_quotient;
      return w;
    });
  }
  return r;
}

// sum_i max tr(U_i C_i U_i^H) over k_i x m row-isometries equals the sum of
// the top k_i eigenvalues of each block; the min mirrors it with the bottom
// k_i. Random isometries must stay inside the bounds.
inline CheckReport check_extreme_sum_rep(const TTensor& c, std::span<const std::size_t> k, std::size_t trials,
                                         std::uint64_t seed, double tol = kIneqTol) {
  const BlockSpectrum s = hermitian_spectrum(c);
  const std::size_t m = s.m(), p = s.p();
  detail::check_block_counts(k, m, p, "check_extreme_sum_rep");
  const std::vector<std::size_t> kv(k.begin(), k.end());
  const auto mi = static_cast<Eigen::Index>(m);

  double top = 0.0, bottom = 0.0, top_attained = 0.0, bottom_attained = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    const BlockEig e = hermitian_eig(s.block(i));
    const auto ki = static_cast<Eigen::Index>(kv[i]);
    top += e.values.head(ki).sum();
    bottom += e.values.tail(ki).sum();
    const BlockMatrix ut = e.vectors.leftCols(ki).adjoint();
    const BlockMatrix ub = e.vectors.rightCols(ki).adjoint();
    top_attained += (ut * s.block(i) * ut.adjoint()).trace().real();
    bottom_attained += (ub * s.block(i) * ub.adjoint()).trace().real();
  }

  CheckReport r("extreme-sum-rep", tol);
  auto witness = [&](const char* part, double value) {
    return nlohmann::json{{"k", kv}, {"part", part}, {"value", value}, {"top_sum", top}, {"bottom_sum", bottom}};
  };
  r.record(detail::equality_margin(top_attained, top), [&] { return witness("max attained", top_attained); });
  r.record(detail::equality_margin(bottom_attained, bottom), [&] { return witness("min attained", bottom_attained); });

  CounterRng rng(derive_seed(seed, 0x45535f69736f6d74ULL));
  for (std::size_t t = 0; t < trials; ++t) {
    double value = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const BlockMatrix u = detail::random_orthonormal_columns(rng, mi, static_cast<Eigen::Index>(kv[i])).adjoint();
      value += (u * s.block(i) * u.adjoint()).trace().real();
    }
    r.record(CheckReport::scaled_margin(value, top), [&] { return witness("max bound", value); });
    r.record(CheckReport::scaled_margin(bottom, value), [&] { return witness("min bound", value); });
  }
  return r;
}

// ----------------------------------------------------------------------------
// Singular values, Ky Fan norms, antisymmetric powers

// sigma(A + B) ≺_w sigma(A) + sigma(B), entrywise on the sorted vectors.
inline CheckReport check_sv_majorization(const TTensor& a, const TTensor& b, double tol = kIneqTol) {
  if (!a.same_shape(b)) throw ShapeError("check_sv_majorization: shape mismatch " + a.shape_string() + " vs " + b.shape_string());
  const std::vector<double> sa = t_singular_values(a).values();
  const std::vector<double> sb = t_singular_values(b).values();
  std::vector<double> sum(sa.size());
  for (std::size_t i = 0; i < sa.size(); ++i) sum[i] = sa[i] + sb[i];
  CheckReport r = majorizes(SpectrumVec(t_singular_values(a + b).values()), SpectrumVec(sum), MajorMode::weak, tol);
  r.name = "sv-majorization";
  return r;
}

// || |prod C_i|^s ||_(k) <= prod (|| |C_i|^{s p_i} ||_(k))^{1/p_i}
//                        <= sum || |C_i|^{s p_i} ||_(k) / p_i.
inline CheckReport check_kyfan_product(std::span<const TTensor> cs, std::span<const double> exponents, double s,
                                       std::size_t k, double tol = kIneqTol) {
  if (cs.empty() || cs.size() != exponents.size()) throw ParameterError("check_kyfan_product: need one exponent per tensor");
  if (!(s >= 1.0)) throw ParameterError("check_kyfan_product: s must be >= 1");
  double inv_sum = 0.0;
  for (double e : exponents) {
    if (!(e > 0.0)) throw ParameterError("check_kyfan_product: exponents must be positive");
    inv_sum += 1.0 / e;
  }
  if (std::abs(inv_sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "check_kyfan_product: sum of 1/p_i is " << inv_sum << ", expected 1";
    throw ParameterError(os.str());
  }
  const GaugeSpec g = GaugeSpec::ky_fan(k);
  BlockSpectrum prod = to_spectrum(cs[0]);
  for (std::size_t i = 1; i < cs.size(); ++i) prod = prod * to_spectrum(cs[i]);
  const double lhs = gauge_norm_abs_power(prod, s, g);
  double log_mid = 0.0, rhs = 0.0;
  bool mid_zero = false;
  std::vector<double> norms(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    norms[i] = gauge_norm_abs_power(cs[i], s * exponents[i], g);
    rhs += norms[i] / exponents[i];
    if (norms[i] == 0.0) mid_zero = true;
    else log_mid += std::log(norms[i]) / exponents[i];
  }
  const double mid = mid_zero ? 0.0 : std::exp(log_mid);
  CheckReport r("kyfan-product", tol);
  auto extra = [&](const char* part) {
    return [&, part] {
      return nlohmann::json{{"part", part}, {"k", k}, {"s", s}, {"exponents", std::vector<double>(exponents.begin(), exponents.end())},
                            {"factor_norms", norms}};
    };
  };
  r.record_sides(lhs, mid, 0.0, extra("product <= holder"));
  r.record_sides(mid, rhs, 0.0, extra("holder <= young"));
  return r;
}

// || |sum C_i|^s ||_(k) <= n^{s-1} sum || |C_i|^s ||_(k).
inline CheckReport check_kyfan_sum(std::span<const TTensor> cs, double s, std::size_t k, double tol = kIneqTol) {
  if (cs.empty()) throw ParameterError("check_kyfan_sum: need at least one tensor");
  if (!(s >= 1.0)) throw ParameterError("check_kyfan_sum: s must be >= 1");
  const GaugeSpec g = GaugeSpec::ky_fan(k);
  TTensor sum = cs[0];
  double rhs = gauge_norm_abs_power(cs[0], s, g);
  for (std::size_t i = 1; i < cs.size(); ++i) {
    sum = sum + cs[i];
    rhs += gauge_norm_abs_power(cs[i], s, g);
  }
  rhs *= std::pow(static_cast<double>(cs.size()), s - 1.0);
  const double lhs = gauge_norm_abs_power(sum, s, g);
  CheckReport r("kyfan-sum", tol);
  r.record_sides(lhs, rhs, 0.0, [&] { return nlohmann::json{{"k", k}, {"s", s}, {"n", cs.size()}}; });
  return r;
}

// prod of the top k T-singular values (block SVDs) against the top k
// singular values of the dense bcirc matrix, relative agreement.
inline CheckReport check_antisym_product_identity(const TTensor& e, std::size_t k, double tol = 1e-7) {
  if (!e.is_square()) throw ShapeError("check_antisym_product_identity: slices must be square");
  const std::size_t n = e.rows() * e.slices();
  if (k < 1 || k > n) throw ParameterError("check_antisym_product_identity: k outside [1, m*p]");
  const std::vector<double> tsv = t_singular_values(e).values();
  Eigen::JacobiSVD<BlockMatrix> svd(bcirc(e));
  const Eigen::VectorXd dsv = svd.singularValues();
  // Log-sums keep large k from overflowing; zero factors are handled exactly.
  double lt = 0.0, ld = 0.0;
  bool zt = false, zd = false;
  for (std::size_t i = 0; i < k; ++i) {
    if (tsv[i] == 0.0) zt = true;
    else lt += std::log(tsv[i]);
    const double d = dsv(static_cast<Eigen::Index>(i));
    if (d == 0.0) zd = true;
    else ld += std::log(d);
  }
  CheckReport r("antisym-product-identity", tol);
  const double pt = zt ? 0.0 : std::exp(lt), pd = zd ? 0.0 : std::exp(ld);
  double margin = 0.0;
  if (zt || zd) {
    margin = detail::equality_margin(pt, pd);
  } else {
    margin = -std::abs(std::expm1(lt - ld));  // relative error of the products
  }
  r.record(margin, [&] { return nlohmann::json{{"k", k}, {"t_product", pt}, {"bcirc_product", pd}}; });
  return r;
}

// ----------------------------------------------------------------------------
// Lie-Trotter product formula

// err(q) = || (prod exp(L_i / q))^q - exp(sum L_i) || for each q in steps
// (consecutive entries must double). Non-commuting inputs must show first-
// order convergence, err(q) / err(2q) in [1.6, 2.4], and end below
// 1e-4 ||exp(sum L_i)||. When every error is already at round-off level
// (<= 1e-12 ||exp(sum L_i)||) the inputs commute and only that is checked.
struct LieTrotterErrors {
  std::vector<unsigned long long> steps;
  std::vector<double> errors;
  double reference = 0.0;  // ||exp(sum L_i)||
};

inline LieTrotterErrors lie_trotter_errors(std::span<const TTensor> ls, std::span<const unsigned long long> steps,
                                           const GaugeSpec& gauge = GaugeSpec::spectral()) {
  if (ls.empty()) throw ParameterError("lie_trotter: need at least one tensor");
  std::vector<BlockSpectrum> specs;
  specs.reserve(ls.size());
  for (const auto& l : ls) {
    if (!l.same_shape(ls[0])) throw ShapeError("lie_trotter: tensors differ in shape");
    specs.push_back(hermitian_spectrum(l));
  }
  BlockSpectrum sum = specs[0];
  for (std::size_t i = 1; i < specs.size(); ++i) sum = sum + specs[i];
  const BlockSpectrum target = apply_fn(sum, FnSpec::exp());
  LieTrotterErrors out;
  out.reference = gauge_norm(target, gauge);
  for (unsigned long long q : steps) {
    if (q == 0) throw ParameterError("lie_trotter: step counts must be positive");
    const FnSpec step = FnSpec::exp(1.0 / static_cast<double>(q));
    BlockSpectrum prod = apply_fn(specs[0], step);
    for (std::size_t i = 1; i < specs.size(); ++i) prod = prod * apply_fn(specs[i], step);
    out.steps.push_back(q);
    out.errors.push_back(gauge_norm(spectrum_power(prod, q) - target, gauge));
  }
  return out;
}

inline constexpr double kLieExactTol = 1e-12;
inline constexpr double kLieFinalTol = 1e-4;

inline CheckReport check_lie_trotter(std::span<const TTensor> ls, std::span<const unsigned long long> steps,
                                     const GaugeSpec& gauge = GaugeSpec::spectral(), double tol = kIneqTol) {
  if (steps.size() < 2) throw ParameterError("check_lie_trotter: need at least two step counts");
  for (std::size_t i = 0; i + 1 < steps.size(); ++i)
    if (steps[i + 1] != 2 * steps[i]) throw ParameterError("check_lie_trotter: step counts must double consecutively");
  const LieTrotterErrors e = lie_trotter_errors(ls, steps, gauge);
  const double scale = std::max(1.0, e.reference);
  CheckReport r("lie-trotter", tol);
  auto witness = [&](const char* part, std::size_t i) {
    return nlohmann::json{{"part", part}, {"q", e.steps[i]}, {"errors", e.errors}, {"steps", e.steps}, {"reference", e.reference}};
  };
  const double worst = *std::max_element(e.errors.begin(), e.errors.end());
  if (worst <= kLieExactTol * scale) {
    for (std::size_t i = 0; i < e.errors.size(); ++i)
      r.record((kLieExactTol * scale - e.errors[i]) / scale, [&] { return witness("exact (commuting)", i); });
    return r;
  }
  for (std::size_t i = 0; i + 1 < e.errors.size(); ++i) {
    const double ratio = e.errors[i] / e.errors[i + 1];
    const double margin = std::isfinite(ratio) ? std::min(ratio - 1.6, 2.4 - ratio) : -std::numeric_limits<double>::infinity();
    r.record(margin, [&] {
      auto w = witness("ratio", i);
      w["ratio"] = ratio;
      return w;
    });
  }
  r.record_sides(e.errors.back(), kLieFinalTol * e.reference, 0.0, [&] { return witness("final error", e.errors.size() - 1); });
  return r;
}

// ----------------------------------------------------------------------------
// Multivariate norm inequality

// x -> log f(e^x) convex on R, with f positive and monotone on (0, inf).
inline bool is_log_convex_in_exponent(const FnSpec& f) {
  switch (f.kind()) {
    case FnSpec::Kind::exp: return f.scale() >= 0.0;
    case FnSpec::Kind::power: return true;
    case FnSpec::Kind::polynomial:
      return f.has_nonnegative_coeffs() && std::any_of(f.coeffs().begin(), f.coeffs().end(), [](double a) { return a > 0.0; });
    case FnSpec::Kind::shifted_relu: return f.shift() >= 0.0;
    default: return false;
  }
}

// x -> g(e^x) convex on R, with g nonnegative and monotone on (0, inf).
inline bool is_convex_in_exponent(const FnSpec& g) {
  switch (g.kind()) {
    case FnSpec::Kind::exp: return g.scale() >= 0.0;
    case FnSpec::Kind::power: return true;
    case FnSpec::Kind::polynomial: return g.has_nonnegative_coeffs();
    case FnSpec::Kind::shifted_relu: return true;
    default: return false;
  }
}

inline constexpr double kTpdThreshold = 1e-8;

namespace detail {

// Per-block eigendecomposition of a TPD tensor, reused for every complex
// power C^z = V diag(lambda^z) V^H.
struct PowerBasis {
  std::vector<BlockEig> blocks;
  double lambda_min = 0.0, lambda_max = 0.0;

  BlockMatrix power(std::size_t i, Complex z) const {
    const BlockEig& e = blocks[i];
    Eigen::VectorXcd d(e.values.size());
    for (Eigen::Index j = 0; j < d.size(); ++j) d(j) = std::exp(z * std::log(e.values(j)));
    return e.vectors * d.asDiagonal() * e.vectors.adjoint();
  }

  BlockMatrix log_block(std::size_t i) const {
    const BlockEig& e = blocks[i];
    const Eigen::VectorXd d = e.values.array().log();
    return e.vectors * d.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  }
};

inline PowerBasis power_basis(const TTensor& c, std::size_t index) {
  const BlockSpectrum s = hermitian_spectrum(c);
  PowerBasis b;
  b.lambda_min = std::numeric_limits<double>::infinity();
  b.lambda_max = 0.0;
  for (std::size_t i = 0; i < s.p(); ++i) {
    b.blocks.push_back(hermitian_eig(s.block(i)));
    b.lambda_min = std::min(b.lambda_min, b.blocks.back().values.minCoeff());
    b.lambda_max = std::max(b.lambda_max, b.blocks.back().values.maxCoeff());
  }
  if (!(b.lambda_min > kTpdThreshold)) {
    std::ostringstream os;
    os << "multivariate norm inequality: tensor " << index << " is not TPD (lambda_min = " << b.lambda_min << ")";
    throw PreconditionError(os.str());
  }
  return b;
}

inline double gauge_of_mapped(const std::vector<double>& values, const FnSpec& f, const GaugeSpec& gauge) {
  std::vector<double> mapped(values.size());
  std::transform(values.begin(), values.end(), mapped.begin(), [&](double v) { return f(v); });
  return gauge(mapped);
}

// rho over the constant vector c * (1, ..., 1).
inline double gauge_of_constant(double c, std::size_t n, const GaugeSpec& gauge) {
  return gauge(std::vector<double>(n, c));
}

}  // namespace detail

struct MultivariateOptions {
  QuadratureSpec quad{};
  double theta = 0.0;  // 0: the exp(sum log C_i) form with beta_0; (0, 1): |prod C_i^theta|^{1/theta} with beta_theta
  double tol = kIneqTol;
};

// Both sides of the log-average form (f, exp of the beta-average of log norms) and
// the average form (g, plain beta-average). The allowance on each right-hand
// side is the quadrature error estimate plus tail mass times sup|integrand|.
struct MultivariateSides {
  double lhs_f = 0.0, rhs_f = 0.0, allowance_f = 0.0;
  double lhs_g = 0.0, rhs_g = 0.0, allowance_g = 0.0;
  WeightedIntegral integral_f, integral_g;
};

inline MultivariateSides multivariate_sides(std::span<const TTensor> cs, const FnSpec& f, const FnSpec& g,
                                            const GaugeSpec& gauge, const MultivariateOptions& opt = {}) {
  if (cs.empty()) throw ParameterError("check_multivariate_norm_ineq: need at least one tensor");
  if (!is_log_convex_in_exponent(f))
    throw ParameterError("check_multivariate_norm_ineq: f = " + f.describe() + " is not in the log f(e^x)-convex family");
  if (!is_convex_in_exponent(g))
    throw ParameterError("check_multivariate_norm_ineq: g = " + g.describe() + " is not in the g(e^x)-convex family");
  if (!(opt.theta >= 0.0 && opt.theta < 1.0)) throw ParameterError("check_multivariate_norm_ineq: theta must lie in [0, 1)");
  std::vector<detail::PowerBasis> bases;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (!cs[i].same_shape(cs[0])) throw ShapeError("check_multivariate_norm_ineq: tensors differ in shape");
    bases.push_back(detail::power_basis(cs[i], i));
  }
  const std::size_t p = cs[0].slices();
  const std::size_t n_values = cs[0].rows() * p;

  std::vector<double> lhs_values;
  if (opt.theta == 0.0) {
    for (std::size_t j = 0; j < p; ++j) {
      BlockMatrix acc = bases[0].log_block(j);
      for (std::size_t i = 1; i < bases.size(); ++i) acc += bases[i].log_block(j);
      const BlockEig e = hermitian_eig(0.5 * (acc + acc.adjoint()));
      for (Eigen::Index l = 0; l < e.values.size(); ++l) lhs_values.push_back(std::exp(e.values(l)));
    }
  } else {
    std::vector<BlockMatrix> prod(p);
    for (std::size_t j = 0; j < p; ++j) {
      prod[j] = bases[0].power(j, Complex(opt.theta, 0.0));
      for (std::size_t i = 1; i < bases.size(); ++i) prod[j] = prod[j] * bases[i].power(j, Complex(opt.theta, 0.0));
    }
    lhs_values = detail::singular_values_of(prod);
    for (double& v : lhs_values) v = std::pow(v, 1.0 / opt.theta);
  }

  // Singular values of |prod C_i^{1 + it}|.
  auto sigma_at = [&](double t) {
    std::vector<BlockMatrix> prod(p);
    const Complex z(1.0, t);
    for (std::size_t j = 0; j < p; ++j) {
      prod[j] = bases[0].power(j, z);
      for (std::size_t i = 1; i < bases.size(); ++i) prod[j] = prod[j] * bases[i].power(j, z);
    }
    return detail::singular_values_of(prod);
  };

  // Every singular value lies in [prod lambda_min, prod lambda_max] and the
  // admissible f, g are monotone there, which bounds both integrands.
  double lo = 1.0, hi = 1.0;
  for (const auto& b : bases) {
    lo *= b.lambda_min;
    hi *= b.lambda_max;
  }
  const double f_lo = detail::gauge_of_constant(f(lo), n_values, gauge), f_hi = detail::gauge_of_constant(f(hi), n_values, gauge);
  const double g_lo = detail::gauge_of_constant(g(lo), n_values, gauge), g_hi = detail::gauge_of_constant(g(hi), n_values, gauge);
  if (!(std::min(f_lo, f_hi) > 0.0)) throw DomainError("check_multivariate_norm_ineq: ||f(.)|| vanishes, log is undefined");
  if (!std::isfinite(std::max(f_hi, f_lo)) || !std::isfinite(std::max(g_hi, g_lo))) {
    std::ostringstream os;
    os << "check_multivariate_norm_ineq: f or g overflows on the singular value range [" << lo << ", " << hi << "]";
    throw DomainError(os.str());
  }
  const double sup_log_f = std::max(std::abs(std::log(f_lo)), std::abs(std::log(f_hi)));
  const double sup_g = std::max(g_lo, g_hi);

  MultivariateSides out;
  out.integral_f =
      integrate_beta([&](double t) { return std::log(detail::gauge_of_mapped(sigma_at(t), f, gauge)); }, opt.theta, opt.quad);
  out.integral_g =
      integrate_beta([&](double t) { return detail::gauge_of_mapped(sigma_at(t), g, gauge); }, opt.theta, opt.quad);
  for (const auto* w : {&out.integral_f, &out.integral_g})
    if (!w->quad.converged) {
      std::ostringstream os;
      os << "check_multivariate_norm_ineq: quadrature did not converge (error estimate " << w->quad.error << " after "
         << w->quad.evaluations << " evaluations)";
      throw NumericError(os.str());
    }

  out.lhs_f = detail::gauge_of_mapped(lhs_values, f, gauge);
  out.lhs_g = detail::gauge_of_mapped(lhs_values, g, gauge);
  out.rhs_f = std::exp(out.integral_f.quad.value);
  out.allowance_f = out.rhs_f * std::expm1(out.integral_f.quad.error + out.integral_f.tail_mass * sup_log_f);
  out.rhs_g = out.integral_g.quad.value;
  out.allowance_g = out.integral_g.quad.error + out.integral_g.tail_mass * sup_g;
  return out;
}

inline CheckReport check_multivariate_norm_ineq(std::span<const TTensor> cs, const FnSpec& f, const FnSpec& g,
                                                const GaugeSpec& gauge, const MultivariateOptions& opt = {}) {
  const MultivariateSides s = multivariate_sides(cs, f, g, gauge, opt);
  CheckReport r("multivariate-norm-ineq", opt.tol);
  auto extra = [&](const char* part, const FnSpec& fn, const WeightedIntegral& w) {
    return [&, part] {
      return nlohmann::json{{"part", part},
                            {"function", fn.describe()},
                            {"gauge", gauge.describe()},
                            {"n", cs.size()},
                            {"theta", opt.theta},
                            {"quad_error", w.quad.error},
                            {"tail_mass", w.tail_mass},
                            {"half_width", w.half_width},
                            {"evaluations", w.quad.evaluations}};
    };
  };
  r.record_sides(s.lhs_f, s.rhs_f, s.allowance_f, extra("log-average (f)", f, s.integral_f));
  r.record_sides(s.lhs_g, s.rhs_g, s.allowance_g, extra("average (g)", g, s.integral_g));
  return r;
}

// ----------------------------------------------------------------------------
// Integral-average majorization transfer at finitely supported measures

// Atoms (w_tau, D_tau): positive weights summing to 1, symmetric tensors of a
// common shape.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<double> weights, std::vector<TTensor> atoms)
      : weights_(std::move(weights)), atoms_(std::move(atoms)) {
    if (atoms_.empty() || atoms_.size() != weights_.size()) throw ParameterError("DiscreteMeasure: need one weight per atom");
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w > 0.0)) throw ParameterError("DiscreteMeasure: weights must be positive");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ParameterError("DiscreteMeasure: weights must sum to 1");
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (!atoms_[i].same_shape(atoms_[0]) || !atoms_[i].is_square())
        throw ShapeError("DiscreteMeasure: atoms must share one square shape");
      if (!is_symmetric(atoms_[i], 1e-9)) {
        std::ostringstream os;
        os << "DiscreteMeasure: atom " << i << " is not symmetric";
        throw PreconditionError(os.str());
      }
    }
    for (const auto& a : atoms_) spectra_.push_back(t_eigenvalues(a).values());
  }

  std::size_t size() const noexcept { return atoms_.size(); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<TTensor>& atoms() const noexcept { return atoms_; }
  // Sorted (descending) T-eigenvalues of atom i.
  const std::vector<double>& spectrum(std::size_t i) const { return spectra_.at(i); }
  std::size_t m() const noexcept { return atoms_[0].rows(); }
  std::size_t p() const noexcept { return atoms_[0].slices(); }

 private:
  std::vector<double> weights_;
  std::vector<TTensor> atoms_;
  std::vector<std::vector<double>> spectra_;
};

enum class AverageMode { arith, log };

inline const char* to_string(AverageMode m) { return m == AverageMode::arith ? "arith" : "log"; }

// Entry-wise average of the sorted spectra: sum w_tau lambda_j(D_tau)
// (arith) or exp sum w_tau log lambda_j(D_tau) (log).
inline std::vector<double> averaged_spectrum(const DiscreteMeasure& mu, AverageMode mode) {
  const std::size_t n = mu.m() * mu.p();
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    bool zero = false;
    for (std::size_t t = 0; t < mu.size(); ++t) {
      const double v = mu.spectrum(t)[j];
      if (mode == AverageMode::arith) {
        acc += mu.weights()[t] * v;
      } else if (v <= 0.0) {
        zero = true;
      } else {
        acc += mu.weights()[t] * std::log(v);
      }
    }
    out[j] = mode == AverageMode::arith ? acc : (zero ? 0.0 : std::exp(acc));
  }
  return out;
}

inline void require_tpsd_atoms(const DiscreteMeasure& mu) {
  for (std::size_t t = 0; t < mu.size(); ++t) {
    const auto& s = mu.spectrum(t);
    if (s.back() < -1e-12 * std::max(1.0, std::abs(s.front()))) {
      std::ostringstream os;
      os << "log-mode transfer: atom " << t << " is not TPSD (lambda_min = " << s.back() << ")";
      throw PreconditionError(os.str());
    }
  }
}

// A Hermitian tensor whose T-eigenvalues are `values` (any order). Real
// tensors need equal spectra on conjugate block pairs, which an averaged
// spectrum does not have in general, so the result is complex.
inline TTensor tensor_with_spectrum(std::span<const double> values, std::size_t m, std::size_t p) {
  if (values.size() != m * p) throw ShapeError("tensor_with_spectrum: need m*p values");
  std::vector<BlockMatrix> blocks(p, BlockMatrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)));
  double scale = 0.0;
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      blocks[j](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values[j * m + i];
      scale = std::max(scale, std::abs(values[j * m + i]));
    }
  return tensor_from_blocks(blocks, false, scale, "tensor_with_spectrum");
}

// Premise construction: C with lambda(C) equal to the averaged spectrum
// (strong majorization), lowered at the top entry by `deficit` (arith) or by
// the factor e^{-deficit} (log), which leaves only the weak variant.
inline TTensor build_transfer_premise(const DiscreteMeasure& mu, AverageMode mode, double deficit = 0.0) {
  if (!(deficit >= 0.0)) throw ParameterError("build_transfer_premise: deficit must be >= 0");
  if (mode == AverageMode::log) require_tpsd_atoms(mu);
  std::vector<double> v = averaged_spectrum(mu, mode);
  if (mode == AverageMode::arith) v[0] -= deficit;
  else v[0] *= std::exp(-deficit);
  return tensor_with_spectrum(v, mu.m(), mu.p());
}

namespace detail {

// Convexity / monotonicity on an interval [lo, hi] of the real line.
inline bool convex_on(const FnSpec& f, double lo) {
  switch (f.kind()) {
    case FnSpec::Kind::exp: return true;
    case FnSpec::Kind::shifted_relu: return true;
    case FnSpec::Kind::power: {
      const double q = f.alpha();
      const bool integral = std::floor(q) == q;
      if (lo >= 0.0) return q >= 1.0 || q <= 0.0;
      return integral && q >= 0.0 && std::fmod(q, 2.0) == 0.0;
    }
    case FnSpec::Kind::polynomial: return lo >= 0.0 && f.has_nonnegative_coeffs();
    default: return false;
  }
}

inline bool nondecreasing_on(const FnSpec& f, double lo) {
  switch (f.kind()) {
    case FnSpec::Kind::exp: return f.scale() >= 0.0;
    case FnSpec::Kind::shifted_relu: return true;
    case FnSpec::Kind::power: return lo >= 0.0 && f.alpha() >= 0.0;
    case FnSpec::Kind::polynomial: return lo >= 0.0 && f.has_nonnegative_coeffs();
    default: return false;
  }
}

inline double gauge_of_fn(const std::vector<double>& spectrum, const FnSpec& f, const GaugeSpec& gauge) {
  return gauge_of_mapped(spectrum, f, gauge);
}

}  // namespace detail

// Given C and mu with lambda(C) ≺ (or ≺_w) the averaged spectrum, checks for
// each f in `family`:
//   arith: ||f(C)|| <= sum w ||f(D)||          (f convex; nondecreasing if weak)
//   log:   ||f(C)|| <= exp sum w log ||f(D)||  (log f(e^x) convex)
//          ||g(C)|| <= sum w ||g(D)||          (g(e^x) convex)
// The premise is verified with `majorizes`; a C that satisfies neither form
// is a PreconditionError, as is an f outside the admissible family.
inline CheckReport check_integral_majorization_transfer(const TTensor& c, const DiscreteMeasure& mu, AverageMode mode,
                                                        std::span<const FnSpec> family, const GaugeSpec& gauge,
                                                        double tol = kIneqTol) {
  if (family.empty()) throw ParameterError("check_integral_majorization_transfer: empty function family");
  if (c.rows() != mu.m() || c.slices() != mu.p() || !c.is_square())
    throw ShapeError("check_integral_majorization_transfer: C does not match the atoms");
  if (mode == AverageMode::log) require_tpsd_atoms(mu);
  const std::vector<double> lc = t_eigenvalues(c).values();
  const std::vector<double> avg = averaged_spectrum(mu, mode);
  const MajorMode strong = mode == AverageMode::arith ? MajorMode::strong : MajorMode::log;
  const MajorMode weak = mode == AverageMode::arith ? MajorMode::weak : MajorMode::weak_log;
  std::vector<double> lc_clamped = lc;
  if (mode == AverageMode::log) {
    if (lc.back() < -1e-12 * std::max(1.0, std::abs(lc.front())))
      throw PreconditionError("check_integral_majorization_transfer: log mode needs a TPSD C");
    for (double& v : lc_clamped) v = std::max(v, 0.0);
  }
  const double premise_tol = 1e-10;
  const bool is_strong = majorizes(lc_clamped, avg, strong, premise_tol).passed();
  if (!is_strong && !majorizes(lc_clamped, avg, weak, premise_tol).passed())
    throw PreconditionError("check_integral_majorization_transfer: premise majorization does not hold");

  double lo = lc.back();
  for (std::size_t t = 0; t < mu.size(); ++t) lo = std::min(lo, mu.spectrum(t).back());

  CheckReport r(std::string("integral-majorization-transfer:") + to_string(mode), tol);
  for (const FnSpec& f : family) {
    auto extra = [&](const char* form) {
      return [&, form] {
        return nlohmann::json{{"function", f.describe()}, {"form", form}, {"premise", is_strong ? "strong" : "weak"},
                              {"gauge", gauge.describe()}, {"weights", mu.weights()}};
      };
    };
    const double lhs = detail::gauge_of_fn(lc_clamped, f, gauge);
    if (mode == AverageMode::arith) {
      if (!detail::convex_on(f, lo) || (!is_strong && !detail::nondecreasing_on(f, lo)))
        throw ParameterError("check_integral_majorization_transfer: " + f.describe() + " is not admissible for the " +
                             (is_strong ? "strong" : "weak") + " arithmetic premise");
      double rhs = 0.0;
      for (std::size_t t = 0; t < mu.size(); ++t) rhs += mu.weights()[t] * detail::gauge_of_fn(mu.spectrum(t), f, gauge);
      r.record_sides(lhs, rhs, 0.0, extra("average"));
      continue;
    }
    const bool nondecreasing = detail::nondecreasing_on(f, 0.0);
    const bool log_form = is_log_convex_in_exponent(f) && (is_strong || nondecreasing);
    const bool plain_form = is_convex_in_exponent(f) && (is_strong || nondecreasing);
    if (!log_form && !plain_form)
      throw ParameterError("check_integral_majorization_transfer: " + f.describe() + " is not admissible for the log premise");
    std::vector<double> norms(mu.size());
    for (std::size_t t = 0; t < mu.size(); ++t) {
      std::vector<double> spec = mu.spectrum(t);
      for (double& v : spec) v = std::max(v, 0.0);
      norms[t] = detail::gauge_of_fn(spec, f, gauge);
    }
    if (log_form) {
      double acc = 0.0;
      bool zero = false;
      for (std::size_t t = 0; t < mu.size(); ++t) {
        if (norms[t] <= 0.0) zero = true;
        else acc += mu.weights()[t] * std::log(norms[t]);
      }
      r.record_sides(lhs, zero ? 0.0 : std::exp(acc), 0.0, extra("log-average"));
    }
    if (plain_form) {
      double rhs = 0.0;
      for (std::size_t t = 0; t < mu.size(); ++t) rhs += mu.weights()[t] * norms[t];
      r.record_sides(lhs, rhs, 0.0, extra("average"));
    }
  }
  return r;
}

}  // namespace tprod
