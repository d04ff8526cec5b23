#pragma once

// Frequency-domain view of square T-product tensors.
//
// to_spectrum() maps an m x m x p tensor to p blocks of size m x m, the
// diagonal blocks of (F_p (x) I_m) bcirc(T) (F_p (x) I_m)^H. Every spectral
// quantity (T-eigenvalues, T-singular values, functional calculus, norms) is
// computed block by block here; bcirc is only used as a test oracle.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tprod/errors.hpp"
#include "tprod/tensor.hpp"

namespace tprod {

// Tolerance (relative to block scale) on the anti-Hermitian part of blocks
// handed to the Hermitian eigensolver.
inline constexpr double kHermitianTol = 1e-8;

class BlockSpectrum {
 public:
  BlockSpectrum() = default;

  // `real_source` marks spectra that are conjugate-symmetric
  // (block_{p-j} = conj(block_j)), i.e. whose spatial tensor is real.
  BlockSpectrum(std::vector<BlockMatrix> blocks, bool real_source) : blocks_(std::move(blocks)), real_source_(real_source) {
    if (blocks_.empty()) throw ShapeError("BlockSpectrum: need at least one block");
    const auto m = blocks_.front().rows();
    for (const auto& b : blocks_) {
      if (b.rows() != m || b.cols() != m) throw ShapeError("BlockSpectrum: blocks must be square and equal-sized");
      if (!b.allFinite()) throw NumericError("BlockSpectrum: non-finite block entry");
    }
  }

  std::size_t m() const noexcept { return blocks_.empty() ? 0 : static_cast<std::size_t>(blocks_.front().rows()); }
  std::size_t p() const noexcept { return blocks_.size(); }
  const BlockMatrix& block(std::size_t i) const { return blocks_.at(i); }
  const std::vector<BlockMatrix>& blocks() const& noexcept { return blocks_; }
  std::vector<BlockMatrix> blocks() && noexcept { return std::move(blocks_); }
  bool real_source() const noexcept { return real_source_; }

  double max_abs() const noexcept {
    double r = 0.0;
    for (const auto& b : blocks_) r = std::max(r, b.cwiseAbs().maxCoeff());
    return r;
  }

  bool same_shape(const BlockSpectrum& o) const noexcept { return m() == o.m() && p() == o.p(); }

  friend BlockSpectrum operator+(const BlockSpectrum& a, const BlockSpectrum& b) {
    a.require_same(b, "spectrum +");
    std::vector<BlockMatrix> out(a.p());
    for (std::size_t i = 0; i < a.p(); ++i) out[i] = a.blocks_[i] + b.blocks_[i];
    return BlockSpectrum(std::move(out), a.real_source_ && b.real_source_);
  }

  friend BlockSpectrum operator-(const BlockSpectrum& a, const BlockSpectrum& b) {
    a.require_same(b, "spectrum -");
    std::vector<BlockMatrix> out(a.p());
    for (std::size_t i = 0; i < a.p(); ++i) out[i] = a.blocks_[i] - b.blocks_[i];
    return BlockSpectrum(std::move(out), a.real_source_ && b.real_source_);
  }

  // Block-wise product: the frequency-domain T-product.
  friend BlockSpectrum operator*(const BlockSpectrum& a, const BlockSpectrum& b) {
    a.require_same(b, "spectrum *");
    std::vector<BlockMatrix> out(a.p());
    for (std::size_t i = 0; i < a.p(); ++i) out[i] = a.blocks_[i] * b.blocks_[i];
    return BlockSpectrum(std::move(out), a.real_source_ && b.real_source_);
  }

  friend BlockSpectrum operator*(double s, const BlockSpectrum& a) {
    std::vector<BlockMatrix> out(a.p());
    for (std::size_t i = 0; i < a.p(); ++i) out[i] = s * a.blocks_[i];
    return BlockSpectrum(std::move(out), a.real_source_);
  }

  BlockSpectrum adjoint() const {
    std::vector<BlockMatrix> out(p());
    for (std::size_t i = 0; i < p(); ++i) out[i] = blocks_[i].adjoint();
    return BlockSpectrum(std::move(out), real_source_);
  }

  static BlockSpectrum identity(std::size_t m, std::size_t p) {
    return BlockSpectrum(std::vector<BlockMatrix>(p, BlockMatrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m))), true);
  }

  static BlockSpectrum zeros(std::size_t m, std::size_t p) {
    return BlockSpectrum(std::vector<BlockMatrix>(p, BlockMatrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m))), true);
  }

 private:
  void require_same(const BlockSpectrum& b, const char* op) const {
    if (!same_shape(b)) throw ShapeError(std::string(op) + ": spectra differ in shape");
  }

  std::vector<BlockMatrix> blocks_;
  bool real_source_ = false;
};

inline BlockSpectrum to_spectrum(const TTensor& t) {
  if (!t.is_square()) throw ShapeError("to_spectrum: slices must be square, got " + t.shape_string());
  return BlockSpectrum(frequency_blocks(t), t.is_real());
}

inline TTensor from_spectrum(const BlockSpectrum& s) {
  return tensor_from_blocks(s.blocks(), s.real_source(), s.max_abs(), "from_spectrum");
}

// Largest anti-Hermitian residue over blocks, relative to the block scale.
inline double hermitian_residue(const BlockSpectrum& s) {
  double worst = 0.0;
  for (const auto& b : s.blocks()) {
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    worst = std::max(worst, (b - b.adjoint()).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

// Replace every block by (B + B^H)/2. Asymmetry above tol is a precondition
// failure; below it the correction is applied silently.
inline BlockSpectrum symmetrize(const BlockSpectrum& s, double tol = kHermitianTol) {
  const double residue = hermitian_residue(s);
  if (residue > tol) {
    std::ostringstream os;
    os << "tensor is not symmetric: block asymmetry " << residue << " exceeds " << tol;
    throw PreconditionError(os.str());
  }
  std::vector<BlockMatrix> out(s.p());
  for (std::size_t i = 0; i < s.p(); ++i) out[i] = 0.5 * (s.block(i) + s.block(i).adjoint());
  return BlockSpectrum(std::move(out), s.real_source());
}

inline BlockSpectrum hermitian_spectrum(const TTensor& t, double tol = kHermitianTol) {
  return symmetrize(to_spectrum(t), tol);
}

// Eigen decomposition of a Hermitian block, eigenvalues in descending order
// with eigenvector columns in the same order.
struct BlockEig {
  Eigen::VectorXd values;
  BlockMatrix vectors;
};

inline BlockEig hermitian_eig(const BlockMatrix& b) {
  Eigen::SelfAdjointEigenSolver<BlockMatrix> solver(b);
  if (solver.info() != Eigen::Success) throw NumericError("hermitian_eig: eigensolver did not converge");
  const Eigen::Index n = b.rows();
  BlockEig out{Eigen::VectorXd(n), BlockMatrix(n, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values(j) = solver.eigenvalues()(n - 1 - j);
    out.vectors.col(j) = solver.eigenvectors().col(n - 1 - j);
  }
  return out;
}

inline Eigen::VectorXd singular_values(const BlockMatrix& b) {
  Eigen::JacobiSVD<BlockMatrix> svd(b);
  return svd.singularValues();  // descending
}

enum class SpectrumKind { eigen, singular };

struct TEigenEntry {
  double value;
  std::size_t block;  // frequency block index, 0-based
  std::size_t rank;   // position within the block, 0-based, descending
};

// All m*p T-eigenvalues (or T-singular values) sorted descending, each with
// its (block, rank-in-block) provenance. Ties break by (block, rank).
class TEigenSystem {
 public:
  TEigenSystem(SpectrumKind kind, std::size_t m, std::size_t p, std::vector<TEigenEntry> entries)
      : kind_(kind), m_(m), p_(p), entries_(std::move(entries)) {
    std::stable_sort(entries_.begin(), entries_.end(), [](const TEigenEntry& a, const TEigenEntry& b) {
      if (a.value != b.value) return a.value > b.value;
      if (a.block != b.block) return a.block < b.block;
      return a.rank < b.rank;
    });
    per_block_.assign(p_, std::vector<double>(m_, 0.0));
    for (const auto& e : entries_) per_block_.at(e.block).at(e.rank) = e.value;
  }

  SpectrumKind kind() const noexcept { return kind_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t p() const noexcept { return p_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<TEigenEntry>& entries() const noexcept { return entries_; }

  std::vector<double> values() const {
    std::vector<double> v(entries_.size());
    std::transform(entries_.begin(), entries_.end(), v.begin(), [](const TEigenEntry& e) { return e.value; });
    return v;
  }

  double max() const { return entries_.front().value; }
  double min() const { return entries_.back().value; }

  // j-th largest value of block i (both 0-based).
  double at(std::size_t block, std::size_t rank) const { return per_block_.at(block).at(rank); }
  const std::vector<double>& block_values(std::size_t block) const { return per_block_.at(block); }

 private:
  SpectrumKind kind_;
  std::size_t m_, p_;
  std::vector<TEigenEntry> entries_;
  std::vector<std::vector<double>> per_block_;
};

inline TEigenSystem t_eigenvalues(const BlockSpectrum& s) {
  const BlockSpectrum h = symmetrize(s);
  std::vector<TEigenEntry> entries;
  entries.reserve(h.m() * h.p());
  for (std::size_t i = 0; i < h.p(); ++i) {
    Eigen::SelfAdjointEigenSolver<BlockMatrix> solver(h.block(i), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericError("t_eigenvalues: eigensolver did not converge");
    const auto& ev = solver.eigenvalues();
    const auto n = static_cast<std::size_t>(ev.size());
    for (std::size_t j = 0; j < n; ++j) entries.push_back({ev(static_cast<Eigen::Index>(n - 1 - j)), i, j});
  }
  return TEigenSystem(SpectrumKind::eigen, h.m(), h.p(), std::move(entries));
}

inline TEigenSystem t_eigenvalues(const TTensor& t) { return t_eigenvalues(to_spectrum(t)); }

inline TEigenSystem t_singular_values(const BlockSpectrum& s) {
  std::vector<TEigenEntry> entries;
  entries.reserve(s.m() * s.p());
  for (std::size_t i = 0; i < s.p(); ++i) {
    const Eigen::VectorXd sv = singular_values(s.block(i));
    for (Eigen::Index j = 0; j < sv.size(); ++j) entries.push_back({sv(j), i, static_cast<std::size_t>(j)});
  }
  return TEigenSystem(SpectrumKind::singular, s.m(), s.p(), std::move(entries));
}

inline TEigenSystem t_singular_values(const TTensor& t) { return t_singular_values(to_spectrum(t)); }

// ----------------------------------------------------------------------------
// Functional calculus

class FnSpec {
 public:
  enum class Kind { exp, log, power, complex_power, polynomial, shifted_relu };

  // x -> exp(scale * x)
  static FnSpec exp(double scale = 1.0) {
    FnSpec f(Kind::exp);
    f.scale_ = scale;
    return f;
  }

  // x -> log x, requires eigenvalues > guard.
  static FnSpec log(double guard = 0.0) {
    FnSpec f(Kind::log);
    f.guard_ = guard;
    return f;
  }

  // x -> x^alpha. Integer alpha accepts negative x; otherwise x >= 0, and
  // negative alpha needs x > guard.
  static FnSpec power(double alpha, double guard = 0.0) {
    FnSpec f(Kind::power);
    f.alpha_ = alpha;
    f.guard_ = guard;
    return f;
  }

  // x -> x^z = exp(z log x) with the principal logarithm; x > guard.
  static FnSpec complex_power(Complex z, double guard = 0.0) {
    FnSpec f(Kind::complex_power);
    f.z_ = z;
    f.guard_ = guard;
    return f;
  }

  // x -> (a_0 + a_1 x + ... + a_n x^n)^s with s >= 1.
  static FnSpec polynomial(std::vector<double> coeffs, double outer_power = 1.0) {
    if (coeffs.empty()) throw ParameterError("polynomial: need at least one coefficient");
    if (!(outer_power >= 1.0)) throw ParameterError("polynomial: outer power must be >= 1");
    FnSpec f(Kind::polynomial);
    f.coeffs_ = std::move(coeffs);
    f.alpha_ = outer_power;
    return f;
  }

  // x -> max(x + c, 0)
  static FnSpec shifted_relu(double c) {
    FnSpec f(Kind::shifted_relu);
    f.shift_ = c;
    return f;
  }

  Kind kind() const noexcept { return kind_; }
  double scale() const noexcept { return scale_; }
  double alpha() const noexcept { return alpha_; }
  double guard() const noexcept { return guard_; }
  Complex z() const noexcept { return z_; }
  double shift() const noexcept { return shift_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  double outer_power() const noexcept { return alpha_; }
  std::size_t degree() const noexcept { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  bool is_complex() const noexcept { return kind_ == Kind::complex_power; }

  bool has_nonnegative_coeffs() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](double a) { return a >= 0.0; });
  }

  // Real-valued evaluation; throws DomainError outside the domain.
  double operator()(double x) const {
    switch (kind_) {
      case Kind::exp:
        return std::exp(scale_ * x);
      case Kind::log:
        if (!(x > guard_)) throw domain_error(x);
        return std::log(x);
      case Kind::power: {
        const bool integral = std::floor(alpha_) == alpha_;
        if (!integral && x < 0.0) throw domain_error(x);
        if (alpha_ < 0.0 && !(x > guard_)) throw domain_error(x);
        return std::pow(x, alpha_);
      }
      case Kind::complex_power:
        throw DomainError("complex_power has no real-valued evaluation");
      case Kind::polynomial: {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
        if (std::floor(alpha_) != alpha_ && acc < 0.0) throw domain_error(x);
        return alpha_ == 1.0 ? acc : std::pow(acc, alpha_);
      }
      case Kind::shifted_relu:
        return std::max(x + shift_, 0.0);
    }
    return 0.0;
  }

  Complex evaluate_complex(double x) const {
    if (kind_ != Kind::complex_power) return Complex((*this)(x), 0.0);
    if (!(x > guard_)) throw domain_error(x);
    return std::exp(z_ * std::log(x));
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::exp: os << "exp(" << scale_ << "x)"; break;
      case Kind::log: os << "log"; break;
      case Kind::power: os << "x^" << alpha_; break;
      case Kind::complex_power: os << "x^(" << z_.real() << "+" << z_.imag() << "i)"; break;
      case Kind::polynomial: {
        os << "(";
        for (std::size_t l = 0; l < coeffs_.size(); ++l) os << (l ? "," : "") << coeffs_[l];
        os << ")^" << alpha_;
        break;
      }
      case Kind::shifted_relu: os << "max(x+" << shift_ << ",0)"; break;
    }
    return os.str();
  }

 private:
  explicit FnSpec(Kind k) : kind_(k) {}

  DomainError domain_error(double x) const {
    std::ostringstream os;
    os << describe() << " undefined at eigenvalue " << x;
    return DomainError(os.str());
  }

  Kind kind_;
  double scale_ = 1.0;
  double alpha_ = 1.0;
  double guard_ = 0.0;
  Complex z_{};
  double shift_ = 0.0;
  std::vector<double> coeffs_;
};

// Block-wise Hermitian functional calculus: B_i = U_i L_i U_i^H maps to
// U_i f(L_i) U_i^H. Domain errors name the offending block and eigenvalue.
inline BlockSpectrum apply_fn(const BlockSpectrum& s, const FnSpec& f) {
  const BlockSpectrum h = symmetrize(s);
  std::vector<BlockMatrix> out(h.p());
  for (std::size_t i = 0; i < h.p(); ++i) {
    const BlockEig e = hermitian_eig(h.block(i));
    Eigen::VectorXcd mapped(e.values.size());
    for (Eigen::Index j = 0; j < e.values.size(); ++j) {
      try {
        mapped(j) = f.evaluate_complex(e.values(j));
      } catch (const DomainError& err) {
        std::ostringstream os;
        os << err.what() << " (block " << i << ", rank " << j << ")";
        throw DomainError(os.str());
      }
    }
    out[i] = e.vectors * mapped.asDiagonal() * e.vectors.adjoint();
  }
  return BlockSpectrum(std::move(out), h.real_source() && !f.is_complex());
}

inline TTensor tensor_fn(const TTensor& t, const FnSpec& f) { return from_spectrum(apply_fn(to_spectrum(t), f)); }

// Integer matrix power per block by repeated squaring (any square spectrum).
inline BlockSpectrum spectrum_power(const BlockSpectrum& s, unsigned long long q) {
  std::vector<BlockMatrix> out(s.p());
  for (std::size_t i = 0; i < s.p(); ++i) {
    BlockMatrix base = s.block(i);
    BlockMatrix acc = BlockMatrix::Identity(base.rows(), base.cols());
    for (unsigned long long e = q; e > 0; e >>= 1) {
      if (e & 1ULL) acc = acc * base;
      if (e > 1) base = base * base;
    }
    out[i] = std::move(acc);
  }
  return BlockSpectrum(std::move(out), s.real_source());
}

// ----------------------------------------------------------------------------
// Trace, determinant, ordering

// Sum of the f-diagonal entries over all frontal slices.
inline Complex trace(const TTensor& t) {
  if (!t.is_square()) throw ShapeError("trace: slices must be square");
  Complex s{};
  for (std::size_t k = 0; k < t.slices(); ++k)
    for (std::size_t i = 0; i < t.rows(); ++i) s += t(i, i, k);
  return s;
}

// Sum of all T-eigenvalues, i.e. the sum of block traces. Equals
// p * tr(C^(1)) for every square tensor.
inline Complex spectral_trace(const BlockSpectrum& s) {
  Complex acc{};
  for (const auto& b : s.blocks()) acc += b.trace();
  return acc;
}

inline Complex spectral_trace(const TTensor& t) { return spectral_trace(to_spectrum(t)); }

// Product of all m*p T-eigenvalues of a symmetric tensor.
inline double det(const TTensor& t) {
  const TEigenSystem e = t_eigenvalues(t);
  double d = 1.0;
  for (const auto& entry : e.entries()) d *= entry.value;
  return d;
}

// Product of block determinants; defined for any square tensor and equal to
// det() on symmetric ones.
inline Complex block_det(const BlockSpectrum& s) {
  Complex d(1.0, 0.0);
  for (const auto& b : s.blocks()) d *= b.determinant();
  return d;
}

inline Complex block_det(const TTensor& t) { return block_det(to_spectrum(t)); }

enum class LoewnerOrder { a_dominates, b_dominates, incomparable };

inline const char* to_string(LoewnerOrder o) {
  switch (o) {
    case LoewnerOrder::a_dominates: return "A>=B";
    case LoewnerOrder::b_dominates: return "B>=A";
    case LoewnerOrder::incomparable: return "incomparable";
  }
  return "?";
}

struct LoewnerResult {
  LoewnerOrder order;
  double min_eig;  // lambda_min(A - B)
  double max_eig;  // lambda_max(A - B)
  double scale;
};

inline LoewnerResult loewner_compare(const BlockSpectrum& a, const BlockSpectrum& b, double tol = 1e-9) {
  if (!a.same_shape(b)) throw ShapeError("loewner_cmp: shape mismatch");
  const TEigenSystem ea = t_eigenvalues(a);
  const TEigenSystem eb = t_eigenvalues(b);
  const TEigenSystem diff = t_eigenvalues(a - b);
  const double scale = std::max({1.0, std::abs(ea.max()), std::abs(ea.min()), std::abs(eb.max()), std::abs(eb.min())});
  LoewnerResult r{LoewnerOrder::incomparable, diff.min(), diff.max(), scale};
  if (diff.min() >= -tol * scale) {
    r.order = LoewnerOrder::a_dominates;
  } else if (diff.max() <= tol * scale) {
    r.order = LoewnerOrder::b_dominates;
  }
  return r;
}

inline LoewnerOrder loewner_cmp(const TTensor& a, const TTensor& b, double tol = 1e-9) {
  return loewner_compare(to_spectrum(a), to_spectrum(b), tol).order;
}

inline bool is_tpsd(const TTensor& t, double tol = 1e-9) {
  const TEigenSystem e = t_eigenvalues(t);
  return e.min() >= -tol * std::max(1.0, std::abs(e.max()));
}

inline bool is_tpd(const TTensor& t, double threshold = 0.0) { return t_eigenvalues(t).min() > threshold; }

// ----------------------------------------------------------------------------
// Symmetric factorization C = U^T * D * U

struct SymFactorization {
  TTensor u;  // orthogonal: transpose(U) * U = I
  TTensor d;  // f-diagonal, block diagonals are the T-eigenvalues
};

// For real tensors the eigenvectors are chosen conjugate-symmetric across
// frequency blocks (real for the self-conjugate blocks), which makes U and D
// real.
inline SymFactorization sym_factorize(const TTensor& t) {
  const BlockSpectrum s = hermitian_spectrum(t);
  const std::size_t p = s.p();
  std::vector<BlockMatrix> u_blocks(p), d_blocks(p);
  std::vector<bool> done(p, false);
  for (std::size_t j = 0; j < p; ++j) {
    if (done[j]) continue;
    const std::size_t mirror = (p - j) % p;
    BlockEig e;
    if (t.is_real() && mirror == j) {
      const Eigen::MatrixXd real_block = s.block(j).real();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(real_block);
      if (solver.info() != Eigen::Success) throw NumericError("sym_factorize: eigensolver did not converge");
      const Eigen::Index n = real_block.rows();
      e.values.resize(n);
      e.vectors.resize(n, n);
      for (Eigen::Index c = 0; c < n; ++c) {
        e.values(c) = solver.eigenvalues()(n - 1 - c);
        e.vectors.col(c) = solver.eigenvectors().col(n - 1 - c).cast<Complex>();
      }
    } else {
      e = hermitian_eig(s.block(j));
    }
    u_blocks[j] = e.vectors.adjoint();
    d_blocks[j] = e.values.cast<Complex>().asDiagonal();
    done[j] = true;
    if (t.is_real() && mirror != j) {
      u_blocks[mirror] = u_blocks[j].conjugate();
      d_blocks[mirror] = d_blocks[j];
      done[mirror] = true;
    }
  }
  double dscale = 0.0;
  for (const auto& b : d_blocks) dscale = std::max(dscale, b.cwiseAbs().maxCoeff());
  return {tensor_from_blocks(u_blocks, t.is_real(), 1.0, "sym_factorize"),
          tensor_from_blocks(d_blocks, t.is_real(), dscale, "sym_factorize")};
}

// ----------------------------------------------------------------------------
// Courant-Fischer index bookkeeping

struct TildeK {
  double value;         // min over blocks of lambda_{i, k_i}
  std::size_t k_tilde;  // 1-based position of that value in the global descending order
  std::size_t i_tilde;  // 0-based block attaining the minimum (smallest such block)
};

// k_per_block holds 1-based counts k_i in [1, m], one per frequency block.
inline TildeK tilde_k(const TEigenSystem& e, std::span<const std::size_t> k_per_block) {
  if (k_per_block.size() != e.p()) throw ParameterError("tilde_k: need one k_i per block");
  TildeK r{0.0, 0, 0};
  bool first = true;
  for (std::size_t i = 0; i < e.p(); ++i) {
    const std::size_t k = k_per_block[i];
    if (k < 1 || k > e.m()) throw ParameterError("tilde_k: k_i out of range [1, m]");
    const double v = e.at(i, k - 1);
    if (first || v < r.value) {
      r.value = v;
      r.i_tilde = i;
      first = false;
    }
  }
  const auto& entries = e.entries();
  for (std::size_t pos = 0; pos < entries.size(); ++pos) {
    if (entries[pos].value == r.value) {
      r.k_tilde = pos + 1;
      break;
    }
  }
  return r;
}

}  // namespace tprod
