#pragma once

// Dense third-order tensors and the spatial-domain T-product algebra.
//
// A TTensor of size m x n x p is a stack of p frontal slices C^(1..p), each an
// m x n matrix. Storage is slice-major, row-major within a slice, which is
// also the element order of the "ttj" file format.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tprod/dft.hpp"
#include "tprod/diagnostics.hpp"
#include "tprod/errors.hpp"

namespace tprod {

using Complex = std::complex<double>;
using BlockMatrix = Eigen::MatrixXcd;

enum class Field { real, complex };

inline const char* to_string(Field f) { return f == Field::real ? "real" : "complex"; }

// Upper bound on the number of entries bcirc() may materialize.
inline constexpr std::size_t kDefaultElementBudget = std::size_t{1} << 26;

// Imaginary residue (relative to the input scale) tolerated when an operation
// on real-tagged inputs is mapped back from the frequency domain.
inline constexpr double kRealResidueTol = 1e-10;

class TTensor {
 public:
  TTensor() : TTensor(1, 1, 1) {}

  TTensor(std::size_t m, std::size_t n, std::size_t p, Field field = Field::real)
      : m_(m), n_(n), p_(p), field_(field), data_(checked_count(m, n, p), Complex{}) {}

  static TTensor zeros(std::size_t m, std::size_t n, std::size_t p, Field field = Field::real) {
    return TTensor(m, n, p, field);
  }

  static TTensor from_real(std::size_t m, std::size_t n, std::size_t p, std::span<const double> values) {
    TTensor t(m, n, p, Field::real);
    if (values.size() != t.data_.size()) throw ShapeError("from_real: entry count does not match m*n*p");
    std::transform(values.begin(), values.end(), t.data_.begin(), [](double v) { return Complex(v, 0.0); });
    t.check_finite();
    return t;
  }

  // A real tag requires exactly zero imaginary parts.
  static TTensor from_complex(std::size_t m, std::size_t n, std::size_t p, std::vector<Complex> values,
                              Field field = Field::complex) {
    TTensor t(m, n, p, field);
    if (values.size() != t.data_.size()) throw ShapeError("from_complex: entry count does not match m*n*p");
    t.data_ = std::move(values);
    if (field == Field::real) {
      for (const auto& v : t.data_)
        if (v.imag() != 0.0) throw ParameterError("from_complex: real-tagged tensor has a nonzero imaginary part");
    }
    t.check_finite();
    return t;
  }

  // Build entrywise from fn(i, j, k) -> Complex (or anything convertible).
  template <typename Fn>
  static TTensor generate(std::size_t m, std::size_t n, std::size_t p, Field field, Fn&& fn) {
    TTensor t(m, n, p, field);
    for (std::size_t k = 0; k < p; ++k)
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          Complex v = static_cast<Complex>(fn(i, j, k));
          if (field == Field::real) v.imag(0.0);
          t.data_[t.index(i, j, k)] = v;
        }
    t.check_finite();
    return t;
  }

  static TTensor from_slices(const std::vector<BlockMatrix>& slices, Field field) {
    if (slices.empty()) throw ShapeError("from_slices: need at least one slice");
    const auto m = static_cast<std::size_t>(slices.front().rows());
    const auto n = static_cast<std::size_t>(slices.front().cols());
    for (const auto& s : slices)
      if (static_cast<std::size_t>(s.rows()) != m || static_cast<std::size_t>(s.cols()) != n)
        throw ShapeError("from_slices: slices differ in size");
    return generate(m, n, slices.size(), field, [&](std::size_t i, std::size_t j, std::size_t k) {
      return slices[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    });
  }

  std::size_t rows() const noexcept { return m_; }
  std::size_t cols() const noexcept { return n_; }
  std::size_t slices() const noexcept { return p_; }
  std::size_t size() const noexcept { return data_.size(); }
  Field field() const noexcept { return field_; }
  bool is_real() const noexcept { return field_ == Field::real; }
  bool is_square() const noexcept { return m_ == n_; }

  const Complex& operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_[index(i, j, k)]; }

  std::span<const Complex> data() const noexcept { return data_; }

  BlockMatrix slice(std::size_t k) const {
    BlockMatrix s(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*this)(i, j, k);
    return s;
  }

  double max_abs() const noexcept {
    double r = 0.0;
    for (const auto& v : data_) r = std::max(r, std::abs(v));
    return r;
  }

  double frobenius_norm() const noexcept {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  bool same_shape(const TTensor& o) const noexcept { return m_ == o.m_ && n_ == o.n_ && p_ == o.p_; }

  std::string shape_string() const {
    std::ostringstream os;
    os << m_ << "x" << n_ << "x" << p_;
    return os.str();
  }

  TTensor operator-() const { return scaled(Complex(-1.0, 0.0), field_); }

  friend TTensor operator+(const TTensor& a, const TTensor& b) { return a.combine(b, 1.0, "operator+"); }
  friend TTensor operator-(const TTensor& a, const TTensor& b) { return a.combine(b, -1.0, "operator-"); }
  friend TTensor operator*(double s, const TTensor& a) { return a.scaled(Complex(s, 0.0), a.field_); }
  friend TTensor operator*(const TTensor& a, double s) { return s * a; }
  friend TTensor operator*(Complex s, const TTensor& a) {
    return a.scaled(s, (a.is_real() && s.imag() == 0.0) ? Field::real : Field::complex);
  }

  // Exact equality including the field tag.
  friend bool operator==(const TTensor& a, const TTensor& b) {
    return a.same_shape(b) && a.field_ == b.field_ && a.data_ == b.data_;
  }

 private:
  static std::size_t checked_count(std::size_t m, std::size_t n, std::size_t p) {
    if (m == 0 || n == 0 || p == 0) throw ShapeError("TTensor: dimensions must be positive");
    return m * n * p;
  }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept { return (k * m_ + i) * n_ + j; }

  void check_finite() const {
    for (const auto& v : data_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericError("TTensor: non-finite entry");
  }

  TTensor scaled(Complex s, Field field) const {
    TTensor t(m_, n_, p_, field);
    for (std::size_t i = 0; i < data_.size(); ++i) t.data_[i] = s * data_[i];
    t.check_finite();
    return t;
  }

  TTensor combine(const TTensor& b, double sign, const char* op) const {
    if (!same_shape(b)) throw ShapeError(std::string(op) + ": shape mismatch " + shape_string() + " vs " + b.shape_string());
    TTensor t(m_, n_, p_, (is_real() && b.is_real()) ? Field::real : Field::complex);
    for (std::size_t i = 0; i < data_.size(); ++i) t.data_[i] = data_[i] + sign * b.data_[i];
    return t;
  }

  friend TTensor finalize_from_frequency(std::size_t, std::size_t, std::size_t, std::vector<Complex>, bool, double,
                                         const char*);

  std::size_t m_, n_, p_;
  Field field_;
  std::vector<Complex> data_;
};

// Wrap inverse-DFT output as a tensor. When the result should be real, an
// imaginary residue up to kRealResidueTol * scale is dropped; above that the
// result stays complex and a warning is emitted.
inline TTensor finalize_from_frequency(std::size_t m, std::size_t n, std::size_t p, std::vector<Complex> data,
                                       bool want_real, double scale, const char* op) {
  TTensor t(m, n, p, Field::complex);
  if (want_real) {
    double residue = 0.0;
    for (const auto& v : data) residue = std::max(residue, std::abs(v.imag()));
    if (residue <= kRealResidueTol * std::max(scale, 1e-300)) {
      for (auto& v : data) v.imag(0.0);
      t.field_ = Field::real;
    } else {
      std::ostringstream os;
      os << op << ": imaginary residue " << residue << " exceeds tolerance; result promoted to complex";
      warn(os.str());
    }
  }
  t.data_ = std::move(data);
  t.check_finite();
  return t;
}

// Frequency blocks of an arbitrary (possibly rectangular) tensor: block j is
// the m x n matrix sum_k C^(k) exp(-2 pi i j k / p).
inline std::vector<BlockMatrix> frequency_blocks(const TTensor& t) {
  const std::size_t m = t.rows(), n = t.cols(), p = t.slices();
  std::vector<Complex> data(t.data().begin(), t.data().end());
  forward_tubes(data, m * n, p);
  std::vector<BlockMatrix> blocks(p, BlockMatrix(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)));
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        blocks[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = data[(k * m + i) * n + j];
  return blocks;
}

// Inverse of frequency_blocks().
inline TTensor tensor_from_blocks(const std::vector<BlockMatrix>& blocks, bool want_real, double scale,
                                  const char* op) {
  if (blocks.empty()) throw ShapeError(std::string(op) + ": no blocks");
  const auto m = static_cast<std::size_t>(blocks.front().rows());
  const auto n = static_cast<std::size_t>(blocks.front().cols());
  const std::size_t p = blocks.size();
  std::vector<Complex> data(m * n * p);
  for (std::size_t k = 0; k < p; ++k) {
    if (static_cast<std::size_t>(blocks[k].rows()) != m || static_cast<std::size_t>(blocks[k].cols()) != n)
      throw ShapeError(std::string(op) + ": blocks differ in size");
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        data[(k * m + i) * n + j] = blocks[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  inverse_tubes(data, m * n, p);
  return finalize_from_frequency(m, n, p, std::move(data), want_real, scale, op);
}

// mp x np block-circulant matrix: block (r, c) is C^((r - c) mod p).
inline BlockMatrix bcirc(const TTensor& t, std::size_t element_budget = kDefaultElementBudget) {
  const std::size_t m = t.rows(), n = t.cols(), p = t.slices();
  const double total = static_cast<double>(m * p) * static_cast<double>(n * p);
  if (total > static_cast<double>(element_budget)) throw ResourceError("bcirc: matrix exceeds the element budget");
  BlockMatrix out(static_cast<Eigen::Index>(m * p), static_cast<Eigen::Index>(n * p));
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < p; ++c) {
      const std::size_t k = (r + p - c) % p;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
          out(static_cast<Eigen::Index>(r * m + i), static_cast<Eigen::Index>(c * n + j)) = t(i, j, k);
    }
  return out;
}

namespace detail {
inline Field detect_field(const BlockMatrix& mat) {
  for (Eigen::Index c = 0; c < mat.cols(); ++c)
    for (Eigen::Index r = 0; r < mat.rows(); ++r)
      if (mat(r, c).imag() != 0.0) return Field::complex;
  return Field::real;
}
}  // namespace detail

// Recover the tensor from the first block column of a block-circulant matrix.
inline TTensor bcirc_inverse(const BlockMatrix& mat, std::size_t p) {
  if (p == 0 || mat.rows() % static_cast<Eigen::Index>(p) != 0 || mat.cols() % static_cast<Eigen::Index>(p) != 0)
    throw ShapeError("bcirc_inverse: matrix dimensions are not multiples of p");
  const auto m = static_cast<std::size_t>(mat.rows()) / p;
  const auto n = static_cast<std::size_t>(mat.cols()) / p;
  return TTensor::generate(m, n, p, detail::detect_field(mat), [&](std::size_t i, std::size_t j, std::size_t k) {
    return mat(static_cast<Eigen::Index>(k * m + i), static_cast<Eigen::Index>(j));
  });
}

// mp x n stack of frontal slices.
inline BlockMatrix unfold(const TTensor& t) {
  const std::size_t m = t.rows(), n = t.cols(), p = t.slices();
  BlockMatrix out(static_cast<Eigen::Index>(m * p), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out(static_cast<Eigen::Index>(k * m + i), static_cast<Eigen::Index>(j)) = t(i, j, k);
  return out;
}

inline TTensor fold(const BlockMatrix& mat, std::size_t m) {
  if (m == 0 || mat.rows() == 0 || mat.rows() % static_cast<Eigen::Index>(m) != 0)
    throw ShapeError("fold: row count is not a multiple of m");
  const auto p = static_cast<std::size_t>(mat.rows()) / m;
  const auto n = static_cast<std::size_t>(mat.cols());
  return TTensor::generate(m, n, p, detail::detect_field(mat), [&](std::size_t i, std::size_t j, std::size_t k) {
    return mat(static_cast<Eigen::Index>(k * m + i), static_cast<Eigen::Index>(j));
  });
}

// T-product C * D = fold(bcirc(C) unfold(D)), evaluated as slice-wise
// products of the frequency blocks.
inline TTensor tprod(const TTensor& c, const TTensor& d) {
  if (c.cols() != d.rows() || c.slices() != d.slices())
    throw ShapeError("tprod: incompatible shapes " + c.shape_string() + " and " + d.shape_string());
  auto cb = frequency_blocks(c);
  const auto db = frequency_blocks(d);
  for (std::size_t k = 0; k < cb.size(); ++k) cb[k] = cb[k] * db[k];
  const double scale = c.max_abs() * d.max_abs() * static_cast<double>(c.cols() * c.slices());
  return tensor_from_blocks(cb, c.is_real() && d.is_real(), scale, "tprod");
}

namespace detail {
inline TTensor transpose_impl(const TTensor& c, bool conjugate) {
  const std::size_t p = c.slices();
  return TTensor::generate(c.cols(), c.rows(), p, c.field(), [&](std::size_t i, std::size_t j, std::size_t k) {
    const Complex v = c(j, i, (p - k) % p);
    return conjugate ? std::conj(v) : v;
  });
}
}  // namespace detail

// bcirc(transpose(C)) == bcirc(C)^T.
inline TTensor transpose(const TTensor& c) { return detail::transpose_impl(c, false); }

// bcirc(htranspose(C)) == bcirc(C)^H.
inline TTensor htranspose(const TTensor& c) { return detail::transpose_impl(c, true); }

// bcirc(identity(m, p)) == I_{mp}.
inline TTensor identity(std::size_t m, std::size_t p) {
  return TTensor::generate(m, m, p, Field::real,
                           [](std::size_t i, std::size_t j, std::size_t k) { return (k == 0 && i == j) ? 1.0 : 0.0; });
}

inline Complex inner(const TTensor& c, const TTensor& d) {
  if (!c.same_shape(d)) throw ShapeError("inner: shape mismatch " + c.shape_string() + " vs " + d.shape_string());
  Complex s{};
  const auto cd = c.data();
  const auto dd = d.data();
  for (std::size_t i = 0; i < cd.size(); ++i) s += std::conj(cd[i]) * dd[i];
  return s;
}

// Hermitian in the T-product sense: htranspose(C) == C up to tol * scale.
inline bool is_symmetric(const TTensor& c, double tol = 1e-10) {
  if (!c.is_square()) return false;
  const TTensor h = htranspose(c);
  double diff = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) diff = std::max(diff, std::abs(h.data()[i] - c.data()[i]));
  return diff <= tol * std::max(1.0, c.max_abs());
}

// (C + C^H) / 2.
inline TTensor symmetric_part(const TTensor& c) {
  if (!c.is_square()) throw ShapeError("symmetric_part: slices must be square");
  return 0.5 * (c + htranspose(c));
}

}  // namespace tprod
