#pragma once

// Shared generators and dense oracles for the test binaries. Oracles work on
// the explicit mp x mp block-circulant matrix and never call the library's
// frequency-domain code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tprod/tensor.hpp"

namespace tprod::testing {

using Rng = std::mt19937_64;

inline TTensor random_tensor(Rng& rng, std::size_t m, std::size_t n, std::size_t p, Field field = Field::real) {
  std::normal_distribution<double> nd;
  return TTensor::generate(m, n, p, field, [&](std::size_t, std::size_t, std::size_t) {
    const double re = nd(rng);
    const double im = field == Field::complex ? nd(rng) : 0.0;
    return Complex(re, im);
  });
}

// Real symmetric in the T-product sense: (C + C^T)/2 with the slice-reversing
// transpose, built by hand from the bcirc definition.
inline TTensor random_symmetric(Rng& rng, std::size_t m, std::size_t p) {
  const TTensor g = random_tensor(rng, m, m, p);
  return TTensor::generate(m, m, p, Field::real, [&](std::size_t i, std::size_t j, std::size_t k) {
    return 0.5 * (g(i, j, k) + g(j, i, (p - k) % p));
  });
}

// TPD tensor: G^T * G + shift * I computed through bcirc, then read back.
inline TTensor random_tpd(Rng& rng, std::size_t m, std::size_t p, double shift = 0.1) {
  const TTensor g = random_tensor(rng, m, m, p);
  const BlockMatrix b = bcirc(g);
  const BlockMatrix s = b.adjoint() * b + shift * BlockMatrix::Identity(b.rows(), b.cols());
  return TTensor::generate(m, m, p, Field::real, [&](std::size_t i, std::size_t j, std::size_t k) {
    return s(static_cast<Eigen::Index>(k * m + i), static_cast<Eigen::Index>(j)).real();
  });
}

inline std::vector<double> sorted_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

inline std::vector<double> dense_eigenvalues(const BlockMatrix& h) {
  Eigen::SelfAdjointEigenSolver<BlockMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return sorted_desc(v);
}

inline std::vector<double> dense_singular_values(const BlockMatrix& a) {
  Eigen::JacobiSVD<BlockMatrix> svd(a);
  std::vector<double> v(svd.singularValues().data(), svd.singularValues().data() + svd.singularValues().size());
  return sorted_desc(v);
}

// Naive O(p^2) DFT along tubes: the j-th block is sum_k C^(k) e^{-2 pi i jk/p}.
inline std::vector<BlockMatrix> naive_blocks(const TTensor& t) {
  const std::size_t p = t.slices();
  std::vector<BlockMatrix> out(p, BlockMatrix::Zero(static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())));
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < p; ++k) {
      const double ang = -2.0 * M_PI * static_cast<double>(j * k) / static_cast<double>(p);
      out[j] += std::polar(1.0, ang) * t.slice(k);
    }
  return out;
}

inline double max_abs_diff(const BlockMatrix& a, const BlockMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline double max_abs_diff(const TTensor& a, const TTensor& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
  return d;
}

inline double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 1.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d / scale;
}

inline bool near_vectors(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  return a.size() == b.size() && max_rel_diff(a, b) <= tol;
}

}  // namespace tprod::testing
