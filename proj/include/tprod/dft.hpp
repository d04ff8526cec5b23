#pragma once

// Discrete Fourier transform along the tube (third) dimension.
//
// Forward convention:  X_j = sum_k x_k exp(-2 pi i j k / p)
// Inverse convention:  x_k = (1/p) sum_j X_j exp(+2 pi i j k / p)
//
// With this convention the j-th spectrum block of a tensor is the j-th
// diagonal block of (F_p (x) I_m) bcirc(T) (F_p (x) I_m)^H.

#include <complex>
#include <cstddef>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace tprod {

using Complex = std::complex<double>;

namespace detail {

// Transform `count` interleaved tubes of length p in place. Tube t occupies
// data[t + k*count] for k = 0..p-1 (slice-major storage).
inline void transform_tubes(std::vector<Complex>& data, std::size_t count, std::size_t p, bool inverse) {
  if (p == 1) return;
  Eigen::FFT<double> fft;
  std::vector<Complex> in(p), out(p);
  for (std::size_t t = 0; t < count; ++t) {
    for (std::size_t k = 0; k < p; ++k) in[k] = data[t + k * count];
    if (inverse) {
      fft.inv(out, in);
    } else {
      fft.fwd(out, in);
    }
    for (std::size_t k = 0; k < p; ++k) data[t + k * count] = out[k];
  }
}

}  // namespace detail

inline void forward_tubes(std::vector<Complex>& data, std::size_t count, std::size_t p) {
  detail::transform_tubes(data, count, p, false);
}

inline void inverse_tubes(std::vector<Complex>& data, std::size_t count, std::size_t p) {
  detail::transform_tubes(data, count, p, true);
}

}  // namespace tprod
