#pragma once

// Unitarily invariant norms: a symmetric gauge function applied to the sorted
// T-singular values, which are computed from the frequency blocks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tprod/check_report.hpp"
#include "tprod/errors.hpp"
#include "tprod/spectral.hpp"
#include "tprod/tensor.hpp"

namespace tprod {

class GaugeSpec {
 public:
  enum class Kind { ky_fan, schatten, spectral, trace_norm, custom };
  using GaugeFn = std::function<double(std::span<const double>)>;

  static GaugeSpec ky_fan(std::size_t k) {
    if (k < 1) throw ParameterError("ky_fan: k must be >= 1");
    GaugeSpec g(Kind::ky_fan);
    g.k_ = k;
    return g;
  }

  static GaugeSpec schatten(double q) {
    if (!(q >= 1.0) || !std::isfinite(q)) throw ParameterError("schatten: q must be a finite number >= 1");
    GaugeSpec g(Kind::schatten);
    g.q_ = q;
    return g;
  }

  static GaugeSpec spectral() { return GaugeSpec(Kind::spectral); }
  static GaugeSpec trace_norm() { return GaugeSpec(Kind::trace_norm); }

  // `fn` must accept arbitrary real vectors; norms only ever pass it
  // nonnegative values sorted descending. Registration probes permutation
  // invariance and absolute homogeneity on random vectors and rejects a
  // callback that fails either.
  static GaugeSpec custom(std::string name, GaugeFn fn, double tol = 1e-9) {
    if (!fn) throw ParameterError("custom gauge: empty callback");
    GaugeSpec g(Kind::custom);
    g.name_ = std::move(name);
    g.fn_ = std::make_shared<GaugeFn>(std::move(fn));
    g.validate_custom(tol);
    return g;
  }

  // "kyfan:k", "schatten:q", "spectral", "trace".
  static GaugeSpec parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? std::string() : text.substr(colon + 1);
    auto number = [&](const char* what) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(arg, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (arg.empty() || used != arg.size()) throw ParameterError(std::string("gauge '") + text + "': bad " + what);
      return v;
    };
    if (head == "kyfan") {
      const double k = number("k");
      if (k < 1 || std::floor(k) != k) throw ParameterError("gauge '" + text + "': k must be a positive integer");
      return ky_fan(static_cast<std::size_t>(k));
    }
    if (head == "schatten") return schatten(number("q"));
    if (colon == std::string::npos && head == "spectral") return spectral();
    if (colon == std::string::npos && head == "trace") return trace_norm();
    throw ParameterError("unknown gauge '" + text + "' (expected kyfan:k, schatten:q, spectral, trace)");
  }

  Kind kind() const noexcept { return kind_; }
  std::size_t k() const noexcept { return k_; }
  double q() const noexcept { return q_; }

  std::string describe() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::ky_fan: os << "kyfan:" << k_; break;
      case Kind::schatten: os << "schatten:" << q_; break;
      case Kind::spectral: os << "spectral"; break;
      case Kind::trace_norm: os << "trace"; break;
      case Kind::custom: os << "custom:" << name_; break;
    }
    return os.str();
  }

  // rho(x) for any real vector (absolute values are taken and sorted).
  double operator()(std::span<const double> x) const {
    std::vector<double> v(x.size());
    std::transform(x.begin(), x.end(), v.begin(), [](double a) { return std::abs(a); });
    std::sort(v.begin(), v.end(), std::greater<>());
    return apply_sorted(v);
  }

  // rho on values already nonnegative and sorted descending.
  double apply_sorted(std::span<const double> v) const {
    switch (kind_) {
      case Kind::ky_fan: {
        if (k_ > v.size()) {
          std::ostringstream os;
          os << "ky_fan: k = " << k_ << " exceeds the number of singular values " << v.size();
          throw ParameterError(os.str());
        }
        double s = 0.0;
        for (std::size_t i = 0; i < k_; ++i) s += v[i];
        return s;
      }
      case Kind::schatten: {
        if (v.empty() || v.front() == 0.0) return 0.0;
        const double top = v.front();
        double s = 0.0;
        for (double a : v) s += std::pow(a / top, q_);
        return top * std::pow(s, 1.0 / q_);
      }
      case Kind::spectral:
        return v.empty() ? 0.0 : v.front();
      case Kind::trace_norm:
        return std::accumulate(v.begin(), v.end(), 0.0);
      case Kind::custom:
        return (*fn_)(v);
    }
    return 0.0;
  }

 private:
  explicit GaugeSpec(Kind k) : kind_(k) {}

  void validate_custom(double tol) const {
    std::mt19937_64 rng(0x6a09e667f3bcc908ULL);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 32; ++trial) {
      const std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
      std::vector<double> x(n);
      for (auto& a : x) a = nd(rng);
      std::vector<double> shuffled = x;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const double base = (*this)(x);
      const double perm = evaluate_raw(shuffled);
      const double raw = evaluate_raw(x);
      const double c = nd(rng) * 3.0;
      std::vector<double> scaled(n);
      std::transform(x.begin(), x.end(), scaled.begin(), [c](double a) { return c * a; });
      const double hom = evaluate_raw(scaled);
      const double scale = std::max(1.0, std::abs(base));
      if (!std::isfinite(base) || base < 0.0) throw ParameterError("custom gauge '" + name_ + "': must be finite and nonnegative");
      if (std::abs(perm - raw) > tol * scale)
        throw ParameterError("custom gauge '" + name_ + "': not permutation invariant");
      if (std::abs(hom - std::abs(c) * raw) > tol * scale * std::max(1.0, std::abs(c)))
        throw ParameterError("custom gauge '" + name_ + "': not absolutely homogeneous");
    }
  }

  // Callback on the raw vector, without the sort/abs normalization, which is
  // what the invariance probes need to observe.
  double evaluate_raw(const std::vector<double>& x) const { return (*fn_)(x); }

  Kind kind_;
  std::size_t k_ = 1;
  double q_ = 2.0;
  std::string name_;
  std::shared_ptr<GaugeFn> fn_;
};

inline double gauge_norm(const BlockSpectrum& s, const GaugeSpec& g) {
  return g.apply_sorted(t_singular_values(s).values());
}

inline double gauge_norm(const TTensor& t, const GaugeSpec& g) {
  if (!t.is_square()) throw ShapeError("gauge_norm: slices must be square");
  return gauge_norm(to_spectrum(t), g);
}

// || |T|^s ||_g: the gauge of the T-singular values raised to s.
inline double gauge_norm_abs_power(const BlockSpectrum& s, double power, const GaugeSpec& g) {
  std::vector<double> v = t_singular_values(s).values();
  for (double& a : v) a = std::pow(a, power);
  return g.apply_sorted(v);
}

inline double gauge_norm_abs_power(const TTensor& t, double power, const GaugeSpec& g) {
  return gauge_norm_abs_power(to_spectrum(t), power, g);
}

// Max entry deviation of U^H * U from the identity.
inline double orthogonality_defect(const TTensor& u) {
  const TTensor prod = tprod(htranspose(u), u);
  const TTensor id = identity(u.rows(), u.slices());
  double d = 0.0;
  for (std::size_t i = 0; i < prod.size(); ++i) d = std::max(d, std::abs(prod.data()[i] - id.data()[i]));
  return d;
}

// |‖U*T‖ - ‖T‖| and |‖T*U‖ - ‖T‖| against 1e-8 ‖T‖.
inline CheckReport unitary_invariance_check(const TTensor& t, const TTensor& u, const GaugeSpec& g) {
  if (!u.is_square() || u.rows() != t.rows() || u.slices() != t.slices() || !t.is_square())
    throw ShapeError("unitary_invariance_check: U must be m x m x p matching T");
  const double defect = orthogonality_defect(u);
  if (defect > 1e-9) {
    std::ostringstream os;
    os << "unitary_invariance_check: U is not orthogonal (defect " << defect << ")";
    throw PreconditionError(os.str());
  }
  CheckReport r("unitary-invariance:" + g.describe(), 1e-8);
  const double base = gauge_norm(t, g);
  const double left = gauge_norm(tprod(u, t), g);
  const double right = gauge_norm(tprod(t, u), g);
  const double scale = std::max(1.0, base);
  for (auto [label, value] : {std::pair<const char*, double>{"left", left}, {"right", right}}) {
    r.record(-std::abs(value - base) / scale, [&, label = label, value = value] {
      return nlohmann::json{{"side", label}, {"norm", value}, {"reference", base}};
    });
  }
  return r;
}

// rho(b_1^a_1 .. b_n^a_n entrywise) <= prod rho(b_i)^a_i.
inline CheckReport holder_gauge_check(const std::vector<std::vector<double>>& vectors, std::span<const double> weights,
                                      const GaugeSpec& g, double tol = kDefaultCheckTol) {
  if (vectors.empty() || vectors.size() != weights.size())
    throw ParameterError("holder_gauge_check: need one weight per vector");
  double wsum = 0.0;
  for (double a : weights) {
    if (!(a > 0.0)) throw ParameterError("holder_gauge_check: weights must be positive");
    wsum += a;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw ParameterError("holder_gauge_check: weights must sum to 1");
  const std::size_t len = vectors.front().size();
  for (const auto& b : vectors) {
    if (b.size() != len) throw ShapeError("holder_gauge_check: vectors differ in length");
    for (double x : b)
      if (!(x >= 0.0)) throw ParameterError("holder_gauge_check: entries must be nonnegative");
  }
  std::vector<double> prod(len, 1.0);
  double rhs_log = 0.0;
  bool rhs_zero = false;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = 0; j < len; ++j) prod[j] *= std::pow(vectors[i][j], weights[i]);
    const double rho = g(vectors[i]);
    if (rho == 0.0) rhs_zero = true;
    else rhs_log += weights[i] * std::log(rho);
  }
  const double lhs = g(prod);
  const double rhs = rhs_zero ? 0.0 : std::exp(rhs_log);
  CheckReport r("holder-gauge:" + g.describe(), tol);
  r.record_sides(lhs, rhs, 0.0, [&] { return nlohmann::json{{"vectors", vectors}, {"weights", std::vector<double>(weights.begin(), weights.end())}}; });
  return r;
}

}  // namespace tprod
