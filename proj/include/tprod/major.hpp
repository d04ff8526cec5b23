#pragma once

// Majorization predicates. majorizes(x, y, mode) checks x ≺ y: the prefix
// sums of x (sorted descending) never exceed those of y. Log modes compare
// prefix sums of logarithms with log 0 = -inf.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tprod/check_report.hpp"
#include "tprod/errors.hpp"

namespace tprod {

class SpectrumVec {
 public:
  SpectrumVec() = default;
  explicit SpectrumVec(std::vector<double> v) : values_(std::move(v)) {
    std::sort(values_.begin(), values_.end(), std::greater<>());
  }
  SpectrumVec(std::initializer_list<double> v) : SpectrumVec(std::vector<double>(v)) {}

  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  template <typename F>
  SpectrumVec map(F&& f) const {
    std::vector<double> out(values_.size());
    std::transform(values_.begin(), values_.end(), out.begin(), f);
    return SpectrumVec(std::move(out));
  }

 private:
  std::vector<double> values_;
};

enum class MajorMode { weak, strong, weak_log, log };

inline const char* to_string(MajorMode m) {
  switch (m) {
    case MajorMode::weak: return "weak";
    case MajorMode::strong: return "strong";
    case MajorMode::weak_log: return "weak_log";
    case MajorMode::log: return "log";
  }
  return "?";
}

namespace detail {

// Per-prefix margin with the -inf convention: -inf on the left always passes.
inline double prefix_margin(double left, double right) {
  if (left == right) return 0.0;
  if (left == -std::numeric_limits<double>::infinity()) return std::numeric_limits<double>::infinity();
  if (right == -std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
  return (right - left) / std::max(1.0, std::abs(right));
}

}  // namespace detail

inline CheckReport majorizes(const SpectrumVec& x, const SpectrumVec& y, MajorMode mode, double tol = kDefaultCheckTol) {
  if (x.size() != y.size()) throw ShapeError("majorizes: vectors differ in length");
  if (x.size() == 0) throw ShapeError("majorizes: empty vectors");
  const bool log_mode = mode == MajorMode::weak_log || mode == MajorMode::log;
  if (log_mode) {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < 0.0 || y[i] < 0.0) throw DomainError("majorizes: log modes require nonnegative entries");
  }
  auto term = [log_mode](double v) { return log_mode ? (v == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(v)) : v; };

  CheckReport r(std::string("majorization:") + to_string(mode), tol);
  double sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += term(x[k]);
    sy += term(y[k]);
    const double margin = detail::prefix_margin(sx, sy);
    r.record(margin, [&] { return nlohmann::json{{"prefix", k + 1}, {"lhs", sx}, {"rhs", sy}}; });
  }
  if (mode == MajorMode::strong || mode == MajorMode::log) {
    const double gap =
        sx == sy ? 0.0 : -std::abs(sx - sy) / std::max(1.0, std::abs(sy));  // equal infinities give 0
    r.record(std::isnan(gap) ? -std::numeric_limits<double>::infinity() : gap,
             [&] { return nlohmann::json{{"prefix", "total"}, {"lhs", sx}, {"rhs", sy}}; });
  }
  return r;
}

inline CheckReport majorizes(std::span<const double> x, std::span<const double> y, MajorMode mode,
                             double tol = kDefaultCheckTol) {
  return majorizes(SpectrumVec(std::vector<double>(x.begin(), x.end())), SpectrumVec(std::vector<double>(y.begin(), y.end())),
                   mode, tol);
}

}  // namespace tprod
