#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

namespace tprod {

// Default verdict tolerance: 1e-9 absolute plus 1e-9 relative.
inline constexpr double kDefaultCheckTol = 1e-9;

// Outcome of a numerical inequality check LHS <= RHS over many trials.
//
// Each trial contributes the margin (RHS + allowance - LHS) / max(1, |RHS|),
// so a tolerance on the margin is an absolute-plus-relative tolerance on the
// raw sides. A trial passes iff its margin >= -tol; the report passes iff the
// worst margin does.
struct CheckReport {
  std::string name;
  std::size_t trials = 0;
  std::size_t passes = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  nlohmann::json witness = nlohmann::json::object();
  double tol = kDefaultCheckTol;

  CheckReport() = default;
  CheckReport(std::string n, double t) : name(std::move(n)), tol(t) {}

  bool passed() const noexcept { return trials > 0 && worst_margin >= -tol; }

  static double scaled_margin(double lhs, double rhs, double allowance = 0.0) {
    if (std::isnan(lhs) || std::isnan(rhs)) return -std::numeric_limits<double>::infinity();
    if (lhs == rhs) return 0.0;  // also covers matching infinities
    return (rhs + allowance - lhs) / std::max(1.0, std::abs(rhs));
  }

  // Record one trial. `make_witness` is only invoked when the trial becomes
  // the new worst case.
  template <typename WitnessFn>
  double record(double margin, WitnessFn&& make_witness) {
    ++trials;
    if (margin >= -tol) ++passes;
    if (margin < worst_margin || trials == 1) {
      worst_margin = margin;
      witness = make_witness();
    }
    return margin;
  }

  double record(double margin) {
    return record(margin, [] { return nlohmann::json::object(); });
  }

  double record_sides(double lhs, double rhs, double allowance = 0.0) {
    return record(scaled_margin(lhs, rhs, allowance), [&] {
      return nlohmann::json{{"lhs", lhs}, {"rhs", rhs}, {"allowance", allowance}};
    });
  }

  template <typename WitnessFn>
  double record_sides(double lhs, double rhs, double allowance, WitnessFn&& extra) {
    return record(scaled_margin(lhs, rhs, allowance), [&] {
      nlohmann::json w = extra();
      w["lhs"] = lhs;
      w["rhs"] = rhs;
      w["allowance"] = allowance;
      return w;
    });
  }

  // Fold another report into this one (sub-checks of a suite).
  void merge(const CheckReport& other) {
    if (other.trials == 0) return;
    const bool worse = trials == 0 || other.worst_margin < worst_margin;
    trials += other.trials;
    passes += other.passes;
    if (worse) {
      worst_margin = other.worst_margin;
      witness = other.witness;
      if (!other.name.empty() && other.name != name) witness["subcheck"] = other.name;
    }
  }
};

inline nlohmann::json to_json(const CheckReport& r) {
  return nlohmann::json{{"name", r.name},
                        {"trials", r.trials},
                        {"passes", r.passes},
                        {"worst_margin", std::isfinite(r.worst_margin) ? nlohmann::json(r.worst_margin) : nlohmann::json(nullptr)},
                        {"tol", r.tol},
                        {"passed", r.passed()},
                        {"witness", r.witness}};
}

}  // namespace tprod
