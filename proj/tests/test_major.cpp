#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tprod/major.hpp"

namespace tprod::testing {
namespace {

constexpr MajorMode kAllModes[] = {MajorMode::weak, MajorMode::strong, MajorMode::weak_log, MajorMode::log};

// Independent prefix-sum oracle for x ≺_w y.
bool weak_oracle(std::vector<double> x, std::vector<double> y) {
  std::sort(x.rbegin(), x.rend());
  std::sort(y.rbegin(), y.rend());
  double sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    if (sx > sy + 1e-12 * std::max(1.0, std::abs(sy))) return false;
  }
  return true;
}

// y = T x for a random T-transform (convex combination with a transposition)
// gives a pair with y ≺ x.
std::vector<double> t_transform(std::vector<double> x, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  for (int r = 0; r < 4; ++r) {
    const std::size_t i = pick(rng), j = pick(rng);
    const double l = lam(rng);
    const double xi = x[i], xj = x[j];
    x[i] = l * xi + (1 - l) * xj;
    x[j] = l * xj + (1 - l) * xi;
  }
  return x;
}

}  // namespace

TEST(Majorization, EqualVectorsPassEveryMode) {
  const SpectrumVec x{3.0, 1.0, 0.5};
  for (MajorMode m : kAllModes) {
    const CheckReport r = majorizes(x, x, m);
    EXPECT_TRUE(r.passed()) << to_string(m);
    EXPECT_EQ(r.worst_margin, 0.0);
  }
}

TEST(Majorization, DefinitionExamples) {
  const SpectrumVec a{1.0, 1.0}, b{2.0, 0.0};
  EXPECT_TRUE(majorizes(a, b, MajorMode::weak).passed());
  EXPECT_TRUE(majorizes(a, b, MajorMode::strong).passed());
  const CheckReport r = majorizes(b, a, MajorMode::weak);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.witness["prefix"], 1);
}

TEST(Majorization, StrongRequiresEqualTotals) {
  EXPECT_TRUE(majorizes(SpectrumVec{1.0, 0.5}, SpectrumVec{2.0, 0.0}, MajorMode::weak).passed());
  EXPECT_FALSE(majorizes(SpectrumVec{1.0, 0.5}, SpectrumVec{2.0, 0.0}, MajorMode::strong).passed());
}

TEST(Majorization, LogModeZeros) {
  // prefix products (0, ...) on the left always pass
  EXPECT_TRUE(majorizes(SpectrumVec{1.0, 0.0}, SpectrumVec{1.0, 0.5}, MajorMode::weak_log).passed());
  EXPECT_FALSE(majorizes(SpectrumVec{1.0, 0.5}, SpectrumVec{1.0, 0.0}, MajorMode::weak_log).passed());
  EXPECT_TRUE(majorizes(SpectrumVec{2.0, 0.0}, SpectrumVec{3.0, 0.0}, MajorMode::log).passed());
  EXPECT_FALSE(majorizes(SpectrumVec{2.0, 0.0}, SpectrumVec{3.0, 1.0}, MajorMode::log).passed());
  EXPECT_TRUE(majorizes(SpectrumVec{2.0, 0.5}, SpectrumVec{4.0, 0.25}, MajorMode::log).passed());
}

TEST(Majorization, Errors) {
  EXPECT_THROW(majorizes(SpectrumVec{1.0}, SpectrumVec{1.0, 2.0}, MajorMode::weak), ShapeError);
  EXPECT_THROW(majorizes(SpectrumVec{-1.0}, SpectrumVec{1.0}, MajorMode::log), DomainError);
  EXPECT_NO_THROW(majorizes(SpectrumVec{-1.0}, SpectrumVec{1.0}, MajorMode::weak));
}

TEST(MajorizationProperty, AgreesWithOracleAndModeImplications) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> x(5), y(5);
    for (auto& a : x) a = u(rng);
    for (auto& a : y) a = u(rng);
    const bool weak = majorizes(SpectrumVec(x), SpectrumVec(y), MajorMode::weak).passed();
    EXPECT_EQ(weak, weak_oracle(x, y));
    if (majorizes(SpectrumVec(x), SpectrumVec(y), MajorMode::strong).passed()) {
      EXPECT_TRUE(weak);
    }
    if (majorizes(SpectrumVec(x), SpectrumVec(y), MajorMode::log).passed()) {
      EXPECT_TRUE(majorizes(SpectrumVec(x), SpectrumVec(y), MajorMode::weak_log).passed());
    }
  }
}

TEST(MajorizationProperty, TTransformsAreMajorized) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> y(6);
    for (auto& a : y) a = nd(rng);
    const std::vector<double> x = t_transform(y, rng);
    EXPECT_TRUE(majorizes(SpectrumVec(x), SpectrumVec(y), MajorMode::strong, 1e-12).passed());
  }
}

TEST(MajorizationProperty, ConvexNondecreasingPreservesWeak) {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> nd;
  const double c = 0.3;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> y(5);
    for (auto& a : y) a = nd(rng);
    std::vector<double> x = t_transform(y, rng);
    for (auto& a : x) a -= std::abs(nd(rng)) * 0.2;  // now x ≺_w y
    const SpectrumVec sx(x), sy(y);
    ASSERT_TRUE(majorizes(sx, sy, MajorMode::weak, 1e-12).passed());
    auto check = [&](auto f) { EXPECT_TRUE(majorizes(sx.map(f), sy.map(f), MajorMode::weak, 1e-12).passed()); };
    check([](double v) { return std::exp(v); });
    check([c](double v) { return std::max(v + c, 0.0); });
    // x^2 is convex and nondecreasing on the nonnegative shift of the data
    const double shift = 10.0;
    check([shift](double v) { return (v + shift) * (v + shift); });
  }
}

TEST(MajorizationProperty, ConvexFunctionOfAverage) {
  // f(average of x) ≺_w average of f(x) entrywise, f(x) = x^2 on a
  // majorizing pair built from doubly stochastic averaging.
  std::mt19937_64 rng(44);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> y(4);
    for (auto& a : y) a = std::abs(nd(rng));
    const std::vector<double> x = t_transform(y, rng);
    const SpectrumVec sx(x), sy(y);
    auto sq = [](double v) { return v * v; };
    EXPECT_TRUE(majorizes(sx.map(sq), sy.map(sq), MajorMode::weak, 1e-12).passed());
  }
}

}  // namespace tprod::testing
