#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "tprod/bounds.hpp"
#include "tprod/norms.hpp"
#include "tprod/random.hpp"
#include "bound_oracles.hpp"

namespace tprod::testing {
namespace {

double kyfan_objective_oracle(const TailBoundParams& q, double theta, double t) {
  return testing::kyfan_objective_oracle(q, theta, t, phi_oracle(static_cast<double>(q.m), q.d1, q.d2));
}

TailBoundParams square_params() {
  TailBoundParams q;
  q.m = 4;
  q.p = 3;
  q.n_sum = 3;
  q.k = 2;
  q.g = FnSpec::polynomial({0.0, 0.0, 1.0});
  q.env = Envelope{1.0, 8};
  return q;
}

}  // namespace

TEST(Psi, ZeroGammaIsC1) {
  for (double m : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    for (double c1 : {0.5, 1.0, 3.0}) EXPECT_NEAR(psi(m, 0.0, c1, 0.7), c1, 1e-8 * c1) << "m=" << m;
  }
}

TEST(Psi, LinearInC1) {
  EXPECT_NEAR(psi(4, 1.3, 2.0, 1.0), 2.0 * psi(4, 1.3, 1.0, 1.0), 1e-12 * psi(4, 1.3, 2.0, 1.0));
}

TEST(Psi, MatchesIndependentQuadrature) {
  EXPECT_NEAR(psi(4, 1.0, 1.0, 1.0), psi_oracle(4, 1.0, 1.0, 1.0), 1e-12 * psi_oracle(4, 1.0, 1.0, 1.0));
  for (double m : {1.0, 4.0, 9.0, 16.0})
    for (double gamma : {-3.0, -0.5, 0.7, 2.0, 6.0}) {
      const double ref = psi_oracle(m, gamma, 1.2, 0.8);
      EXPECT_NEAR(psi(m, gamma, 1.2, 0.8), ref, 1e-6 * ref) << "m=" << m << " gamma=" << gamma;
    }
}

TEST(Psi, NondecreasingAndFiniteInLogSpace) {
  double prev = -std::numeric_limits<double>::infinity();
  for (double gamma = -50.0; gamma <= 400.0; gamma += 2.5) {
    const double lp = log_psi(4, gamma, 1.0, 1.0);
    EXPECT_TRUE(std::isfinite(lp));
    EXPECT_GE(lp, prev);
    prev = lp;
  }
  EXPECT_THROW(psi(4, 5000.0, 1.0, 1.0), NumericError);
  EXPECT_THROW(psi(0.5, 1.0, 1.0, 1.0), ParameterError);
  EXPECT_THROW(psi(4, 1.0, 0.0, 1.0), ParameterError);
}

TEST(Phi, ClampingConvention) {
  EXPECT_DOUBLE_EQ(phi(4, 0.0, 1.0), 2.0);
  EXPECT_NEAR(phi(4, 1.0, 1e12), 2.0, 1e-7);
  EXPECT_NEAR(phi(4, 50.0, 1e12), 2.0, 1e-6);
}

TEST(Phi, MatchesIndependentQuadrature) {
  const double ref = phi_oracle(4, 1.0, 1.0);
  EXPECT_NEAR(phi(4, 1.0, 1.0), ref, 1e-12 * ref);
  for (double m : {1.0, 4.0, 16.0})
    for (double d1 : {0.3, 1.0, 2.5, 40.0})
      for (double d2 : {0.2, 1.0, 5.0}) {
        const double r = phi_oracle(m, d1, d2);
        EXPECT_NEAR(phi(m, d1, d2), r, 1e-9 * r) << m << " " << d1 << " " << d2;
      }
}

TEST(Phi, DecreasingInD2AndM) {
  for (double d1 : {0.5, 3.0}) {
    EXPECT_GT(phi(4, d1, 0.5), phi(4, d1, 1.0));
    EXPECT_GT(phi(2, d1, 1.0), phi(8, d1, 1.0));
    EXPECT_GE(phi(8, d1, 1.0), 0.0);
  }
  EXPECT_THROW(phi(4, -1.0, 1.0), ParameterError);
  EXPECT_THROW(phi(4, 1.0, 0.0), ParameterError);
}

TEST(Infimum, QuadraticInterior) {
  const InfimumResult r = infimum_over_t([](double t) { return (t - 1.0) * (t - 1.0); }, 1e-6, 10.0);
  EXPECT_NEAR(r.t_star, 1.0, 1e-8);
  EXPECT_NEAR(r.f_star, 0.0, 1e-8);
  EXPECT_FALSE(r.boundary);
}

TEST(Infimum, MonotoneGoesToBoundary) {
  const InfimumResult r = infimum_over_t([](double t) { return t; }, 0.01, 10.0);
  EXPECT_EQ(r.t_star, 0.01);
  EXPECT_TRUE(r.boundary);
}

TEST(Infimum, Errors) {
  EXPECT_THROW(infimum_over_t([](double) { return std::numeric_limits<double>::infinity(); }, 1.0, 2.0), NumericError);
  EXPECT_THROW(infimum_over_t([](double) { return std::nan(""); }, 1.0, 2.0), NumericError);
  EXPECT_THROW(infimum_over_t([](double t) { return t; }, 0.0, 2.0), ParameterError);
  EXPECT_THROW(infimum_over_t([](double t) { return t; }, 3.0, 2.0), ParameterError);
}

TEST(EigenBound, MatchesGridOracle) {
  TailBoundParams q;
  q.m = 4;
  q.n_sum = 3;
  const double theta = 10.0;
  const BoundResult r = eigen_bernstein_bound(q, theta);
  const double ref = grid_min([&](double t) { return std::exp(-theta * t + log_psi(4, 3 * t, 1, 1)); }, 1e-6, 50.0, 100000);
  EXPECT_NEAR(r.bound, ref, 1e-6 * ref);
  EXPECT_LE(r.bound, ref * (1 + 1e-12));
  EXPECT_FALSE(r.boundary);
  EXPECT_NEAR(std::log(r.bound), r.log_bound, 1e-12);
}

TEST(EigenBound, ThetaDependence) {
  TailBoundParams q;
  q.n_sum = 3;
  double prev = std::numeric_limits<double>::infinity();
  for (double theta : {0.5, 2.0, 6.0, 8.0, 12.0, 20.0}) {
    const double b = eigen_bernstein_bound(q, theta).bound;
    EXPECT_LE(b, prev * (1 + 1e-12));
    prev = b;
  }
  // small theta: the search runs to t -> 0+ where e^{-theta t} Psi -> c1
  const BoundResult tiny = eigen_bernstein_bound(q, 1e-9);
  EXPECT_GE(tiny.bound, q.c1);
  EXPECT_NEAR(tiny.bound, q.c1, 1e-4);
  EXPECT_TRUE(tiny.boundary);
}

TEST(EigenBound, MinSideMirrorsMaxSide) {
  TailBoundParams q;
  q.n_sum = 2;
  q.c1 = 0.8;
  q.c2 = 1.5;
  for (double theta : {3.0, 7.0, 15.0}) {
    const BoundResult hi = eigen_bernstein_bound(q, theta, EigenSide::max);
    const BoundResult lo = eigen_bernstein_bound(q, -theta, EigenSide::min);
    EXPECT_DOUBLE_EQ(hi.bound, lo.bound);
  }
  EXPECT_THROW(eigen_bernstein_bound(q, -1.0, EigenSide::max), ParameterError);
  EXPECT_THROW(eigen_bernstein_bound(q, 1.0, EigenSide::min), ParameterError);
}

TEST(KyFanBound, MatchesGridOracle) {
  const TailBoundParams q = square_params();
  const double theta = 25.0;
  const BoundResult r = kyfan_bernstein_bound(q, theta);
  const double t_max = 1.0 / 6.0;
  const double ref = grid_min([&](double t) { return kyfan_objective_oracle(q, theta, t); }, t_max * 1e-8,
                              t_max * (1 - 1e-9), 100000);
  EXPECT_NEAR(r.bound, ref, 1e-6 * ref);
  EXPECT_LE(r.bound, ref * (1 + 1e-12));
  EXPECT_LT(r.t_star, t_max);
}

TEST(KyFanBound, IdentitySpecialization) {
  TailBoundParams q;
  q.m = 4;
  q.p = 3;
  q.n_sum = 3;
  q.k = 1;
  q.env = Envelope{1.5, 8};
  const double theta = 30.0;
  const BoundResult r = kyfan_bernstein_bound(q, theta);
  const double ph = phi_oracle(4, 1, 1);
  const double a2 = 2.25;
  auto f = [&](double t) {
    const double x = 3 * t;
    return std::exp(-theta * t) * (1 + x * ph + x * x * a2 / (2 * (1 - x)));
  };
  EXPECT_NEAR(r.bound, f(r.t_star), 1e-10 * r.bound);
  EXPECT_NEAR(r.bound, grid_min(f, 1e-9, (1 - 1e-9) / 3.0, 100000), 1e-6 * r.bound);
}

TEST(KyFanBound, LinearInKAndMonotone) {
  TailBoundParams q = square_params();
  q.k = 1;
  const double b1 = kyfan_bernstein_bound(q, 25.0).bound;
  q.k = 3;
  const BoundResult b3 = kyfan_bernstein_bound(q, 25.0);
  EXPECT_NEAR(b3.bound, 3.0 * b1, 1e-12 * b3.bound);
  double prev = std::numeric_limits<double>::infinity();
  for (double theta : {1.0, 5.0, 10.0, 20.0, 40.0, 80.0}) {
    const double b = kyfan_bernstein_bound(q, theta).bound;
    EXPECT_LE(b, prev * (1 + 1e-12));
    prev = b;
  }
}

TEST(KyFanBound, InfimumNeverExceedsProbes) {
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TailBoundParams q = square_params();
  q.g = FnSpec::polynomial({0.5, 1.0, 0.3}, 1.5);
  q.env = Envelope{2.0, 8};
  const double theta = 40.0;
  const BoundResult r = kyfan_bernstein_bound(q, theta);
  const double t_max = 1.0 / (3.0 * 2.0 * 1.5);
  for (int i = 0; i < 1000; ++i) {
    const double t = t_max * u(rng);
    if (t <= 0.0) continue;
    EXPECT_LE(r.bound, kyfan_objective_oracle(q, theta, t) * (1 + 1e-12));
  }
}

TEST(KyFanBound, Preconditions) {
  TailBoundParams q = square_params();
  EXPECT_THROW(kyfan_bernstein_bound(q, 0.0), ParameterError);
  q.g = FnSpec::polynomial({2.0});
  EXPECT_THROW(kyfan_bernstein_bound(q, 5.0), ParameterError);
  q.g = FnSpec::polynomial({0.0, -1.0});
  EXPECT_THROW(kyfan_bernstein_bound(q, 5.0), ParameterError);
  q = square_params();
  q.k = 13;
  EXPECT_THROW(kyfan_bernstein_bound(q, 5.0), ParameterError);
  q = square_params();
  q.g = FnSpec::exp();
  EXPECT_THROW(kyfan_bernstein_bound(q, 5.0), ParameterError);
}

TEST(KyFanExpectation, LimitsAndMonotonicity) {
  const Envelope env{1.0, 8};
  EXPECT_NEAR(kyfan_expectation_bound(1e-12, env, 4, 1, 1, 3), 3.0, 1e-10);
  double prev = 0.0;
  for (double th = 0.05; th < 1.0; th += 0.05) {
    const double v = kyfan_expectation_bound(th, env, 4, 1, 1, 2);
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_THROW(kyfan_expectation_bound(1.0, env, 4, 1, 1, 2), DomainError);
  EXPECT_THROW(kyfan_expectation_bound(0.0, env, 4, 1, 1, 2), DomainError);
}

TEST(KyFanExpectation, DominatesMonteCarloForOneBlock) {
  // E ||exp(theta X)||_(2) over 10^4 draws with m = 4, p = 1.
  const RandomModel model{4, 1, SampleMode::paper_literal, 12};
  const double theta = 0.3;
  double sum = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i)
    sum += gauge_norm(apply_fn(sample_spectrum(model, static_cast<std::uint64_t>(i)), FnSpec::exp(theta)), GaugeSpec::ky_fan(2));
  EXPECT_LE(sum / draws, kyfan_expectation_bound(theta, Envelope{1.0, 8}, 4, 1, 1, 2));
}

}  // namespace tprod::testing
