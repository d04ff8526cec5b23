#include <gtest/gtest.h>

#include <set>

#include "tprod/suites.hpp"

namespace tprod::testing {
namespace {

TEST(Suites, RegistryNamesAndStreamsAreUnique) {
  std::set<std::string> names;
  std::set<std::uint64_t> streams;
  for (const auto& s : suite_registry()) {
    names.insert(s.name);
    streams.insert(s.stream);
  }
  EXPECT_EQ(names.size(), suite_registry().size());
  EXPECT_EQ(streams.size(), suite_registry().size());
  for (const char* n : {"courant-fischer", "extreme-sum", "sv-major", "kyfan-prod", "kyfan-sum", "lie-trotter", "multivariate",
                        "integral-major", "antisym", "holder"})
    EXPECT_EQ(names.count(n), 1u) << n;
  EXPECT_THROW(find_suite("nope"), ParameterError);
}

TEST(Suites, EverySuitePassesOnRandomInstances) {
  for (const auto& s : suite_registry()) {
    const CheckReport r = run_suite(s, SuiteOptions{3, 40, 1});
    EXPECT_TRUE(r.passed()) << s.name << ": " << to_json(r).dump();
    EXPECT_EQ(r.passes, r.trials) << s.name;
    EXPECT_GE(r.trials, 40u) << s.name;
    EXPECT_TRUE(r.witness.contains("instance")) << s.name;
  }
}

TEST(Suites, ReportsDoNotDependOnThreads) {
  for (const char* name : {"courant-fischer", "lie-trotter", "integral-major"}) {
    const CheckReport a = run_suite(name, SuiteOptions{11, 24, 1});
    const CheckReport b = run_suite(name, SuiteOptions{11, 24, 4});
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump()) << name;
    const CheckReport c = run_suite(name, SuiteOptions{12, 24, 1});
    EXPECT_NE(to_json(a).dump(), to_json(c).dump()) << name;
  }
}

TEST(Suites, GeneratorsHonourTheirContracts) {
  CounterRng rng(5);
  for (int t = 0; t < 20; ++t) {
    const std::size_t m = gen::pick(rng, 1, 4), p = gen::pick(rng, 1, 5);
    EXPECT_TRUE(is_symmetric(gen::random_symmetric(rng, m, p)));
    const TTensor tpd = gen::random_tpd(rng, m, p, 0.1);
    const TEigenSystem e = t_eigenvalues(tpd);
    EXPECT_GE(e.min(), 0.1 - 1e-10);
    EXPECT_LE(e.max(), 1.1 + 1e-10);
    const TTensor a = gen::fdiag_symmetric(rng, m, p), b = gen::fdiag_symmetric(rng, m, p);
    double comm = 0.0;
    const TTensor d = tprod(a, b) - tprod(b, a);
    for (const auto& v : d.data()) comm = std::max(comm, std::abs(v));
    EXPECT_LT(comm, 1e-12);
    const std::vector<double> w = gen::random_weights(rng, 1 + t % 4);
    double s = 0.0;
    for (double x : w) {
      EXPECT_GT(x, 0.0);
      s += x;
    }
    EXPECT_NEAR(s, 1.0, 1e-15);
  }
}

TEST(Suites, InstanceFailuresNameTheInstance) {
  const SuiteDef bad{"broken", 1, "always throws", [](CounterRng&, std::size_t, const SuiteOptions&) -> CheckReport {
                       throw DomainError("boom");
                     }};
  try {
    run_suite(bad, SuiteOptions{0, 3, 1});
    FAIL() << "expected an error";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("broken instance 0"), std::string::npos) << e.what();
  }
  EXPECT_THROW(run_suite("holder", SuiteOptions{0, 0, 1}), ParameterError);
}

}  // namespace
}  // namespace tprod::testing
