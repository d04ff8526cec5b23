// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Dense references are built here from the block-circulant definition and
// never go through the library's frequency-domain code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <Eigen/Dense>

#include "tprod/bounds.hpp"
#include "tprod/cli.hpp"
#include "tprod/ineq.hpp"
#include "tprod/mc.hpp"
#include "tprod/quadrature.hpp"
#include "tprod/suites.hpp"
#include "bound_oracles.hpp"

namespace tprod::testing {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// bcirc(C): block (r, c) is slice (r - c) mod p.
BlockMatrix dense_bcirc(const TTensor& t) {
  const auto m = static_cast<Eigen::Index>(t.rows()), n = static_cast<Eigen::Index>(t.cols());
  const std::size_t p = t.slices();
  BlockMatrix b(m * static_cast<Eigen::Index>(p), n * static_cast<Eigen::Index>(p));
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < p; ++c)
      b.block(static_cast<Eigen::Index>(r) * m, static_cast<Eigen::Index>(c) * n, m, n) = t.slice((r + p - c) % p);
  return b;
}

// unfold stacks the frontal slices vertically; fold is its inverse.
BlockMatrix dense_unfold(const TTensor& t) {
  const auto m = static_cast<Eigen::Index>(t.rows()), n = static_cast<Eigen::Index>(t.cols());
  BlockMatrix u(m * static_cast<Eigen::Index>(t.slices()), n);
  for (std::size_t k = 0; k < t.slices(); ++k) u.block(static_cast<Eigen::Index>(k) * m, 0, m, n) = t.slice(k);
  return u;
}

double rel_frobenius(const TTensor& got, const BlockMatrix& unfolded_ref) {
  const BlockMatrix g = dense_unfold(got);
  return (g - unfolded_ref).norm() / std::max(1e-300, unfolded_ref.norm());
}

std::vector<double> sorted_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

std::vector<double> hermitian_eigs(const BlockMatrix& h) {
  Eigen::SelfAdjointEigenSolver<BlockMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return sorted_desc({es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()});
}

std::vector<double> singular_values_desc(const BlockMatrix& a) {
  Eigen::JacobiSVD<BlockMatrix> svd(a);
  return sorted_desc({svd.singularValues().data(), svd.singularValues().data() + svd.singularValues().size()});
}

// max |a_i - b_i| / max(1, max |b_i|)
double scaled_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double scale = 1.0, d = 0.0;
  for (double v : b) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d / scale;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome tensor_core_against_bcirc() {
  const auto t0 = Clock::now();
  CounterRng rng(101);
  double worst_prod = 0.0, worst_eig = 0.0, worst_kf = 0.0;
  for (int i = 0; i < 500; ++i) {
    const std::size_t m = gen::pick(rng, 1, 8), n = gen::pick(rng, 1, 8), q = gen::pick(rng, 1, 8), p = gen::pick(rng, 1, 8);
    const Field field = i % 2 ? Field::complex : Field::real;
    const TTensor c = gen::random_tensor(rng, m, n, p, field), d = gen::random_tensor(rng, n, q, p, field);
    worst_prod = std::max(worst_prod, rel_frobenius(tprod(c, d), dense_bcirc(c) * dense_unfold(d)));

    const TTensor s = gen::random_symmetric(rng, m, p);
    worst_eig = std::max(worst_eig, scaled_diff(t_eigenvalues(s).values(), hermitian_eigs(dense_bcirc(s))));

    const TTensor sq = gen::random_tensor(rng, m, m, p, field);
    const std::size_t k = gen::pick(rng, 1, m * p);
    const std::vector<double> sv = singular_values_desc(dense_bcirc(sq));
    double ref = 0.0;
    for (std::size_t j = 0; j < k; ++j) ref += sv[j];
    worst_kf = std::max(worst_kf, std::abs(gauge_norm(sq, GaugeSpec::ky_fan(k)) - ref) / std::max(1.0, ref));
  }
  const double secs = seconds_since(t0);
  return {worst_prod <= 1e-10 && worst_eig <= 1e-8 && worst_kf <= 1e-8 && secs < 60.0,
          "500 cases, tprod rel " + fmt("%.2e", worst_prod) + ", eig " + fmt("%.2e", worst_eig) + ", kyfan " +
              fmt("%.2e", worst_kf) + ", " + fmt("%.1f", secs) + " s"};
}

Outcome functional_calculus() {
  CounterRng rng(202);
  const FnSpec fs[] = {FnSpec::exp(), FnSpec::power(2.0), FnSpec::power(0.5)};
  const std::function<double(double)> scalar[] = {[](double x) { return std::exp(x); }, [](double x) { return x * x; },
                                                  [](double x) { return std::sqrt(x); }};
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = gen::pick(rng, 1, 6), p = gen::pick(rng, 1, 6);
    const TTensor t = gen::random_tpd(rng, m, p, rng.uniform(0.05, 1.0));
    std::vector<double> expect = hermitian_eigs(dense_bcirc(t));
    for (double& v : expect) v = scalar[i % 3](v);
    worst = std::max(worst, scaled_diff(hermitian_eigs(dense_bcirc(tensor_fn(t, fs[i % 3]))), sorted_desc(expect)));
  }
  return {worst <= 1e-9, "200 TPD cases over exp, x^2, sqrt, worst " + fmt("%.2e", worst)};
}

Outcome inequality_suites() {
  const auto t0 = Clock::now();
  std::string detail;
  bool ok = true;
  for (const char* name : {"sv-major", "kyfan-prod", "kyfan-sum", "courant-fischer", "extreme-sum", "antisym", "holder"}) {
    const CheckReport r = run_suite(name, SuiteOptions{303, 500, 0, 1e-8});
    const std::size_t failures = r.trials - r.passes;
    ok = ok && r.passed() && failures == 0;
    detail += std::string(detail.empty() ? "" : ", ") + name + " " + std::to_string(failures) + "/" + std::to_string(r.trials);
    if (!r.passed()) std::cerr << name << " witness: " << to_json(r).dump() << "\n";
  }
  return {ok, "500 instances each, failures " + detail + ", " + fmt("%.1f", seconds_since(t0)) + " s"};
}

Outcome lie_trotter() {
  CounterRng rng(404);
  static const std::vector<unsigned long long> steps{8, 16, 32, 64};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, worst_exact = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t m = gen::pick(rng, 2, 4), p = gen::pick(rng, 1, 4);
    const std::vector<TTensor> pair{gen::unit_spectral(gen::random_symmetric(rng, m, p)),
                                    gen::unit_spectral(gen::random_symmetric(rng, m, p))};
    const LieTrotterErrors e = lie_trotter_errors(pair, steps);
    for (std::size_t j = 0; j + 1 < e.errors.size(); ++j) {
      const double ratio = e.errors[j] / e.errors[j + 1];
      lo = std::min(lo, ratio);
      hi = std::max(hi, std::isfinite(ratio) ? ratio : std::numeric_limits<double>::infinity());
    }
    const std::vector<TTensor> commuting{gen::unit_spectral(gen::fdiag_symmetric(rng, m, p)),
                                         gen::unit_spectral(gen::fdiag_symmetric(rng, m, p))};
    const LieTrotterErrors c = lie_trotter_errors(commuting, steps);
    for (double err : c.errors) worst_exact = std::max(worst_exact, err / std::max(1.0, c.reference));
  }
  return {lo >= 1.6 && hi <= 2.4 && worst_exact <= 1e-12,
          "50 pairs, ratios in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "], commuting error " +
              fmt("%.2e", worst_exact)};
}

Outcome multivariate() {
  const auto t0 = Clock::now();
  double beta0_err = std::abs(integrate_beta([](double) { return 1.0; }, 0.0).quad.value - 1.0);
  double beta_err = 0.0;
  for (double th : {0.25, 0.5, 0.75})
    beta_err = std::max(beta_err, std::abs(integrate_beta([](double) { return 1.0; }, th).quad.value - 1.0));

  CounterRng rng(505);
  const FnSpec fs[] = {FnSpec::power(2.0), FnSpec::exp(0.5), FnSpec::power(0.5)};
  const FnSpec gs[] = {FnSpec::exp(0.1), FnSpec::power(1.0), FnSpec::power(3.0)};
  const GaugeSpec gauges[] = {GaugeSpec::ky_fan(1), GaugeSpec::ky_fan(6), GaugeSpec::spectral(), GaugeSpec::trace_norm(),
                              GaugeSpec::schatten(2.0)};
  std::size_t checks = 0, failed = 0;
  for (std::size_t n : {2u, 3u}) {
    std::vector<TTensor> cs;
    for (std::size_t j = 0; j < n; ++j) cs.push_back(gen::random_tpd(rng, 4, 3));
    for (double th : {0.0, 0.25, 0.5, 0.75})
      for (std::size_t fi = 0; fi < 3; ++fi)
        for (const GaugeSpec& gauge : gauges) {
          MultivariateOptions opt;
          opt.theta = th;
          const CheckReport r = check_multivariate_norm_ineq(cs, fs[fi], gs[(fi + checks) % 3], gauge, opt);
          ++checks;
          if (!r.passed()) {
            ++failed;
            std::cerr << "multivariate witness: " << to_json(r).dump() << "\n";
          }
        }
  }
  const double secs = seconds_since(t0);
  return {failed == 0 && beta0_err <= 1e-10 && beta_err <= 1e-8 && secs < 120.0,
          std::to_string(checks) + " checks on 4x4x3 TPD, n in {2,3}, failures " + std::to_string(failed) +
              ", |int beta_0 - 1| " + fmt("%.1e", beta0_err) + ", |int beta_theta - 1| " + fmt("%.1e", beta_err) + ", " +
              fmt("%.1f", secs) + " s"};
}

Outcome integral_transfer() {
  SuiteOptions o{606, 100, 1, 1e-8};
  std::size_t failures[2] = {0, 0};
  for (std::size_t mode = 0; mode < 2; ++mode)
    for (std::size_t i = 0; i < 100; ++i) {
      const std::size_t index = 2 * i + mode;  // even: arithmetic mode, odd: log mode
      CounterRng rng(derive_seed(o.seed, 0x1A7E, index));
      const CheckReport r = detail::integral_major_instance(rng, index, o);
      if (!r.passed()) {
        ++failures[mode];
        std::cerr << "transfer witness: " << to_json(r).dump() << "\n";
      }
    }
  return {failures[0] == 0 && failures[1] == 0,
          "100 instances per mode, failures arith " + std::to_string(failures[0]) + ", log " + std::to_string(failures[1])};
}

Outcome psi_phi_quadrature() {
  double worst_zero = 0.0, worst_psi = 0.0, worst_phi = 0.0;
  const double c1 = 1.7, c2 = 0.9;
  for (double m : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    worst_zero = std::max(worst_zero, std::abs(psi(m, 0.0, c1, c2) - c1) / c1);
    for (double gamma : {0.1, 0.7, 2.0, 5.0}) {
      const double ref = psi_oracle(m, gamma, c1, c2);
      worst_psi = std::max(worst_psi, std::abs(psi(m, gamma, c1, c2) - ref) / ref);
    }
    for (auto [d1, d2] : {std::pair{0.5, 1.0}, {1.0, 1.0}, {3.0, 0.5}, {12.0, 2.0}}) {
      const double ref = phi_oracle(m, d1, d2);
      worst_phi = std::max(worst_phi, std::abs(phi(m, d1, d2) - ref) / ref);
    }
  }
  return {worst_zero <= 1e-12 && worst_psi <= 1e-6 && worst_phi <= 1e-6,
          "Psi(m,0)=c1 error " + fmt("%.1e", worst_zero) + ", Psi 20-point rel " + fmt("%.1e", worst_psi) +
              ", Phi 20-point rel " + fmt("%.1e", worst_phi)};
}

// Uniform grid of `points` values on [lo, hi], endpoints included. Minima sit
// at large t or close to the feasibility limit, where uniform spacing is finer
// than a log grid over several decades.
template <typename F>
double uniform_grid_min(F&& f, double lo, double hi, std::size_t points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i)
    best = std::min(best, f(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1)));
  return best;
}

Outcome bound_infimum() {
  CounterRng rng(808);
  constexpr std::size_t kPoints = 100000;
  double worst_match = 0.0, worst_excess = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 20; ++i) {
    TailBoundParams q;
    q.m = gen::pick(rng, 1, 8);
    q.p = gen::pick(rng, 1, 4);
    q.n_sum = gen::pick(rng, 1, 4);
    q.k = gen::pick(rng, 1, q.m * q.p);
    std::vector<double> a(gen::pick(rng, 2, 4));
    for (double& v : a) v = rng.uniform(0.0, 2.0);
    a.back() = rng.uniform(0.2, 2.0);
    q.g = FnSpec::polynomial(a, rng.uniform(1.0, 2.0));
    q.env = Envelope{rng.uniform(0.2, 2.0), 8};
    q.c1 = rng.uniform(0.5, 2.0);
    q.c2 = rng.uniform(0.5, 2.0);
    q.d1 = rng.uniform(0.5, 4.0);
    q.d2 = rng.uniform(0.5, 2.0);

    // Ky Fan side, log-grid over the feasible t-range with an independent objective
    const double theta_k = rng.uniform(1.0, 60.0);
    const BoundResult kf = kyfan_bernstein_bound(q, theta_k);
    const double t_max = 1.0 / (static_cast<double>(q.n_sum * (a.size() - 1)) * q.g.outer_power());
    const double ph = phi_oracle(static_cast<double>(q.m), q.d1, q.d2);
    const double kf_ref = uniform_grid_min([&](double t) { return kyfan_objective_oracle(q, theta_k, t, ph); }, t_max * 1e-8,
                                   t_max * (1.0 - 1e-9), kPoints);
    worst_match = std::max(worst_match, std::abs(kf.bound - kf_ref) / kf_ref);
    worst_excess = std::max(worst_excess, (kf.bound - kf_ref) / kf_ref);

    // eigenvalue side, log space over [t_lo, t_hi]
    const double theta_e = rng.uniform(0.5, 40.0);
    const BoundResult eb = eigen_bernstein_bound(q, theta_e);
    const double eb_ref = uniform_grid_min(
        [&](double t) { return -theta_e * t + log_psi(static_cast<double>(q.m), static_cast<double>(q.n_sum) * t, q.c1, q.c2); },
        q.t_lo, q.t_hi, kPoints);
    worst_match = std::max(worst_match, std::abs(std::expm1(eb.log_bound - eb_ref)));
    worst_excess = std::max(worst_excess, std::expm1(eb.log_bound - eb_ref));
  }
  return {worst_match <= 1e-6 && worst_excess <= 1e-12,
          "20 parameter sets x 2 bounds, 1e5-point uniform grid, max rel gap " + fmt("%.1e", worst_match) +
              ", max excess over grid " + fmt("%.1e", worst_excess)};
}

Outcome mc_soundness() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 900;
  for (const char* g : {"0,1", "0,0,1"})
    for (std::size_t k : {1u, 2u}) {
      ExperimentConfig cfg;
      cfg.model.seed = ++seed;
      cfg.g = parse_polynomial(g);
      cfg.k = k;
      cfg.n_trials = 10000;
      const ExperimentReport rep = run_experiment(cfg);
      std::size_t vacuous = 0, unsound = 0;
      for (const auto& row : rep.rows) {
        vacuous += row.vacuous;
        unsound += !row.sound;
      }
      ok = ok && rep.sound() && rep.tail_calibrated;
      detail += std::string(detail.empty() ? "" : "; ") + "g=" + cfg.g.describe() + " k=" + std::to_string(k) + ": " +
                std::to_string(rep.nonvacuous_rows()) + " checked, " + std::to_string(vacuous) + " vacuous, " +
                std::to_string(unsound) + " unsound";
    }
  const double secs = seconds_since(t0);
  return {ok && secs < 300.0, detail + ", " + fmt("%.1f", secs) + " s"};
}

Outcome mc_reproducible() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("tprod_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  ExperimentConfig cfg;
  cfg.model.seed = 1010;
  cfg.n_trials = 3000;
  {
    std::ofstream(dir / "cfg.json") << to_json(cfg).dump(2);
  }
  std::string files[2];
  int codes[2];
  const char* threads[2] = {"1", "4"};
  for (int i = 0; i < 2; ++i) {
    const fs::path out = dir / ("report_" + std::string(threads[i]) + ".json");
    std::ostringstream so, se;
    codes[i] = cli::run({"mc", "run", "--config", (dir / "cfg.json").string(), "--threads", threads[i], "--out", out.string()},
                        so, se);
    std::ifstream in(out, std::ios::binary);
    files[i].assign(std::istreambuf_iterator<char>(in), {});
  }
  fs::remove_all(dir);
  const bool same = !files[0].empty() && files[0] == files[1];
  return {codes[0] == 0 && codes[1] == 0 && same,
          "mc run with 1 and 4 threads, exit codes " + std::to_string(codes[0]) + "/" + std::to_string(codes[1]) + ", " +
              std::to_string(files[0].size()) + " bytes, " + (same ? "identical" : "different")};
}

}  // namespace
}  // namespace tprod::testing

int main() {
  using namespace tprod::testing;
  struct Criterion {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {1, "t-product, eigenvalues and Ky Fan norms against dense bcirc", tensor_core_against_bcirc},
      {2, "spectral mapping of the functional calculus", functional_calculus},
      {3, "eigenvalue and singular-value inequality suites", inequality_suites},
      {4, "Lie-Trotter first-order convergence", lie_trotter},
      {5, "multivariate gauge-norm inequalities", multivariate},
      {6, "majorization transfer through integral averages", integral_transfer},
      {7, "Psi and Phi against independent quadrature", psi_phi_quadrature},
      {8, "bound infimum against brute-force t-grid", bound_infimum},
      {9, "Monte Carlo soundness of the Ky Fan tail bound", mc_soundness},
      {10, "Monte Carlo reports independent of thread count", mc_reproducible},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << c.id << "  " << c.name << "  (" << o.detail << ")" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
