#pragma once

// Monte Carlo engine: sample sums of random tensors, estimate tail
// probabilities of ||g(sum X_j)||_(k), and compare against the Ky Fan
// Bernstein bound. Every trial draws from its own derived stream and
// aggregation runs in trial order, so reports do not depend on the number
// of worker threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <nlohmann/json.hpp>

#include "tprod/bounds.hpp"
#include "tprod/errors.hpp"
#include "tprod/io.hpp"
#include "tprod/norms.hpp"
#include "tprod/parallel.hpp"
#include "tprod/random.hpp"
#include "tprod/rng.hpp"
#include "tprod/spectral.hpp"

namespace tprod {

// ----------------------------------------------------------------------------
// Empirical tails

struct TailRow {
  double theta = 0.0;
  double fraction = 0.0;
  double ci_upper = 0.0;
};

// One-sided Clopper-Pearson upper limit for `successes` out of `n`.
inline double clopper_pearson_upper(std::size_t successes, std::size_t n, double confidence) {
  if (n == 0) throw ParameterError("clopper_pearson_upper: n must be positive");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ParameterError("clopper_pearson_upper: confidence must lie in (0, 1)");
  if (successes >= n) return 1.0;
  return boost::math::ibeta_inv(static_cast<double>(successes) + 1.0, static_cast<double>(n - successes), confidence);
}

// fraction(theta) = #{x >= theta} / n by exact counting.
inline std::vector<TailRow> empirical_tail(std::vector<double> samples, std::span<const double> thetas, double confidence = 0.99) {
  if (samples.empty()) throw ParameterError("empirical_tail: no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  std::vector<TailRow> rows;
  rows.reserve(thetas.size());
  for (double th : thetas) {
    const auto first = std::lower_bound(samples.begin(), samples.end(), th);
    const auto count = static_cast<std::size_t>(samples.end() - first);
    rows.push_back({th, static_cast<double>(count) / static_cast<double>(n), clopper_pearson_upper(count, n, confidence)});
  }
  return rows;
}

// ----------------------------------------------------------------------------
// Tail-constant calibration: log Pr(sigma_1 > y) ~ log d1 - d2 m (y - 2)^{3/2}

struct TailFit {
  double d1 = 1.0;
  double d2 = 1.0;
  double d1_fit = 1.0;       // least-squares intercept before widening
  std::size_t points = 0;    // grid points used in the fit
};

inline constexpr std::size_t kTailGrid = 16;
inline constexpr std::size_t kMinTailCount = 5;

// Least squares on the empirical tail at kTailGrid levels in (2, max],
// keeping levels with at least kMinTailCount exceedances. d1 is then
// widened so d1 exp(-d2 m (y-2)^{3/2}) dominates the empirical tail at
// every level, y = 2 included.
inline TailFit fit_tail_constants(std::vector<double> sigma1, std::size_t m) {
  if (sigma1.empty()) throw ParameterError("fit_tail_constants: no samples");
  std::sort(sigma1.begin(), sigma1.end());
  const double n = static_cast<double>(sigma1.size());
  const double ymax = sigma1.back();
  auto tail_at = [&](double y) {
    return static_cast<double>(sigma1.end() - std::upper_bound(sigma1.begin(), sigma1.end(), y)) / n;
  };
  std::vector<double> xs, zs, ps;
  for (std::size_t j = 1; j < kTailGrid && ymax > 2.0; ++j) {
    const double y = 2.0 + (ymax - 2.0) * static_cast<double>(j) / static_cast<double>(kTailGrid);
    const double pr = tail_at(y);
    if (pr * n < static_cast<double>(kMinTailCount)) break;
    xs.push_back(static_cast<double>(m) * std::pow(y - 2.0, 1.5));
    zs.push_back(std::log(pr));
    ps.push_back(pr);
  }
  if (xs.size() < 2) throw NumericError("fit_tail_constants: too few exceedances above 2 to fit the tail");
  double mx = 0.0, mz = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    mz += zs[i];
  }
  mx /= static_cast<double>(xs.size());
  mz /= static_cast<double>(xs.size());
  double sxz = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxz += (xs[i] - mx) * (zs[i] - mz);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  TailFit f;
  f.d2 = -sxz / sxx;
  if (!(f.d2 > 0.0)) throw NumericError("fit_tail_constants: fitted tail does not decay");
  f.d1_fit = std::exp(mz + f.d2 * mx);
  f.d1 = std::max(f.d1_fit, tail_at(2.0));
  for (std::size_t i = 0; i < xs.size(); ++i) f.d1 = std::max(f.d1, ps[i] * std::exp(f.d2 * xs[i]));
  f.points = xs.size();
  return f;
}

// ----------------------------------------------------------------------------
// Configuration

struct ExperimentConfig {
  RandomModel model{4, 3, SampleMode::paper_literal, 0};
  std::size_t n_sum = 3;
  FnSpec g = FnSpec::polynomial({0.0, 1.0});
  std::size_t k = 1;
  std::vector<double> thetas;   // empty: automatic grid of auto_points values
  std::size_t auto_points = 10;
  std::size_t n_trials = 10000;
  double confidence = 0.99;

  double c1 = 1.0, c2 = 1.0, d1 = 1.0, d2 = 1.0;
  bool calibrate_tail = true;
  std::size_t tail_samples = 1000;

  bool calibrate_envelope = true;
  double envelope_a = 1.0;
  std::size_t envelope_samples = 1000;
  unsigned p_max = 8;

  std::size_t condition_subsample = 200;
  std::size_t max_resample = 10000;
  unsigned threads = 0;   // not serialized: results never depend on it

  void validate() const {
    model.validate();
    if (n_sum < 1) throw ParameterError("config: n_sum must be >= 1");
    if (k < 1 || k > model.m * model.p) throw ParameterError("config: k must lie in [1, m*p]");
    if (g.kind() != FnSpec::Kind::polynomial || !g.has_nonnegative_coeffs())
      throw ParameterError("config: g must be a polynomial with nonnegative coefficients");
    if (n_trials < 100) throw ParameterError("config: n_trials must be >= 100");
    if (!(confidence > 0.0 && confidence < 1.0)) throw ParameterError("config: confidence must lie in (0, 1)");
    if (thetas.empty() && auto_points < 1) throw ParameterError("config: need thetas or auto_points >= 1");
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      if (!(thetas[i] > 0.0)) throw ParameterError("config: thetas must be positive");
      if (i > 0 && !(thetas[i] > thetas[i - 1])) throw ParameterError("config: thetas must be strictly ascending");
    }
    if (!calibrate_envelope && !(envelope_a > 0.0)) throw ParameterError("config: envelope a must be positive");
    if (p_max < 2) throw ParameterError("config: p_max must be >= 2");
    if (calibrate_envelope && envelope_samples < 1) throw ParameterError("config: envelope_samples must be >= 1");
    if (calibrate_tail && tail_samples < 1) throw ParameterError("config: tail_samples must be >= 1");
    for (double v : {c1, c2, d1, d2})
      if (!(v > 0.0)) throw ParameterError("config: c1, c2, d1, d2 must be positive");
  }
};

inline nlohmann::json g_to_json(const FnSpec& g) { return {{"coeffs", g.coeffs()}, {"power", g.outer_power()}}; }

// g as {"coeffs":[a0,...], "power":s} or the string "a0,a1,...:s".
inline FnSpec parse_polynomial(const std::string& text) {
  const auto colon = text.find(':');
  const std::string list = text.substr(0, colon);
  double power = 1.0;
  std::vector<double> coeffs;
  try {
    if (colon != std::string::npos) power = std::stod(text.substr(colon + 1));
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) coeffs.push_back(std::stod(item));
  } catch (const std::exception&) {
    throw ParameterError("polynomial '" + text + "': expected \"a0,a1,...[:s]\"");
  }
  return FnSpec::polynomial(std::move(coeffs), power);
}

inline FnSpec g_from_json(const JsonView& v) {
  try {
    if (v.node().is_string()) return parse_polynomial(v.as_string());
    v.require_keys({"coeffs", "power"});
    return FnSpec::polynomial(v.at("coeffs").as_doubles(), v.get_double("power", 1.0));
  } catch (const ParameterError& e) {
    v.fail(e.what());
  }
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["model"] = {{"m", c.model.m}, {"p", c.model.p}, {"mode", to_string(c.model.mode)}, {"seed", c.model.seed}};
  j["n_sum"] = c.n_sum;
  j["g"] = g_to_json(c.g);
  j["k"] = c.k;
  if (c.thetas.empty()) {
    j["thetas"] = {{"auto", c.auto_points}};
  } else {
    j["thetas"] = c.thetas;
  }
  j["n_trials"] = c.n_trials;
  j["confidence"] = c.confidence;
  j["bound"] = {{"c1", c.c1}, {"c2", c.c2}, {"d1", c.d1}, {"d2", c.d2}, {"calibrate_tail", c.calibrate_tail},
                {"tail_samples", c.tail_samples}};
  j["envelope"] = c.calibrate_envelope
                      ? nlohmann::json{{"source", "calibrate"}, {"samples", c.envelope_samples}, {"p_max", c.p_max}}
                      : nlohmann::json{{"source", "fixed"}, {"a", c.envelope_a}, {"p_max", c.p_max}};
  j["condition_subsample"] = c.condition_subsample;
  return j;
}

inline ExperimentConfig experiment_config_from_json(const JsonView& v) {
  v.require_keys({"model", "n_sum", "g", "k", "thetas", "n_trials", "confidence", "bound", "envelope", "condition_subsample"});
  ExperimentConfig c;
  const JsonView mv = v.at("model");
  mv.require_keys({"m", "p", "mode", "seed"});
  c.model.m = mv.at("m").as_positive();
  c.model.p = mv.at("p").as_positive();
  if (mv.has("mode")) {
    try {
      c.model.mode = parse_sample_mode(mv.at("mode").as_string());
    } catch (const ParameterError& e) {
      mv.at("mode").fail(e.what());
    }
  }
  if (mv.has("seed")) c.model.seed = mv.at("seed").as_u64();
  c.n_sum = v.get_positive("n_sum", c.n_sum);
  if (v.has("g")) c.g = g_from_json(v.at("g"));
  c.k = v.get_positive("k", c.k);
  if (v.has("thetas")) {
    const JsonView tv = v.at("thetas");
    if (tv.node().is_array()) {
      c.thetas = tv.as_doubles();
    } else {
      tv.require_keys({"auto"});
      c.auto_points = tv.at("auto").as_positive();
    }
  }
  c.n_trials = v.get_positive("n_trials", c.n_trials);
  c.confidence = v.get_double("confidence", c.confidence);
  if (v.has("bound")) {
    const JsonView bv = v.at("bound");
    bv.require_keys({"c1", "c2", "d1", "d2", "calibrate_tail", "tail_samples"});
    c.c1 = bv.get_double("c1", c.c1);
    c.c2 = bv.get_double("c2", c.c2);
    c.d1 = bv.get_double("d1", c.d1);
    c.d2 = bv.get_double("d2", c.d2);
    c.calibrate_tail = bv.get_bool("calibrate_tail", c.calibrate_tail);
    c.tail_samples = bv.get_positive("tail_samples", c.tail_samples);
  }
  if (v.has("envelope")) {
    const JsonView ev = v.at("envelope");
    ev.require_keys({"source", "a", "samples", "p_max"});
    const std::string src = ev.get_string("source", "calibrate");
    if (src != "calibrate" && src != "fixed") ev.at("source").fail("expected \"calibrate\" or \"fixed\"");
    c.calibrate_envelope = src == "calibrate";
    if (!c.calibrate_envelope) c.envelope_a = ev.at("a").as_double();
    c.envelope_samples = ev.get_positive("samples", c.envelope_samples);
    c.p_max = static_cast<unsigned>(ev.get_positive("p_max", c.p_max));
  }
  if (v.has("condition_subsample")) c.condition_subsample = static_cast<std::size_t>(v.at("condition_subsample").as_u64());
  try {
    c.validate();
  } catch (const ParameterError& e) {
    v.fail(e.what());
  }
  return c;
}

// ----------------------------------------------------------------------------
// Experiment

// Seed streams of the derived per-draw generators.
inline constexpr std::uint64_t kEnvelopeStream = 0xE1;
inline constexpr std::uint64_t kTailStream = 0x7A;
inline constexpr std::uint64_t kTrialStream = 0x7B;

struct ExperimentRow {
  double theta = 0.0;
  double empirical_tail = 0.0;
  double ci_upper = 0.0;
  double bound = 0.0;
  double t_star = 0.0;
  double slack = 0.0;   // bound - ci_upper
  bool vacuous = false; // bound >= 1
  bool sound = false;   // vacuous or bound >= ci_upper
};

struct ExperimentReport {
  ExperimentConfig config;
  Envelope envelope;
  TailBoundParams params;
  bool tail_calibrated = false;
  TailFit tail_fit;
  std::vector<ExperimentRow> rows;
  double stat_mean = 0.0, stat_max = 0.0, lambda_max_mean = 0.0, lambda_min_mean = 0.0;
  std::size_t rejections = 0, accepted_draws = 0;
  std::size_t condition_trials = 0;
  double subexp_pass_rate = 0.0, g_exp_pass_rate = 0.0;
  bool g_exp_checked = false;  // false when no row has a positive t_star
  double runtime_seconds = 0.0;  // diagnostics only; never serialized

  bool sound() const {
    return std::all_of(rows.begin(), rows.end(), [](const ExperimentRow& r) { return r.sound; });
  }
  std::size_t nonvacuous_rows() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const ExperimentRow& r) { return !r.vacuous; }));
  }
};

// Envelope a from a pre-pass of single draws (stream kEnvelopeStream).
inline Envelope calibrate_envelope_prepass(const RandomModel& model, std::size_t samples, unsigned p_max, unsigned threads) {
  std::vector<double> a(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    CounterRng rng(derive_seed(model.seed, kEnvelopeStream, i));
    a[i] = envelope_of(sample_spectrum(model, rng), p_max);
  });
  return Envelope{std::max(*std::max_element(a.begin(), a.end()), kMinEnvelope), p_max};
}

// Largest T-singular values of single draws (stream kTailStream).
inline std::vector<double> sigma1_samples(const RandomModel& model, std::size_t samples, unsigned threads) {
  std::vector<double> s(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    CounterRng rng(derive_seed(model.seed, kTailStream, i));
    s[i] = t_singular_values(sample_spectrum(model, rng)).max();
  });
  return s;
}

// Automatic grid: auto_points values evenly spaced from the median of the
// statistic to 1.5 times its largest observed value.
inline std::vector<double> auto_theta_grid(std::vector<double> stats, std::size_t points) {
  std::sort(stats.begin(), stats.end());
  const double lo = std::max(stats[stats.size() / 2], 1e-12);
  const double hi = std::max(1.5 * stats.back(), lo * (1.0 + 1e-6));
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep;
  rep.config = cfg;
  const RandomModel& model = cfg.model;

  rep.envelope = cfg.calibrate_envelope ? calibrate_envelope_prepass(model, cfg.envelope_samples, cfg.p_max, cfg.threads)
                                        : Envelope{cfg.envelope_a, cfg.p_max};
  TailBoundParams q;
  q.m = model.m;
  q.p = model.p;
  q.n_sum = cfg.n_sum;
  q.k = cfg.k;
  q.g = cfg.g;
  q.env = rep.envelope;
  q.c1 = cfg.c1;
  q.c2 = cfg.c2;
  q.d1 = cfg.d1;
  q.d2 = cfg.d2;
  if (cfg.calibrate_tail) {
    rep.tail_fit = fit_tail_constants(sigma1_samples(model, cfg.tail_samples, cfg.threads), model.m);
    rep.tail_calibrated = true;
    q.d1 = rep.tail_fit.d1;
    q.d2 = rep.tail_fit.d2;
  }
  rep.params = q;

  const std::size_t n = cfg.n_trials;
  const std::size_t n_cond = std::min(cfg.condition_subsample, n);
  const double a_env = rep.envelope.a;
  std::vector<double> stat(n), lmax(n), lmin(n);
  std::vector<std::size_t> rejected(n, 0), subexp_ok(n, 0);
  std::vector<BlockSpectrum> kept(n_cond);
  const GaugeSpec gauge = GaugeSpec::ky_fan(cfg.k);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    try {
      CounterRng rng(derive_seed(model.seed, kTrialStream, i));
      BlockSpectrum sum = BlockSpectrum::zeros(model.m, model.p);
      for (std::size_t j = 0; j < cfg.n_sum; ++j) {
        BlockSpectrum x = sample_spectrum(model, rng);
        std::size_t tries = 0;
        while (envelope_of(x, cfg.p_max) > a_env) {
          if (++tries > cfg.max_resample) throw NumericError("envelope rejects every draw; resample budget exhausted");
          x = sample_spectrum(model, rng);
        }
        rejected[i] += tries;
        if (i < n_cond) subexp_ok[i] += check_subexp_domination(x, rep.envelope).passed() ? 1 : 0;
        sum = sum + x;
      }
      const TEigenSystem e = t_eigenvalues(sum);
      lmax[i] = e.max();
      lmin[i] = e.min();
      stat[i] = gauge_norm(apply_fn(sum, cfg.g), gauge);
      if (i < n_cond) kept[i] = std::move(sum);
    } catch (const Error& err) {
      throw NumericError("trial " + std::to_string(i) + ": " + err.what());
    }
  });

  for (std::size_t i = 0; i < n; ++i) {
    rep.stat_mean += stat[i];
    rep.stat_max = i == 0 ? stat[i] : std::max(rep.stat_max, stat[i]);
    rep.lambda_max_mean += lmax[i];
    rep.lambda_min_mean += lmin[i];
    rep.rejections += rejected[i];
  }
  rep.stat_mean /= static_cast<double>(n);
  rep.lambda_max_mean /= static_cast<double>(n);
  rep.lambda_min_mean /= static_cast<double>(n);
  rep.accepted_draws = n * cfg.n_sum;

  const std::vector<double> thetas = cfg.thetas.empty() ? auto_theta_grid(stat, cfg.auto_points) : cfg.thetas;
  rep.config.thetas = thetas;
  const std::vector<TailRow> tails = empirical_tail(stat, thetas, cfg.confidence);
  // A constant g leaves the bound's t-domain unbounded and the formula
  // degenerate (its infimum is 0 while the tail is 1 below k a0^s); those
  // rows carry the trivial bound 1 at t = 0.
  const bool has_bound = cfg.g.degree() > 0;
  std::vector<BoundResult> bounds(thetas.size(), BoundResult{1.0, 0.0, 0.0, true});
  if (has_bound)
    parallel_for(thetas.size(), cfg.threads, [&](std::size_t r) { bounds[r] = kyfan_bernstein_bound(q, thetas[r]); });
  for (std::size_t r = 0; r < thetas.size(); ++r) {
    ExperimentRow row;
    row.theta = thetas[r];
    row.empirical_tail = tails[r].fraction;
    row.ci_upper = tails[r].ci_upper;
    row.bound = bounds[r].bound;
    row.t_star = bounds[r].t_star;
    row.slack = row.bound - row.ci_upper;
    row.vacuous = row.bound >= 1.0;
    row.sound = row.vacuous || row.bound >= row.ci_upper;
    rep.rows.push_back(row);
  }

  // condition checks on the first n_cond trials, at every row's t_star
  rep.condition_trials = n_cond;
  rep.g_exp_checked = has_bound && n_cond > 0;
  if (n_cond > 0) {
    std::vector<std::size_t> gexp_ok(n_cond, 0);
    if (rep.g_exp_checked) parallel_for(n_cond, cfg.threads, [&](std::size_t i) {
      for (const auto& row : rep.rows) gexp_ok[i] += check_g_exp_condition(kept[i], cfg.g, row.t_star).passed() ? 1 : 0;
    });
    std::size_t sub = 0, gex = 0;
    for (std::size_t i = 0; i < n_cond; ++i) {
      sub += subexp_ok[i];
      gex += gexp_ok[i];
    }
    rep.subexp_pass_rate = static_cast<double>(sub) / static_cast<double>(n_cond * cfg.n_sum);
    if (rep.g_exp_checked) rep.g_exp_pass_rate = static_cast<double>(gex) / static_cast<double>(n_cond * rep.rows.size());
  }
  return rep;
}

// ----------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["format"] = "tprod-mc-report";
  j["version"] = 1;
  j["config"] = to_json(r.config);
  j["envelope"] = {{"a", r.envelope.a}, {"p_max", r.envelope.p_max}, {"source", r.config.calibrate_envelope ? "calibrate" : "fixed"}};
  j["tail_constants"] = {{"c1", r.params.c1}, {"c2", r.params.c2}, {"d1", r.params.d1}, {"d2", r.params.d2},
                         {"calibrated", r.tail_calibrated}, {"phi", phi(static_cast<double>(r.params.m), r.params.d1, r.params.d2)}};
  if (r.tail_calibrated) j["tail_constants"]["fit"] = {{"d1_fit", r.tail_fit.d1_fit}, {"points", r.tail_fit.points}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"theta", row.theta}, {"empirical_tail", row.empirical_tail}, {"ci_upper", row.ci_upper},
                    {"bound", row.bound}, {"t_star", row.t_star}, {"slack", row.slack}, {"vacuous", row.vacuous},
                    {"sound", row.sound}});
  j["rows"] = rows;
  j["statistics"] = {{"kyfan_mean", r.stat_mean}, {"kyfan_max", r.stat_max}, {"lambda_max_mean", r.lambda_max_mean},
                     {"lambda_min_mean", r.lambda_min_mean}};
  const double total = static_cast<double>(r.rejections + r.accepted_draws);
  j["rejections"] = {{"count", r.rejections}, {"rate", total > 0 ? static_cast<double>(r.rejections) / total : 0.0}};
  j["conditions"] = {{"checked_trials", r.condition_trials}, {"subexp_pass_rate", r.subexp_pass_rate},
                     {"g_exp_pass_rate", r.g_exp_checked ? nlohmann::json(r.g_exp_pass_rate) : nlohmann::json(nullptr)}};
  j["sound"] = r.sound();
  j["nonvacuous_rows"] = r.nonvacuous_rows();
  return j;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// CSV with header theta,empirical,ci_upper,bound,t_star,slack from a
// serialized report.
inline std::string report_csv(const nlohmann::json& report, const std::string& source = {}) {
  const JsonView v(report, "", source);
  std::string out = "theta,empirical,ci_upper,bound,t_star,slack\n";
  const JsonView rows = v.at("rows");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const JsonView r = rows.at(i);
    out += format_double(r.at("theta").as_double()) + "," + format_double(r.at("empirical_tail").as_double()) + "," +
           format_double(r.at("ci_upper").as_double()) + "," + format_double(r.at("bound").as_double()) + "," +
           format_double(r.at("t_star").as_double()) + "," + format_double(r.at("slack").as_double()) + "\n";
  }
  return out;
}

}  // namespace tprod
