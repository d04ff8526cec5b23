#pragma once

// Command-line front end. run() is the whole program minus main(), so tests
// can drive it with captured streams.
//
// Exit codes: 0 success; 1 a check failed (verify, or an unsound mc report);
// 2 usage or input error (bad flags, malformed config, missing file);
// 3 numerical or resource failure while computing.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tprod/bounds.hpp"
#include "tprod/errors.hpp"
#include "tprod/io.hpp"
#include "tprod/mc.hpp"
#include "tprod/random.hpp"
#include "tprod/suites.hpp"

namespace tprod::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

namespace detail {

struct Common {
  std::optional<std::uint64_t> seed;
  bool json = false;
  unsigned threads = 0;
};

inline void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "master seed");
  sub->add_flag("--json", c.json, "compact machine-readable output");
  sub->add_option("--threads", c.threads, "worker threads (0 = TPROD_THREADS or hardware)");
}

inline void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

inline std::string dump(const nlohmann::json& j, bool compact) { return (compact ? j.dump() : j.dump(2)) + "\n"; }

struct ModelFlags {
  std::size_t m = 4;
  std::size_t p = 3;
  std::string mode = "paper_literal";
  std::string model_file;

  void add(CLI::App* sub) {
    sub->add_option("--m", m, "block dimension")->check(CLI::PositiveNumber);
    sub->add_option("--p", p, "number of frequency blocks")->check(CLI::PositiveNumber);
    sub->add_option("--mode", mode, "paper_literal | real_tensor");
    sub->add_option("--model", model_file, "model JSON {\"m\",\"p\",\"mode\",\"seed\"}; overrides --m/--p/--mode");
  }

  RandomModel resolve(const std::optional<std::uint64_t>& seed) const {
    RandomModel r{m, p, parse_sample_mode(mode), seed.value_or(0)};
    if (!model_file.empty()) {
      const nlohmann::json j = read_json_file(model_file);
      const JsonView v(j, "", model_file);
      v.require_keys({"m", "p", "mode", "seed"});
      r.m = v.at("m").as_positive();
      r.p = v.at("p").as_positive();
      if (v.has("mode")) {
        try {
          r.mode = parse_sample_mode(v.at("mode").as_string());
        } catch (const ParameterError& e) {
          v.at("mode").fail(e.what());
        }
      }
      if (v.has("seed")) r.seed = v.at("seed").as_u64();
      if (seed) r.seed = *seed;
    }
    r.validate();
    return r;
  }
};

inline nlohmann::json model_json(const RandomModel& r) {
  return {{"m", r.m}, {"p", r.p}, {"mode", to_string(r.mode)}, {"seed", r.seed}};
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"tprod: T-product tensor spectra, inequality checks, Bernstein bounds and Monte Carlo"};
  app.name("tprod_cli");
  app.require_subcommand(1);

  // sample ------------------------------------------------------------------
  detail::Common sample_c;
  detail::ModelFlags sample_m;
  std::uint64_t sample_index = 0;
  std::size_t sample_count = 1;
  bool sample_freq = false;
  std::string sample_out;
  CLI::App* sample = app.add_subcommand("sample", "draw random symmetric tensors and write ttj");
  detail::add_common(sample, sample_c);
  sample_m.add(sample);
  sample->add_option("--index", sample_index, "index of the first draw");
  sample->add_option("--count", sample_count, "number of draws (more than one gives a JSON array)")->check(CLI::PositiveNumber);
  sample->add_flag("--frequency", sample_freq, "write the frequency-domain spectrum instead of the tensor");
  sample->add_option("--out", sample_out, "output file (default stdout)");

  // verify ------------------------------------------------------------------
  detail::Common verify_c;
  std::string verify_suite = "all";
  std::size_t verify_trials = 100;
  double verify_tol = kIneqTol;
  CLI::App* verify = app.add_subcommand("verify", "run randomized inequality suites");
  detail::add_common(verify, verify_c);
  verify->add_option("--suite", verify_suite, "suite name or 'all'");
  verify->add_option("--trials", verify_trials, "random instances per suite")->check(CLI::PositiveNumber);
  verify->add_option("--tol", verify_tol, "verdict tolerance")->check(CLI::PositiveNumber);

  // bound -------------------------------------------------------------------
  detail::Common bound_c;
  std::string bound_kind = "kyfan";
  std::string bound_g = "0,1";
  double bound_theta = 0.0, bound_env = 1.0;
  std::optional<double> bound_tlo, bound_thi;
  TailBoundParams bq;
  CLI::App* bound = app.add_subcommand("bound", "evaluate a Bernstein tail bound");
  detail::add_common(bound, bound_c);
  bound->add_option("--kind", bound_kind, "kyfan | eigen-max | eigen-min")
      ->check(CLI::IsMember({"kyfan", "eigen-max", "eigen-min"}));
  bound->add_option("--theta", bound_theta, "tail level")->required();
  bound->add_option("--k", bq.k, "Ky Fan order")->check(CLI::PositiveNumber);
  bound->add_option("--g", bound_g, "polynomial \"a0,a1,...[:s]\"");
  bound->add_option("--m", bq.m, "block dimension")->check(CLI::PositiveNumber);
  bound->add_option("--p", bq.p, "number of frequency blocks")->check(CLI::PositiveNumber);
  bound->add_option("--nsum", bq.n_sum, "number of summands")->check(CLI::PositiveNumber);
  bound->add_option("--c1", bq.c1, "eigenvalue tail constant c1");
  bound->add_option("--c2", bq.c2, "eigenvalue tail constant c2");
  bound->add_option("--d1", bq.d1, "singular value tail constant d1");
  bound->add_option("--d2", bq.d2, "singular value tail constant d2");
  bound->add_option("--envelope", bound_env, "sub-exponential envelope a");
  bound->add_option("--pmax", bq.env.p_max, "envelope moment order");
  bound->add_option("--t-lo", bound_tlo, "eigenvalue bound: smallest t searched");
  bound->add_option("--t-hi", bound_thi, "eigenvalue bound: largest t searched");

  // calibrate ---------------------------------------------------------------
  detail::Common cal_c;
  detail::ModelFlags cal_m;
  std::size_t cal_samples = 1000;
  unsigned cal_pmax = 8;
  std::string cal_out;
  CLI::App* calibrate = app.add_subcommand("calibrate", "fit envelope a and tail constants d1, d2 from samples");
  detail::add_common(calibrate, cal_c);
  cal_m.add(calibrate);
  calibrate->add_option("--samples", cal_samples, "draws per calibration")->check(CLI::PositiveNumber);
  calibrate->add_option("--pmax", cal_pmax, "envelope moment order")->check(CLI::Range(2u, 64u));
  calibrate->add_option("--out", cal_out, "output file (default stdout)");

  // mc ----------------------------------------------------------------------
  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo experiments");
  mc->require_subcommand(1);
  detail::Common run_c, rep_c;
  std::string run_cfg, run_out, rep_in, rep_csv;
  CLI::App* mc_run = mc->add_subcommand("run", "run an experiment from a config file");
  detail::add_common(mc_run, run_c);
  mc_run->add_option("--config", run_cfg, "experiment config JSON")->required();
  mc_run->add_option("--out", run_out, "report file (default stdout)");
  CLI::App* mc_report = mc->add_subcommand("report", "turn a report into CSV");
  detail::add_common(mc_report, rep_c);
  mc_report->add_option("--in", rep_in, "report JSON")->required();
  mc_report->add_option("--csv", rep_csv, "CSV file (default stdout)");

  std::vector<const char*> argv{"tprod_cli"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (sample->parsed()) {
      const RandomModel model = sample_m.resolve(sample_c.seed);
      nlohmann::json docs = nlohmann::json::array();
      for (std::size_t i = 0; i < sample_count; ++i) {
        const BlockSpectrum s = sample_spectrum(model, sample_index + i);
        docs.push_back(sample_freq ? to_ttj(s) : to_ttj(from_spectrum(s)));
      }
      detail::emit(out, sample_out, detail::dump(sample_count == 1 ? docs[0] : docs, sample_c.json));
      return kExitOk;
    }

    if (verify->parsed()) {
      std::vector<const SuiteDef*> chosen;
      if (verify_suite == "all") {
        for (const auto& s : suite_registry()) chosen.push_back(&s);
      } else {
        chosen.push_back(&find_suite(verify_suite));
      }
      const SuiteOptions opt{verify_c.seed.value_or(0), verify_trials, verify_c.threads, verify_tol};
      nlohmann::json reports = nlohmann::json::array();
      bool all_passed = true;
      for (const SuiteDef* s : chosen) {
        const auto t0 = std::chrono::steady_clock::now();
        const CheckReport r = run_suite(*s, opt);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        all_passed = all_passed && r.passed();
        reports.push_back(to_json(r));
        if (!verify_c.json) {
          out << (r.passed() ? "PASS " : "FAIL ") << s->name << "  instances=" << opt.trials << " checks=" << r.trials
              << " passes=" << r.passes << " worst_margin=" << r.worst_margin << "\n";
          if (!r.passed()) out << "  witness: " << r.witness.dump() << "\n";
        }
        err << "verify: " << s->name << " took " << secs << " s\n";
      }
      if (verify_c.json)
        out << detail::dump({{"seed", opt.seed}, {"trials", opt.trials}, {"tol", opt.tol}, {"passed", all_passed}, {"suites", reports}},
                            true);
      return all_passed ? kExitOk : kExitCheckFailed;
    }

    if (bound->parsed()) {
      bq.g = parse_polynomial(bound_g);
      bq.env.a = bound_env;
      if (bound_tlo) bq.t_lo = *bound_tlo;
      if (bound_thi) bq.t_hi = *bound_thi;
      BoundResult r;
      if (bound_kind == "kyfan") {
        r = kyfan_bernstein_bound(bq, bound_theta);
      } else {
        r = eigen_bernstein_bound(bq, bound_theta, bound_kind == "eigen-max" ? EigenSide::max : EigenSide::min);
      }
      nlohmann::json j{{"kind", bound_kind}, {"theta", bound_theta}, {"bound", r.bound}, {"t_star", r.t_star},
                       {"log_bound", r.log_bound}, {"boundary", r.boundary}, {"params", to_json(bq)}};
      out << detail::dump(j, bound_c.json);
      return kExitOk;
    }

    if (calibrate->parsed()) {
      const RandomModel model = cal_m.resolve(cal_c.seed);
      const Envelope env = calibrate_envelope_prepass(model, cal_samples, cal_pmax, cal_c.threads);
      const TailFit fit = fit_tail_constants(sigma1_samples(model, cal_samples, cal_c.threads), model.m);
      nlohmann::json j{{"model", detail::model_json(model)},
                       {"samples", cal_samples},
                       {"envelope", {{"a", env.a}, {"p_max", env.p_max}}},
                       {"tail", {{"d1", fit.d1}, {"d2", fit.d2}, {"d1_fit", fit.d1_fit}, {"points", fit.points}}},
                       {"phi", phi(static_cast<double>(model.m), fit.d1, fit.d2)}};
      detail::emit(out, cal_out, detail::dump(j, cal_c.json));
      return kExitOk;
    }

    if (mc_run->parsed()) {
      const nlohmann::json j = read_json_file(run_cfg);
      ExperimentConfig cfg = experiment_config_from_json(JsonView(j, "", run_cfg));
      if (run_c.seed) cfg.model.seed = *run_c.seed;
      cfg.threads = run_c.threads;
      const auto t0 = std::chrono::steady_clock::now();
      const ExperimentReport rep = run_experiment(cfg);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const nlohmann::json rj = to_json(rep);
      detail::emit(out, run_out, rj.dump(2) + "\n");
      err << "mc: " << cfg.n_trials << " trials, " << rep.rows.size() << " rows (" << rep.nonvacuous_rows()
          << " non-vacuous), sound=" << (rep.sound() ? "yes" : "no") << ", rejections=" << rep.rejections << ", runtime "
          << secs << " s\n";
      if (run_c.json && !run_out.empty())
        out << detail::dump({{"out", run_out}, {"sound", rep.sound()}, {"nonvacuous_rows", rep.nonvacuous_rows()}}, true);
      return rep.sound() ? kExitOk : kExitCheckFailed;
    }

    if (mc_report->parsed()) {
      const nlohmann::json j = read_json_file(rep_in);
      detail::emit(out, rep_csv, report_csv(j, rep_in));
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  err << "error: no subcommand\n";
  return kExitUsage;
}

}  // namespace tprod::cli
