// Command-line experiment runner: simulate, fit, benchmark, freq-sweep,
// projectile.

#include "sparseid/csv.hpp"
#include "sparseid/errors.hpp"
#include "sparseid/experiments.hpp"
#include "sparseid/preprocess.hpp"
#include "sparseid/solvers.hpp"

#include <CLI11/CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sparseid;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  fs::path out_dir = ".";
  std::size_t jobs = 1;
  bool verbose = false;
};

// Options bound to CLI11 before they are turned into library structs.
struct SystemFlags {
  SystemOptions options;
  std::vector<double> x0;
  double t0 = 0.0;
  double tf = 0.0;
  double dt = 0.0;
  double vdp_omega = 0.0;
  CLI::Option* x0_opt = nullptr;
  CLI::Option* t0_opt = nullptr;
  CLI::Option* tf_opt = nullptr;
  CLI::Option* dt_opt = nullptr;
  CLI::Option* omega_opt = nullptr;
  CLI::Option* alphas_opt = nullptr;

  void bind(CLI::App* app, bool with_name = true) {
    if (with_name) {
      app->add_option("--system", options.name,
                      "lorenz, fhn, logistic, logistic-decay or vdp")
          ->capture_default_str();
    }
    x0_opt = app->add_option("--x0", x0, "initial state")->delimiter(',');
    t0_opt = app->add_option("--t0", t0, "start time");
    tf_opt = app->add_option("--tf", tf, "end time");
    dt_opt = app->add_option("--dt", dt, "sample spacing");
    app->add_option("--fhn-cubic-sign", options.fhn_cubic_sign,
                    "sign of the x^3/3 term of FitzHugh-Nagumo")
        ->capture_default_str();
    app->add_option("--logistic-r", options.logistic_r)->capture_default_str();
    app->add_option("--logistic-k", options.logistic_k)->capture_default_str();
    omega_opt = app->add_option("--vdp-omega", vdp_omega,
                                "forcing frequency (default pi/5 + 0.01)");
    app->add_option("--vdp-mu", options.vdp_mu)->capture_default_str();
    app->add_option("--vdp-amplitude", options.vdp_amplitude)
        ->capture_default_str();
    app->add_option("--vdp-damping-sign", options.vdp_damping_sign,
                    "-1: limit cycle, +1: x'' + mu (1 - x^2) x' + x = A sin")
        ->capture_default_str();
    alphas_opt = app->add_option(
                        "--time-alphas", options.vdp_alpha_count,
                        "library forcing frequencies pi/i, i = 1..N (0: none)")
                     ->capture_default_str();
  }

  SystemOptions resolve() const {
    SystemOptions o = options;
    if (*x0_opt) o.x0 = x0;
    if (*t0_opt) o.t0 = t0;
    if (*tf_opt) o.tf = tf;
    if (*dt_opt) o.dt = dt;
    if (*omega_opt) o.vdp_omega = vdp_omega;
    return o;
  }
};

struct SolverFlags {
  std::vector<std::size_t> sparsity;
  std::vector<double> threshold;
  std::vector<double> schedule;
  std::size_t max_iterations = 500;
  bool normalize = false;
  CLI::Option* sparsity_opt = nullptr;
  CLI::Option* threshold_opt = nullptr;
  CLI::Option* schedule_opt = nullptr;
  CLI::Option* normalize_opt = nullptr;

  void bind(CLI::App* app) {
    sparsity_opt = app->add_option("--sparsity", sparsity,
                                   "s, one value or one per equation")
                       ->delimiter(',');
    threshold_opt = app->add_option("--lambda", threshold,
                                    "lambda, one value or one per equation")
                        ->delimiter(',');
    schedule_opt = app->add_option("--schedule", schedule,
                                   "reactivation probabilities ending in 0")
                       ->delimiter(',');
    app->add_option("--max-iterations", max_iterations)->capture_default_str();
    normalize_opt = app->add_flag("--normalize,!--no-normalize", normalize,
                                  "scale library columns to unit norm");
  }

  SolverOptions resolve() const {
    SolverOptions o;
    if (*sparsity_opt) o.sparsity = sparsity;
    if (*threshold_opt) o.threshold = threshold;
    if (*schedule_opt) o.schedule = schedule;
    if (*normalize_opt) o.normalize = normalize;
    o.max_iterations = max_iterations;
    return o;
  }
};

std::vector<Algorithm> parse_algorithms(const std::vector<std::string>& names) {
  std::vector<Algorithm> out;
  for (const auto& n : names) out.push_back(parse_algorithm(n));
  return out;
}

CLI::Option* add_algorithms(CLI::App* app, std::vector<std::string>& names) {
  return app->add_option("--algorithms", names,
                         "comma list of sindy, sindy_anne, shtrep, shtrep_a")
      ->delimiter(',')
      ->capture_default_str();
}

void write_file(const fs::path& path, const auto& writer) {
  auto out = open_output(path);
  writer(out);
  out.flush();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string show(double v) { return format_double(v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse identification of dynamical systems"};
  app.set_config("--config", "", "INI file; [section] names a subcommand");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "directory for output files")
      ->capture_default_str();
  app.add_option("--jobs", g.jobs, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--verbose,-v", g.verbose, "progress on stderr");

  // simulate
  auto* sim = app.add_subcommand("simulate", "integrate a built-in system");
  SystemFlags sim_system;
  sim_system.bind(sim);
  double sim_noise = 0.0;
  std::string sim_out;
  sim->add_option("--noise-variance", sim_noise)->capture_default_str();
  sim->add_option("--out", sim_out, "output CSV (default <out-dir>/<system>.csv)");

  // fit
  auto* fitc = app.add_subcommand("fit", "learn one model");
  SystemFlags fit_system_flags;
  fit_system_flags.bind(fitc);
  SolverFlags fit_solver;
  fit_solver.bind(fitc);
  std::string fit_input;
  std::string fit_algorithm = "shtrep";
  std::size_t fit_degree = 0;
  bool fit_no_constant = false;
  double fit_noise = 0.0;
  bool fit_analytic = false;
  std::size_t fit_passes = 0;
  std::size_t fit_window = kDefaultSmoothingWindow;
  auto* fit_input_opt = fitc->add_option(
      "--input", fit_input, "trajectory CSV (t, channels...) instead of --system");
  fitc->add_option("--algorithm", fit_algorithm)->capture_default_str();
  auto* fit_degree_opt = fitc->add_option("--degree", fit_degree,
                                          "polynomial degree of the library");
  fitc->add_flag("--no-constant", fit_no_constant);
  fitc->add_option("--noise-variance", fit_noise)->capture_default_str();
  fitc->add_flag("--analytic-derivatives", fit_analytic,
                 "evaluate the true right-hand side instead of differencing");
  fitc->add_option("--smooth-passes", fit_passes)->capture_default_str();
  fitc->add_option("--smooth-window", fit_window)->capture_default_str();

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "noise-ensemble study");
  SystemFlags bench_system;
  bench_system.bind(bench);
  SolverFlags bench_solver;
  bench_solver.bind(bench);
  BenchmarkConfig bench_cfg;
  std::vector<std::string> bench_algorithms = {"sindy", "sindy_anne", "shtrep",
                                               "shtrep_a"};
  std::size_t bench_degree = 0;
  auto* bench_degree_opt = bench->add_option("--degree", bench_degree);
  bench->add_option("--variances", bench_cfg.variances, "comma list")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--profiles", bench_cfg.profiles, "noise profiles per variance")
      ->capture_default_str();
  add_algorithms(bench, bench_algorithms);
  bench->add_flag("--analytic-derivatives", bench_cfg.analytic_derivatives);

  // freq-sweep
  auto* sweep = app.add_subcommand("freq-sweep", "forcing-frequency sweep (vdp)");
  SystemFlags sweep_system;
  sweep_system.bind(sweep, false);
  SolverFlags sweep_solver;
  sweep_solver.bind(sweep);
  FreqSweepConfig sweep_cfg;
  sweep_cfg.omega_min = std::numbers::pi / 5.0;
  sweep_cfg.omega_max = std::numbers::pi;
  std::vector<std::string> sweep_algorithms = {"shtrep", "shtrep_a"};
  std::size_t sweep_degree = 0;
  auto* sweep_degree_opt = sweep->add_option("--degree", sweep_degree);
  sweep->add_option("--omega-min", sweep_cfg.omega_min)->capture_default_str();
  sweep->add_option("--omega-max", sweep_cfg.omega_max)->capture_default_str();
  sweep->add_option("--steps", sweep_cfg.steps, "grid points")->required();
  sweep->add_option("--noise-variance", sweep_cfg.variance)->capture_default_str();
  add_algorithms(sweep, sweep_algorithms);
  sweep->add_flag("--analytic-derivatives", sweep_cfg.analytic_derivatives);

  // projectile
  auto* proj = app.add_subcommand("projectile", "tracked-trajectory pipeline");
  ProjectileConfig proj_cfg;
  std::string proj_input;
  std::vector<std::string> proj_algorithms = {"sindy", "sindy_anne", "shtrep",
                                              "shtrep_a"};
  std::size_t proj_trim = 0;
  bool proj_normalize = false;
  proj->add_option("--input", proj_input, "CSV with t, x, y")->required();
  proj->add_option("--passes", proj_cfg.passes, "moving-average passes")
      ->capture_default_str();
  proj->add_option("--window", proj_cfg.window)->capture_default_str();
  auto* proj_trim_opt = proj->add_option(
      "--edge-trim", proj_trim,
      "samples dropped at each end (default passes * (window - 1) / 2)");
  proj->add_option("--degree", proj_cfg.degree)->capture_default_str();
  proj->add_option("--sx", proj_cfg.sparsity_x)->capture_default_str();
  proj->add_option("--sy", proj_cfg.sparsity_y)->capture_default_str();
  proj->add_option("--lambda-x", proj_cfg.threshold_x)->capture_default_str();
  proj->add_option("--lambda-y", proj_cfg.threshold_y)->capture_default_str();
  proj->add_option("--max-iterations", proj_cfg.max_iterations)
      ->capture_default_str();
  auto* proj_normalize_opt =
      proj->add_flag("--normalize,!--no-normalize", proj_normalize);
  proj->add_option("--x-channel", proj_cfg.x_channel)->capture_default_str();
  proj->add_option("--y-channel", proj_cfg.y_channel)->capture_default_str();
  add_algorithms(proj, proj_algorithms);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  auto log = [&](const std::string& msg) {
    if (g.verbose) std::cerr << msg << '\n';
  };

  try {
    if (*sim) {
      const SystemSetup setup = make_system_setup(sim_system.resolve());
      TimeSeries x = simulate(setup);
      if (sim_noise > 0.0) {
        x = add_gaussian_noise(x, {sim_noise, g.seed});
      } else if (sim_noise < 0.0) {
        throw ContractError("noise variance must be >= 0");
      }
      const fs::path out =
          sim_out.empty() ? g.out_dir / (setup.name + ".csv") : fs::path(sim_out);
      write_file(out, [&](std::ostream& os) { write_timeseries_csv(os, x); });
      log("wrote " + std::to_string(x.samples()) + " samples to " + out.string());
      std::cout << out.string() << '\n';
    } else if (*fitc) {
      FitOptions o;
      o.system = fit_system_flags.resolve();
      if (*fit_input_opt) o.data = load_tracking_csv(fit_input);
      if (*fit_degree_opt) o.degree = fit_degree;
      if (*fit_system_flags.alphas_opt) {
        o.time_alpha_count = o.system.vdp_alpha_count;
      }
      o.include_constant = !fit_no_constant;
      o.algorithm = parse_algorithm(fit_algorithm);
      o.solver = fit_solver.resolve();
      o.noise_variance = fit_noise;
      o.analytic_derivatives = fit_analytic;
      o.smooth_passes = fit_passes;
      o.smooth_window = fit_window;
      o.seed = g.seed;
      const FitReport report = run_fit(o);
      std::cout << format_model(report);
      if (report.truth) {
        std::cout << "rel_l1 = " << show(report.rel_l1)
                  << "  rel_l2 = " << show(report.rel_l2) << '\n';
      }
      std::vector<std::string> equations;
      for (const auto& v : report.variables) equations.push_back("d" + v + "/dt");
      const fs::path out = g.out_dir / "coefficients.csv";
      write_file(out, [&](std::ostream& os) {
        write_coefficients_csv(os, report.fit.coefficients, equations);
      });
      log("wrote " + out.string());
    } else if (*bench) {
      bench_cfg.system = bench_system.resolve();
      if (*bench_degree_opt) bench_cfg.degree = bench_degree;
      bench_cfg.algorithms = parse_algorithms(bench_algorithms);
      bench_cfg.solver = bench_solver.resolve();
      bench_cfg.seed = g.seed;
      bench_cfg.jobs = g.jobs;
      const auto start = std::chrono::steady_clock::now();
      const BenchmarkResult result = run_benchmark(bench_cfg);
      log("benchmark: " + std::to_string(result.records.size()) + " runs in " +
          show(std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start)
                   .count()) +
          " s");
      write_file(g.out_dir / "ensemble.csv",
                 [&](std::ostream& os) { write_ensemble_csv(os, result); });
      write_file(g.out_dir / "summary.csv",
                 [&](std::ostream& os) { write_summary_csv(os, result); });
      write_file(g.out_dir / "timing.csv",
                 [&](std::ostream& os) { write_timing_csv(os, result); });
      std::printf("%-11s %-10s %5s %5s %12s %12s\n", "algorithm", "variance",
                  "runs", "fail", "rel_l1_mean", "rel_l1_std");
      for (const auto& s : result.summary) {
        std::printf("%-11s %-10g %5zu %5zu %12.6g %12.6g\n",
                    std::string(algorithm_name(s.algorithm)).c_str(), s.variance,
                    s.runs, s.failures, s.l1_mean, s.l1_std);
      }
    } else if (*sweep) {
      sweep_cfg.system = sweep_system.resolve();
      sweep_cfg.system.name = "vdp";
      if (*sweep_degree_opt) sweep_cfg.degree = sweep_degree;
      sweep_cfg.algorithms = parse_algorithms(sweep_algorithms);
      sweep_cfg.solver = sweep_solver.resolve();
      sweep_cfg.seed = g.seed;
      sweep_cfg.jobs = g.jobs;
      const auto records = run_freq_sweep(sweep_cfg);
      const fs::path out = g.out_dir / "freq_sweep.csv";
      write_file(out, [&](std::ostream& os) { write_sweep_csv(os, records); });
      std::size_t failed = 0;
      for (const auto& r : records) failed += r.error.empty() ? 0 : 1;
      std::cout << records.size() << " rows (" << failed << " failed), variance "
                << show(sweep_cfg.variance) << ", written to " << out.string()
                << '\n';
    } else if (*proj) {
      if (*proj_trim_opt) proj_cfg.edge_trim = proj_trim;
      if (*proj_normalize_opt) proj_cfg.normalize = proj_normalize;
      proj_cfg.algorithms = parse_algorithms(proj_algorithms);
      proj_cfg.seed = g.seed;
      const TimeSeries tracked = load_tracking_csv(proj_input);
      const ProjectileReport report = run_projectile(tracked, proj_cfg);
      std::cout << format_projectile_report(report);
      const fs::path out = g.out_dir / "projectile.csv";
      write_file(out, [&](std::ostream& os) {
        CsvWriter w(os);
        w.row({"algorithm", "axis", "term", "coefficient", "status"});
        for (const auto& f : report.fits) {
          const std::string status =
              !f.error.empty() ? f.error : (f.pruned ? "pruned" : "ok");
          for (std::size_t j = 0; j < f.terms.size(); ++j) {
            w.field(algorithm_name(f.algorithm))
                .field(f.axis)
                .field(f.terms[j])
                .field(f.coefficients(static_cast<Index>(j)))
                .field(status);
            w.end_row();
          }
        }
      });
      for (const auto& f : report.fits) {
        if (!f.error.empty()) return kExitSolver;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(std::current_exception());
  }
  return kExitOk;
}
