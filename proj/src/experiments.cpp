#include "sparseid/experiments.hpp"

#include "sparseid/csv.hpp"
#include "sparseid/errors.hpp"
#include "sparseid/metrics.hpp"
#include "sparseid/preprocess.hpp"
#include "sparseid/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>
#include <tuple>

namespace sparseid {

namespace {

// Seed streams derived from one run seed.
constexpr std::uint64_t kNoiseStream = 0;
constexpr std::uint64_t kSolverStream = 1;

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any task is rethrown after every thread has joined.
template <class Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn fn) {
  const std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

double nearest_alpha(const LibrarySpec& library, double omega) {
  if (!library.time_features || library.time_features->alphas.empty()) {
    return omega;
  }
  const auto& alphas = library.time_features->alphas;
  return *std::min_element(alphas.begin(), alphas.end(), [&](double a, double b) {
    return std::abs(a - omega) < std::abs(b - omega);
  });
}

// Ground truth written in the terms of `library`; the forcing expansion is
// taken about the library frequency closest to the true one.
TrueModel true_model(const SystemSetup& setup, const LibrarySpec& library) {
  if (setup.name != "vdp") return setup.truth;
  const auto& p = setup.system.parameters;
  const double omega = p.at("omega");
  return forced_vdp_true_model(omega, nearest_alpha(library, omega), p.at("mu"),
                               p.at("A"), p.at("damping_sign"));
}

std::optional<CoefficientMatrix> truth_coefficients(
    const SystemSetup& setup, const LibrarySpec& library) {
  try {
    return ground_truth_coefficients(true_model(setup, library), library);
  } catch (const MissingTermError&) {
    return std::nullopt;
  }
}

void apply_time_alphas(LibrarySpec& library, std::optional<std::size_t> count) {
  if (!count) return;
  if (*count == 0) {
    library.time_features.reset();
  } else {
    library.time_features = TimeFeatureSpec{harmonic_alphas(*count)};
  }
}

Matrix estimate_derivatives(const SystemSetup* setup, const TimeSeries& x,
                            bool analytic) {
  if (analytic) return analytic_derivatives(setup->system, x);
  return finite_difference(x, 1).values;
}

template <class T>
std::vector<T> per_equation(const std::optional<std::vector<T>>& given,
                            const std::vector<T>& fallback,
                            std::size_t equations, const char* what,
                            Algorithm algorithm) {
  const std::vector<T>& v = given ? *given : fallback;
  if (v.empty()) {
    throw ContractError(std::string(algorithm_name(algorithm)) + " needs a " +
                        what);
  }
  if (v.size() == 1) return std::vector<T>(equations, v.front());
  if (v.size() != equations) {
    throw ContractError(std::string(what) + " list has " +
                        std::to_string(v.size()) + " entries for " +
                        std::to_string(equations) + " equations");
  }
  return v;
}

std::string algorithm_label(Algorithm a) { return std::string(algorithm_name(a)); }

void check_algorithms(const std::vector<Algorithm>& algorithms) {
  if (algorithms.empty()) throw ContractError("no algorithms selected");
}

void check_variance(double v) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ContractError("noise variance must be finite and >= 0");
  }
}

}  // namespace

int exit_code_for(const std::exception_ptr& error) {
  if (!error) return kExitOk;
  try {
    std::rethrow_exception(error);
  } catch (const EquationError& e) {
    return e.cause() ? exit_code_for(e.cause()) : kExitSolver;
  } catch (const IntegrationError&) {
    return kExitIntegration;
  } catch (const ParseError&) {
    return kExitData;
  } catch (const InvalidDataError&) {
    return kExitData;
  } catch (const InsufficientDataError&) {
    return kExitData;
  } catch (const EmptySupportError&) {
    return kExitSolver;
  } catch (const DivergenceError&) {
    return kExitSolver;
  } catch (const DegenerateColumnError&) {
    return kExitSolver;
  } catch (const NoForcingDetectedError&) {
    return kExitSolver;
  } catch (const UndefinedMetricError&) {
    return kExitSolver;
  } catch (const ContractError&) {
    return kExitUsage;
  } catch (const MissingTermError&) {
    return kExitUsage;
  } catch (const LibraryTooLargeError&) {
    return kExitUsage;
  } catch (const DuplicateTermError&) {
    return kExitUsage;
  } catch (...) {
    return kExitFailure;
  }
}

double default_vdp_omega() { return std::numbers::pi / 5.0 + 0.01; }

std::vector<std::string> system_names() {
  return {"lorenz", "fhn", "logistic", "logistic-decay", "vdp"};
}

SystemSetup make_system_setup(const SystemOptions& o) {
  SystemSetup s;
  s.name = o.name;
  std::vector<double> x0;
  double tf = 0.0;
  if (o.name == "lorenz") {
    s.system = lorenz_system();
    x0 = {-8.0, 7.0, 27.0};
    tf = 10.0;
    s.library.poly_degree = 6;
    s.sparsity = {15};
    s.threshold = {0.4, 0.6, 0.2};
    s.truth = lorenz_true_model();
  } else if (o.name == "fhn") {
    s.system = fitzhugh_nagumo_system(o.fhn_cubic_sign);
    x0 = {1.0, 2.0};
    tf = 25.0;
    s.library.poly_degree = 4;
    s.sparsity = {6};
    s.threshold = {0.025};
    s.truth = fitzhugh_nagumo_true_model(o.fhn_cubic_sign);
  } else if (o.name == "logistic" || o.name == "logistic-decay") {
    const bool decay = o.name == "logistic-decay";
    s.system = logistic_system(o.logistic_r, o.logistic_k);
    s.closed_form = true;
    x0 = {decay ? 10.0 : 0.01};
    tf = 10.0;
    s.library.poly_degree = decay ? 10 : 4;
    s.sparsity = {3};
    s.threshold = {decay ? 0.001 : 0.05};
    s.truth = logistic_true_model(o.logistic_r, o.logistic_k);
  } else if (o.name == "vdp") {
    const double omega = o.vdp_omega.value_or(default_vdp_omega());
    s.system = forced_vdp_system(omega, o.vdp_mu, o.vdp_amplitude,
                                 o.vdp_damping_sign);
    x0 = {-1.0, -1.0};
    tf = 40.0;
    s.library.poly_degree = 3;
    s.library.time_features =
        TimeFeatureSpec{harmonic_alphas(o.vdp_alpha_count)};
    s.sparsity = {10};
    s.threshold = {0.005};
  } else {
    throw ContractError("unknown system '" + o.name +
                        "' (expected lorenz, fhn, logistic, logistic-decay "
                        "or vdp)");
  }
  s.library.variable_names = s.system.variable_names;
  s.x0 = to_vector(o.x0.value_or(x0));
  if (s.x0.size() != s.system.dimension()) {
    throw ContractError(o.name + " needs an initial state of dimension " +
                        std::to_string(s.system.dimension()));
  }
  s.t0 = o.t0.value_or(0.0);
  s.tf = o.tf.value_or(s.t0 + tf);
  s.dt = o.dt.value_or(0.01);
  if (!(s.tf > s.t0)) throw ContractError("tf must exceed t0");
  if (!(s.dt > 0.0)) throw ContractError("dt must be positive");
  if (s.name == "vdp") s.truth = true_model(s, s.library);
  return s;
}

TimeSeries simulate(const SystemSetup& setup) {
  if (setup.closed_form) {
    return logistic_trajectory(setup.system.parameters.at("r"),
                               setup.system.parameters.at("K"), setup.x0(0),
                               setup.t0, setup.tf, setup.dt);
  }
  return integrate_rk45(setup.system, setup.x0, setup.t0, setup.tf, setup.dt);
}

std::vector<SolverConfig> equation_configs(
    Algorithm algorithm, const SolverOptions& options,
    const std::vector<std::size_t>& sparsity,
    const std::vector<double>& threshold, std::size_t equations,
    std::uint64_t seed) {
  std::vector<std::size_t> s;
  std::vector<double> lambda;
  if (is_htp_family(algorithm)) {
    s = per_equation(options.sparsity, sparsity, equations, "sparsity",
                     algorithm);
  } else {
    lambda = per_equation(options.threshold, threshold, equations,
                          "threshold", algorithm);
  }
  std::vector<SolverConfig> out;
  for (std::size_t i = 0; i < equations; ++i) {
    SolverConfig c;
    c.algorithm = algorithm;
    if (is_htp_family(algorithm)) {
      c.sparsity = s[i];
    } else {
      c.threshold = lambda[i];
    }
    if (options.schedule) c.schedule = AnnealingSchedule(*options.schedule);
    c.max_iterations = options.max_iterations;
    c.normalize_columns = options.normalize;
    c.seed = mix_seed(seed, i);
    c.validate();
    out.push_back(std::move(c));
  }
  return out;
}

std::string format_equation(std::string_view lhs,
                            const std::vector<std::string>& terms,
                            const Vector& coefficients, int decimals) {
  std::string out(lhs);
  out += " =";
  bool first = true;
  char buf[64];
  const double shown = 0.5 * std::pow(10.0, -decimals);
  for (Index j = 0; j < coefficients.size(); ++j) {
    const double c = coefficients(j);
    if (!(std::abs(c) >= shown)) continue;
    std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(c));
    if (first) {
      out += c < 0 ? " -" : " ";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    out += buf;
    const auto& term = terms[static_cast<std::size_t>(j)];
    if (term != "1") out += "·" + term;
    first = false;
  }
  if (first) out += " 0";
  return out;
}

FitReport run_fit(const FitOptions& o) {
  check_variance(o.noise_variance);
  std::optional<SystemSetup> setup;
  TimeSeries x = o.data ? *o.data : [&] {
    setup = make_system_setup(o.system);
    return simulate(*setup);
  }();

  LibrarySpec library;
  std::vector<std::size_t> sparsity;
  std::vector<double> threshold;
  if (setup) {
    library = setup->library;
    sparsity = setup->sparsity;
    threshold = setup->threshold;
  } else {
    library.variable_names = x.names();
  }
  if (o.degree) library.poly_degree = *o.degree;
  library.include_constant = o.include_constant;
  apply_time_alphas(library, o.time_alpha_count);

  if (o.analytic_derivatives) {
    if (!setup) {
      throw ContractError("analytic derivatives need a built-in system");
    }
    if (o.noise_variance > 0.0 || o.smooth_passes > 0) {
      throw ContractError("analytic derivatives apply to noiseless runs only");
    }
  }
  if (o.noise_variance > 0.0) {
    x = add_gaussian_noise(
        x, {o.noise_variance, mix_seed(o.seed, kNoiseStream)});
  }
  if (o.smooth_passes > 0) x = smooth_series(x, o.smooth_window, o.smooth_passes);
  const Matrix dx =
      estimate_derivatives(setup ? &*setup : nullptr, x, o.analytic_derivatives);

  const auto configs =
      equation_configs(o.algorithm, o.solver, sparsity, threshold,
                       static_cast<std::size_t>(x.dimension()),
                       mix_seed(o.seed, kSolverStream));

  FitReport report;
  report.variables = library.variable_names;
  report.fit = fit_system(x, dx, library, configs);
  if (setup) {
    report.truth = truth_coefficients(*setup, library);
    if (report.truth) {
      report.rel_l1 = rel_l1_error(report.fit.coefficients, *report.truth);
      report.rel_l2 = rel_l2_error(report.fit.coefficients, *report.truth);
    }
  }
  return report;
}

std::string format_model(const FitReport& report) {
  std::string out;
  const auto& xi = report.fit.coefficients;
  for (Index i = 0; i < xi.equations(); ++i) {
    const std::string lhs =
        "d" + report.variables[static_cast<std::size_t>(i)] + "/dt";
    out += format_equation(lhs, xi.column_names, xi.values.row(i).transpose());
    out += '\n';
  }
  return out;
}

void BenchmarkConfig::validate() const {
  if (profiles < 1) throw ContractError("profiles must be at least 1");
  if (variances.empty()) throw ContractError("no noise variances given");
  for (double v : variances) check_variance(v);
  check_algorithms(algorithms);
  if (jobs < 1) throw ContractError("jobs must be at least 1");
  if (analytic_derivatives &&
      std::any_of(variances.begin(), variances.end(),
                  [](double v) { return v > 0.0; })) {
    throw ContractError("analytic derivatives apply to noiseless runs only");
  }
}

std::uint64_t profile_seed(std::uint64_t master, std::size_t variance_index,
                           std::size_t profile) {
  return mix_seed(mix_seed(master, variance_index), profile);
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  SystemSetup setup = make_system_setup(config.system);
  if (config.degree) setup.library.poly_degree = *config.degree;
  const TimeSeries clean = simulate(setup);
  const CoefficientMatrix truth =
      ground_truth_coefficients(true_model(setup, setup.library), setup.library);
  const auto equations = static_cast<std::size_t>(clean.dimension());
  // Fail fast on solver settings rather than once per run.
  for (Algorithm a : config.algorithms) {
    equation_configs(a, config.solver, setup.sparsity, setup.threshold,
                     equations, 0);
  }

  const std::size_t n_alg = config.algorithms.size();
  const std::size_t n_tasks = config.variances.size() * config.profiles;
  std::vector<RunRecord> records(n_tasks * n_alg);

  parallel_for(n_tasks, config.jobs, [&](std::size_t task) {
    const std::size_t vi = task / config.profiles;
    const std::size_t profile = task % config.profiles;
    const double variance = config.variances[vi];
    const std::uint64_t seed = profile_seed(config.seed, vi, profile);
    RunRecord* out = &records[task * n_alg];
    for (std::size_t a = 0; a < n_alg; ++a) {
      out[a].system = setup.name;
      out[a].algorithm = config.algorithms[a];
      out[a].variance = variance;
      out[a].profile = profile;
      out[a].seed = seed;
    }

    std::optional<FeatureMatrix> features;
    Matrix dx;
    try {
      const TimeSeries x =
          add_gaussian_noise(clean, {variance, mix_seed(seed, kNoiseStream)});
      dx = estimate_derivatives(&setup, x, config.analytic_derivatives);
      features = build_library(x, setup.library);
    } catch (const std::exception& e) {
      for (std::size_t a = 0; a < n_alg; ++a) out[a].error = e.what();
      return;
    }

    for (std::size_t a = 0; a < n_alg; ++a) {
      RunRecord& r = out[a];
      const auto start = std::chrono::steady_clock::now();
      try {
        const auto configs = equation_configs(
            r.algorithm, config.solver, setup.sparsity, setup.threshold,
            equations, mix_seed(seed, kSolverStream));
        const SystemFit fit = fit_features(*features, dx, configs);
        r.rel_l1 = rel_l1_error(fit.coefficients, truth);
        r.rel_l2 = rel_l2_error(fit.coefficients, truth);
        r.converged = true;
        for (const auto& eq : fit.equations) {
          r.iterations += eq.iterations_used;
          r.converged = r.converged && eq.converged;
        }
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      r.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    }
  });

  std::stable_sort(records.begin(), records.end(),
                   [](const RunRecord& a, const RunRecord& b) {
                     return std::make_tuple(algorithm_name(a.algorithm),
                                            a.variance, a.profile) <
                            std::make_tuple(algorithm_name(b.algorithm),
                                            b.variance, b.profile);
                   });

  BenchmarkResult result;
  for (std::size_t i = 0; i < records.size();) {
    std::size_t j = i;
    SummaryRow row;
    row.algorithm = records[i].algorithm;
    row.variance = records[i].variance;
    std::vector<double> l1;
    std::vector<double> l2;
    while (j < records.size() && records[j].algorithm == row.algorithm &&
           records[j].variance == row.variance) {
      ++row.runs;
      if (records[j].error.empty()) {
        l1.push_back(records[j].rel_l1);
        l2.push_back(records[j].rel_l2);
      } else {
        ++row.failures;
      }
      ++j;
    }
    if (l1.size() >= 2) {
      const auto s1 = ensemble_stats(l1);
      const auto s2 = ensemble_stats(l2);
      row.l1_mean = s1.mean;
      row.l1_std = s1.std;
      row.l2_mean = s2.mean;
      row.l2_std = s2.std;
    } else if (l1.size() == 1) {
      row.l1_mean = l1.front();
      row.l2_mean = l2.front();
    }
    result.summary.push_back(row);
    i = j;
  }
  result.records = std::move(records);
  return result;
}

void write_ensemble_csv(std::ostream& out, const BenchmarkResult& result) {
  CsvWriter w(out);
  w.row({"system", "algorithm", "variance", "profile", "seed", "rel_l1",
         "rel_l2", "iterations", "converged", "error"});
  for (const auto& r : result.records) {
    w.field(r.system)
        .field(algorithm_label(r.algorithm))
        .field(r.variance)
        .field(r.profile)
        .field(r.seed)
        .field(r.rel_l1)
        .field(r.rel_l2)
        .field(r.iterations)
        .field(r.converged ? 1 : 0)
        .field(r.error);
    w.end_row();
  }
}

void write_summary_csv(std::ostream& out, const BenchmarkResult& result) {
  CsvWriter w(out);
  w.row({"algorithm", "variance", "runs", "failures", "rel_l1_mean",
         "rel_l1_std", "rel_l2_mean", "rel_l2_std"});
  for (const auto& s : result.summary) {
    w.field(algorithm_label(s.algorithm))
        .field(s.variance)
        .field(s.runs)
        .field(s.failures)
        .field(s.l1_mean)
        .field(s.l1_std)
        .field(s.l2_mean)
        .field(s.l2_std);
    w.end_row();
  }
}

void write_timing_csv(std::ostream& out, const BenchmarkResult& result) {
  CsvWriter w(out);
  w.row({"algorithm", "variance", "profile", "wall_time_s"});
  for (const auto& r : result.records) {
    w.field(algorithm_label(r.algorithm))
        .field(r.variance)
        .field(r.profile)
        .field(r.wall_time);
    w.end_row();
  }
}

void FreqSweepConfig::validate() const {
  if (!(omega_min > 0.0) || !std::isfinite(omega_max)) {
    throw ContractError("omega range must be positive and finite");
  }
  if (!(omega_max >= omega_min)) {
    throw ContractError("omega_max must be >= omega_min");
  }
  if (steps < 1) throw ContractError("steps must be at least 1");
  check_variance(variance);
  check_algorithms(algorithms);
  if (system.name != "vdp") {
    throw ContractError("the frequency sweep runs on the vdp system");
  }
  if (jobs < 1) throw ContractError("jobs must be at least 1");
  if (analytic_derivatives && variance > 0.0) {
    throw ContractError("analytic derivatives apply to noiseless runs only");
  }
}

std::vector<double> sweep_grid(double omega_min, double omega_max,
                               std::size_t steps) {
  if (steps < 1) throw ContractError("sweep needs at least one step");
  if (!(omega_min > 0.0) || !(omega_max >= omega_min)) {
    throw ContractError("sweep range must satisfy 0 < omega_min <= omega_max");
  }
  std::vector<double> grid;
  grid.push_back(omega_min);
  if (steps == 1) return grid;
  const double span = omega_max - omega_min;
  for (std::size_t i = 1; i + 1 < steps; ++i) {
    grid.push_back(omega_min + span * static_cast<double>(i) /
                                   static_cast<double>(steps - 1));
  }
  grid.push_back(omega_max);
  return grid;
}

std::vector<SweepRecord> run_freq_sweep(const FreqSweepConfig& config) {
  config.validate();
  const auto grid = sweep_grid(config.omega_min, config.omega_max, config.steps);
  const std::size_t n_alg = config.algorithms.size();
  std::vector<SweepRecord> records(grid.size() * n_alg);

  parallel_for(grid.size(), config.jobs, [&](std::size_t step) {
    const std::uint64_t seed = mix_seed(config.seed, step);
    SweepRecord* out = &records[step * n_alg];
    for (std::size_t a = 0; a < n_alg; ++a) {
      out[a].omega = grid[step];
      out[a].algorithm = config.algorithms[a];
      out[a].variance = config.variance;
      out[a].seed = seed;
    }

    SystemOptions options = config.system;
    options.vdp_omega = grid[step];
    std::optional<SystemSetup> setup;
    std::optional<FeatureMatrix> features;
    Matrix dx;
    try {
      setup = make_system_setup(options);
      if (config.degree) setup->library.poly_degree = *config.degree;
      const TimeSeries x = add_gaussian_noise(
          simulate(*setup), {config.variance, mix_seed(seed, kNoiseStream)});
      dx = estimate_derivatives(&*setup, x, config.analytic_derivatives);
      features = build_library(x, setup->library);
    } catch (const std::exception& e) {
      for (std::size_t a = 0; a < n_alg; ++a) out[a].error = e.what();
      return;
    }

    for (std::size_t a = 0; a < n_alg; ++a) {
      SweepRecord& r = out[a];
      try {
        const auto configs = equation_configs(
            r.algorithm, config.solver, setup->sparsity, setup->threshold,
            static_cast<std::size_t>(dx.cols()),
            mix_seed(seed, kSolverStream));
        const SystemFit fit = fit_features(*features, dx, configs);
        const Vector forced = fit.coefficients.values.row(1).transpose();
        const FrequencyEstimate est =
            reconstruct_frequency(forced, setup->library);
        r.omega_hat = est.omega;
        r.alpha = est.alpha;
        r.frequency_error = std::abs(est.omega - r.omega);
        r.spurious_mass = spurious_time_mass(forced, setup->library, est.alpha);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  });

  std::stable_sort(records.begin(), records.end(),
                   [](const SweepRecord& a, const SweepRecord& b) {
                     return std::make_tuple(a.omega, algorithm_name(a.algorithm)) <
                            std::make_tuple(b.omega, algorithm_name(b.algorithm));
                   });
  return records;
}

void write_sweep_csv(std::ostream& out,
                     const std::vector<SweepRecord>& records) {
  CsvWriter w(out);
  w.row({"omega", "algorithm", "variance", "seed", "omega_hat", "alpha",
         "frequency_error", "spurious_mass", "combined_error", "error"});
  for (const auto& r : records) {
    w.field(r.omega)
        .field(algorithm_label(r.algorithm))
        .field(r.variance)
        .field(r.seed)
        .field(r.omega_hat)
        .field(r.alpha)
        .field(r.frequency_error)
        .field(r.spurious_mass)
        .field(r.combined_error())
        .field(r.error);
    w.end_row();
  }
}

double AxisFit::constant() const {
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (terms[j] == "1") return coefficients(static_cast<Index>(j));
  }
  return 0.0;
}

ProjectileReport run_projectile(const TimeSeries& tracked,
                                const ProjectileConfig& config) {
  check_algorithms(config.algorithms);
  struct Axis {
    std::string name;
    std::size_t sparsity;
    double threshold;
    FeatureMatrix features;
    Vector acceleration;
  };
  std::vector<Axis> axes = {
      {config.x_channel, config.sparsity_x, config.threshold_x, {}, {}},
      {config.y_channel, config.sparsity_y, config.threshold_y, {}, {}}};

  const auto& names = tracked.names();
  std::vector<Index> channels;
  for (const auto& axis : axes) {
    const auto it = std::find(names.begin(), names.end(), axis.name);
    if (it == names.end()) {
      throw ParseError("tracking data has no '" + axis.name + "' column", 0);
    }
    channels.push_back(it - names.begin());
  }

  const std::size_t trim = config.trim();
  for (std::size_t i = 0; i < axes.size(); ++i) {
    Axis& axis = axes[i];
    Vector pos = tracked.states().col(channels[i]);
    if (config.passes > 0) {
      pos = moving_average_smooth(pos, config.window, config.passes);
    }
    const TimeSeries smoothed(tracked.t0(), tracked.dt(), pos, {axis.name});
    const Matrix vel = finite_difference(smoothed, 1).values;
    const Matrix acc = finite_difference(smoothed, 2).values;

    const Index n = smoothed.samples();
    const Index kept = n - 2 * static_cast<Index>(trim);
    if (kept < 5) {
      throw InsufficientDataError(
          "only " + std::to_string(std::max<Index>(kept, 0)) +
          " samples remain after trimming " + std::to_string(trim) +
          " from each end");
    }
    const auto first = static_cast<Index>(trim);
    Matrix state(kept, 2);
    state.col(0) = pos.segment(first, kept);
    state.col(1) = vel.col(0).segment(first, kept);
    const TimeSeries phase(tracked.time(first), tracked.dt(), std::move(state),
                           {axis.name, axis.name + "dot"});
    LibrarySpec library;
    library.poly_degree = config.degree;
    library.variable_names = phase.names();
    axis.features = build_library(phase, library);
    axis.acceleration = acc.col(0).segment(first, kept);
  }

  ProjectileReport report;
  for (Algorithm algorithm : config.algorithms) {
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const Axis& axis = axes[i];
      AxisFit out;
      out.algorithm = algorithm;
      out.axis = axis.name;
      out.terms = axis.features.names;
      out.coefficients = Vector::Zero(axis.features.cols());
      SolverConfig c =
          SolverConfig::make(algorithm, axis.sparsity, axis.threshold);
      c.max_iterations = config.max_iterations;
      c.normalize_columns = config.normalize;
      c.seed = mix_seed(config.seed, i);
      try {
        out.coefficients = fit(axis.features, axis.acceleration, c).coefficients;
      } catch (const EmptySupportError&) {
        out.pruned = true;
      } catch (const Error& e) {
        out.error = e.what();
      }
      report.fits.push_back(std::move(out));
    }
  }
  return report;
}

std::string format_projectile_report(const ProjectileReport& report) {
  std::size_t width = 0;
  for (const auto& f : report.fits) {
    width = std::max(width, algorithm_name(f.algorithm).size());
  }
  std::ostringstream out;
  std::optional<Algorithm> previous;
  for (const auto& f : report.fits) {
    std::string label = previous == f.algorithm
                            ? std::string()
                            : std::string(algorithm_name(f.algorithm));
    label.resize(width, ' ');
    previous = f.algorithm;
    const std::string lhs = f.axis + "ddot";
    out << label << "  ";
    if (!f.error.empty()) {
      out << lhs << ": failed: " << f.error;
    } else {
      out << format_equation(lhs, f.terms, f.coefficients);
      if (f.pruned) out << "  (every term pruned)";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace sparseid
