#pragma once

#include "sparseid/library.hpp"
#include "sparseid/numerics.hpp"
#include "sparseid/solvers.hpp"
#include "sparseid/systems.hpp"
#include "sparseid/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace sparseid {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // anything not listed below
inline constexpr int kExitIntegration = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;

/// Process exit status for an exception escaping a command. EquationError
/// maps through its cause.
int exit_code_for(const std::exception_ptr& error);

/// pi / 5 + 0.01, the entrained forcing frequency.
double default_vdp_omega();

/// Names and physical parameters of a built-in system. Unset fields take the
/// system's defaults.
struct SystemOptions {
  std::string name = "lorenz";  // lorenz, fhn, logistic, logistic-decay, vdp
  std::optional<std::vector<double>> x0;
  std::optional<double> t0;
  std::optional<double> tf;
  std::optional<double> dt;
  double fhn_cubic_sign = 1.0;
  double logistic_r = 1.0;
  double logistic_k = 5.0;
  std::optional<double> vdp_omega;
  double vdp_mu = kVdpMu;
  double vdp_amplitude = kVdpAmplitude;
  double vdp_damping_sign = kVdpLimitCycleSign;
  std::size_t vdp_alpha_count = 6;
};

std::vector<std::string> system_names();

/// Everything needed to generate data for a system and score a fit of it.
struct SystemSetup {
  std::string name;
  OdeSystem system;
  Vector x0;
  double t0 = 0.0;
  double tf = 0.0;
  double dt = 0.01;
  bool closed_form = false;  // sampled from the exact solution
  LibrarySpec library;
  std::vector<std::size_t> sparsity;  // one per equation
  std::vector<double> threshold;      // one per equation
  TrueModel truth;
};

/// Throws ContractError on an unknown name or inconsistent options.
SystemSetup make_system_setup(const SystemOptions& options);

/// Integrates the system (or samples its closed form) on the setup's grid.
TimeSeries simulate(const SystemSetup& setup);

/// Solver settings shared by every equation. A single sparsity or threshold
/// value applies to all equations; otherwise one value per equation.
struct SolverOptions {
  std::optional<std::vector<std::size_t>> sparsity;
  std::optional<std::vector<double>> threshold;
  std::size_t max_iterations = 500;
  std::optional<bool> normalize;
  std::optional<std::vector<double>> schedule;
};

/// One SolverConfig per equation. Equation i uses seed mix_seed(seed, i).
/// `sparsity` / `threshold` are the fallbacks when `options` leaves them
/// unset. Throws ContractError when a needed value is missing or the
/// per-equation lists have the wrong length.
std::vector<SolverConfig> equation_configs(
    Algorithm algorithm, const SolverOptions& options,
    const std::vector<std::size_t>& sparsity,
    const std::vector<double>& threshold, std::size_t equations,
    std::uint64_t seed);

/// "dx/dt = -10.0000·x + 10.0000·y". Terms that round to zero at
/// `decimals` are left out; "dx/dt = 0" when none remain.
std::string format_equation(std::string_view lhs,
                            const std::vector<std::string>& terms,
                            const Vector& coefficients, int decimals = 4);

// ---------------------------------------------------------------- fit

struct FitOptions {
  SystemOptions system;
  std::optional<TimeSeries> data;  // replaces simulation when present
  std::optional<std::size_t> degree;
  bool include_constant = true;
  std::optional<std::size_t> time_alpha_count;
  Algorithm algorithm = Algorithm::kShtrep;
  SolverOptions solver;
  double noise_variance = 0.0;
  bool analytic_derivatives = false;
  std::size_t smooth_passes = 0;
  std::size_t smooth_window = 5;
  std::uint64_t seed = 0;
};

struct FitReport {
  std::vector<std::string> variables;
  SystemFit fit;
  std::optional<CoefficientMatrix> truth;
  double rel_l1 = kNaN;
  double rel_l2 = kNaN;
};

/// Data (simulated or given), optional noise and smoothing, derivative
/// estimate, library, one fit per equation. Truth metrics are filled for
/// simulated systems.
FitReport run_fit(const FitOptions& options);

/// One line per equation.
std::string format_model(const FitReport& report);

// ---------------------------------------------------------- benchmark

struct BenchmarkConfig {
  SystemOptions system;
  std::optional<std::size_t> degree;
  std::vector<double> variances = {0.0};
  std::size_t profiles = 50;
  std::vector<Algorithm> algorithms = {std::begin(kAllAlgorithms),
                                       std::end(kAllAlgorithms)};
  SolverOptions solver;
  bool analytic_derivatives = false;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  void validate() const;
};

/// mix_seed(mix_seed(master, variance_index), profile).
std::uint64_t profile_seed(std::uint64_t master, std::size_t variance_index,
                           std::size_t profile);

struct RunRecord {
  std::string system;
  Algorithm algorithm = Algorithm::kSindy;
  double variance = 0.0;
  std::size_t profile = 0;
  std::uint64_t seed = 0;
  double rel_l1 = kNaN;
  double rel_l2 = kNaN;
  std::size_t iterations = 0;  // summed over equations
  bool converged = false;      // every equation converged
  double wall_time = 0.0;      // seconds
  std::string error;
};

struct SummaryRow {
  Algorithm algorithm = Algorithm::kSindy;
  double variance = 0.0;
  std::size_t runs = 0;
  std::size_t failures = 0;
  double l1_mean = kNaN;
  double l1_std = kNaN;
  double l2_mean = kNaN;
  double l2_std = kNaN;
};

struct BenchmarkResult {
  std::vector<RunRecord> records;  // sorted by (algorithm, variance, profile)
  std::vector<SummaryRow> summary;
};

/// Runs every (algorithm, variance, profile) combination on `jobs` worker
/// threads. Per-run failures land in RunRecord::error.
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

void write_ensemble_csv(std::ostream& out, const BenchmarkResult& result);
void write_summary_csv(std::ostream& out, const BenchmarkResult& result);
/// Wall-clock times, kept apart so the other files stay reproducible.
void write_timing_csv(std::ostream& out, const BenchmarkResult& result);

// -------------------------------------------------------- freq sweep

struct FreqSweepConfig {
  double omega_min = 0.0;
  double omega_max = 0.0;
  std::size_t steps = 0;
  double variance = 0.0;
  std::vector<Algorithm> algorithms = {Algorithm::kShtrep,
                                       Algorithm::kShtrepA};
  SystemOptions system = [] {
    SystemOptions s;
    s.name = "vdp";
    return s;
  }();
  std::optional<std::size_t> degree;
  SolverOptions solver;
  bool analytic_derivatives = false;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  void validate() const;
};

/// omega_min, then evenly spaced up to omega_max inclusive.
std::vector<double> sweep_grid(double omega_min, double omega_max,
                               std::size_t steps);

struct SweepRecord {
  double omega = 0.0;
  Algorithm algorithm = Algorithm::kShtrep;
  double variance = 0.0;
  std::uint64_t seed = 0;
  double omega_hat = kNaN;
  double alpha = kNaN;
  double frequency_error = kNaN;  // |omega_hat - omega|
  double spurious_mass = kNaN;
  std::string error;

  double combined_error() const { return frequency_error + spurious_mass; }
};

/// Rows sorted by (omega, algorithm).
std::vector<SweepRecord> run_freq_sweep(const FreqSweepConfig& config);

void write_sweep_csv(std::ostream& out,
                     const std::vector<SweepRecord>& records);

// -------------------------------------------------------- projectile

struct ProjectileConfig {
  std::size_t passes = 30;
  std::size_t window = 5;
  /// Samples dropped at each end after smoothing; unset means
  /// passes * (window - 1) / 2, the reach of the clipped end windows.
  std::optional<std::size_t> edge_trim;
  std::size_t degree = 2;
  std::size_t sparsity_x = 2;
  std::size_t sparsity_y = 3;
  double threshold_x = 0.8;
  double threshold_y = 0.6;
  std::vector<Algorithm> algorithms = {std::begin(kAllAlgorithms),
                                       std::end(kAllAlgorithms)};
  std::size_t max_iterations = 500;
  std::optional<bool> normalize;
  std::uint64_t seed = 0;
  std::string x_channel = "x";
  std::string y_channel = "y";

  std::size_t trim() const {
    return edge_trim.value_or(passes * (window - 1) / 2);
  }
};

struct AxisFit {
  Algorithm algorithm = Algorithm::kSindy;
  std::string axis;
  std::vector<std::string> terms;
  Vector coefficients;
  bool pruned = false;  // thresholding removed every term
  std::string error;

  /// Coefficient of the constant term, 0 when absent.
  double constant() const;
};

struct ProjectileReport {
  std::vector<AxisFit> fits;  // per algorithm: x then y
};

/// Smooths each axis, differentiates, trims the ends and fits the
/// acceleration of each axis against a polynomial library in that axis'
/// position and velocity. Throws ParseError when a channel is missing.
ProjectileReport run_projectile(const TimeSeries& tracked,
                                const ProjectileConfig& config);

std::string format_projectile_report(const ProjectileReport& report);

}  // namespace sparseid
