#pragma once

#include "sparseid/library.hpp"
#include "sparseid/numerics.hpp"
#include "sparseid/random.hpp"
#include "sparseid/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace sparseid {

enum class Algorithm {
  kSindy,      // sequentially thresholded least squares
  kSindyAnne,  // ... with annealed reactivation
  kShtrep,     // hard thresholding pursuit
  kShtrepA,    // ... with annealed reactivation
};

inline constexpr Algorithm kAllAlgorithms[] = {
    Algorithm::kSindy, Algorithm::kSindyAnne, Algorithm::kShtrep,
    Algorithm::kShtrepA};

/// "sindy", "sindy_anne", "shtrep", "shtrep_a".
std::string_view algorithm_name(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

constexpr bool is_annealed(Algorithm a) noexcept {
  return a == Algorithm::kSindyAnne || a == Algorithm::kShtrepA;
}
constexpr bool is_htp_family(Algorithm a) noexcept {
  return a == Algorithm::kShtrep || a == Algorithm::kShtrepA;
}

/// Reactivation probabilities, one consumed per outer iteration. Entries
/// lie in [0, 1], never increase, and the last one is 0.
class AnnealingSchedule {
 public:
  explicit AnnealingSchedule(std::vector<double> probabilities);

  /// A single zero entry: no reactivation at all.
  static AnnealingSchedule cold();

  /// p_k, or 0 once the schedule is exhausted.
  double probability(std::size_t k) const noexcept {
    return k < p_.size() ? p_[k] : 0.0;
  }
  std::size_t size() const noexcept { return p_.size(); }
  std::size_t nonzero_count() const noexcept;
  const std::vector<double>& values() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

/// 1.00, 0.99, ..., 0.80, 0.70, ..., 0.10, 0.09, ..., 0.01, 0 (38 entries).
AnnealingSchedule default_schedule();

struct SolverConfig {
  Algorithm algorithm = Algorithm::kShtrep;
  std::optional<std::size_t> sparsity;  // HTP family
  std::optional<double> threshold;      // SINDy family
  AnnealingSchedule schedule = default_schedule();
  std::size_t max_iterations = 500;
  std::uint64_t seed = 0;
  /// Unset means the family default: on for HTP, off for SINDy.
  std::optional<bool> normalize_columns;

  bool normalize() const noexcept {
    return normalize_columns.value_or(is_htp_family(algorithm));
  }

  /// Throws ContractError unless exactly the parameter of the algorithm's
  /// family is set and max_iterations >= 1.
  void validate() const;

  static SolverConfig make(Algorithm algorithm, std::optional<std::size_t> s,
                           std::optional<double> lambda);
};

struct FitResult {
  Vector coefficients;  // raw library coordinates
  SupportSet support;
  std::size_t iterations_used = 0;
  double residual_norm = 0.0;
  std::vector<SupportSet> support_history;
  bool converged = false;
  std::size_t reactivation_steps = 0;

  friend bool operator==(const FitResult& a, const FitResult& b) {
    return a.coefficients.size() == b.coefficients.size() &&
           a.coefficients == b.coefficients && a.support == b.support &&
           a.iterations_used == b.iterations_used &&
           a.residual_norm == b.residual_norm &&
           a.support_history == b.support_history &&
           a.converged == b.converged &&
           a.reactivation_steps == b.reactivation_steps;
  }
};

/// Support of the s largest entries of xi + F^T (b - F xi).
SupportSet htp_step(const Matrix& f, const Vector& b, const Vector& xi,
                    std::size_t s);

/// `current` plus every other index in [0, universe) kept independently with
/// probability p. Indices are visited in increasing order, one uniform draw
/// each; p = 0 and p = 1 consume no draws.
SupportSet anneal_reactivate(const SupportSet& current, Index universe,
                             double p, CounterRng& rng);

/// Sequentially thresholded least squares, optionally annealed.
FitResult sindy_fit(const FeatureMatrix& f, const Vector& b,
                    const SolverConfig& config);
FitResult sindy_anne_fit(const FeatureMatrix& f, const Vector& b,
                         const SolverConfig& config);

/// Hard thresholding pursuit (SHTreP / SHTreP-A).
FitResult htp_fit(const FeatureMatrix& f, const Vector& b,
                  const SolverConfig& config);

/// Dispatches on config.algorithm.
FitResult fit(const FeatureMatrix& f, const Vector& b,
              const SolverConfig& config);

struct SystemFit {
  CoefficientMatrix coefficients;
  std::vector<FitResult> equations;
};

/// Fits each column of `targets` independently against `f`. An all-zero
/// target yields a zero row without running the solver. Failures are
/// rethrown as EquationError carrying the equation index.
SystemFit fit_features(const FeatureMatrix& f, const Matrix& targets,
                       const std::vector<SolverConfig>& configs);

/// Builds the library once from `x` and fits every state equation.
SystemFit fit_system(const TimeSeries& x, const Matrix& derivatives,
                     const LibrarySpec& library,
                     const std::vector<SolverConfig>& configs);

}  // namespace sparseid
