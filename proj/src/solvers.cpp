#include "sparseid/solvers.hpp"

#include "sparseid/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sparseid {

namespace {

constexpr double kDivergenceFactor = 1e6;

enum class Family { kLambda, kTopS };

// Shared outer loop of all four optimizers. Each iteration selects a
// support from the current coefficients (lambda or gradient + top-s),
// optionally reactivates pruned columns, and debiases by a restricted solve.
// Convergence needs two consecutive iterations without reactivation that
// produce the same support; the initial full least-squares solve counts as
// such an iteration on the full index set.
FitResult run(const FeatureMatrix& f, const Vector& b,
              const SolverConfig& config, Family family) {
  config.validate();
  if (f.cols() < 1 || f.rows() < 1) {
    throw ContractError("fit: empty feature matrix");
  }
  if (b.size() != f.rows()) {
    throw ContractError("fit: target length " + std::to_string(b.size()) +
                        " != library rows " + std::to_string(f.rows()));
  }

  const FeatureMatrix work = config.normalize() ? normalize_columns(f) : f;
  const ReducedLeastSquares problem(work.values, b);
  const Index n = problem.cols();
  const bool annealed = is_annealed(config.algorithm);
  CounterRng rng(config.seed);

  FitResult result;
  Vector xi = problem.solve();
  SupportSet previous = SupportSet::full(n);
  bool previous_cold = true;

  for (std::size_t k = 0; k < config.max_iterations; ++k) {
    const double p = annealed ? config.schedule.probability(k) : 0.0;

    SupportSet selected;
    if (family == Family::kLambda) {
      selected = lambda_support(xi, *config.threshold);
    } else {
      selected = top_s_support(xi + problem.correlation(xi), *config.sparsity);
    }

    SupportSet active = selected;
    if (p > 0.0) {
      active = anneal_reactivate(selected, n, p, rng);
      ++result.reactivation_steps;
    }
    if (active.empty()) {
      throw EmptySupportError("thresholding pruned every library column");
    }

    xi = problem.restricted_solve(active);
    if (family == Family::kTopS && active.size() > *config.sparsity) {
      active = top_s_support(xi, *config.sparsity);
      xi = problem.restricted_solve(active);
    }
    result.support_history.push_back(active);
    ++result.iterations_used;

    const double residual = problem.residual_norm(xi);
    if (!std::isfinite(residual) ||
        residual > kDivergenceFactor * problem.rhs_norm()) {
      throw DivergenceError("residual " + std::to_string(residual) +
                            " exceeds the divergence bound at iteration " +
                            std::to_string(k));
    }

    const bool cold = p == 0.0;
    const bool repeated = active == previous;
    previous = std::move(active);
    if (cold && previous_cold && repeated) {
      result.converged = true;
      break;
    }
    previous_cold = cold;
  }

  result.support = std::move(previous);
  result.residual_norm = problem.residual_norm(xi);
  result.coefficients =
      work.scaling ? unscale_coefficients(xi, *work.scaling) : xi;
  return result;
}

}  // namespace

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kSindy:
      return "sindy";
    case Algorithm::kSindyAnne:
      return "sindy_anne";
    case Algorithm::kShtrep:
      return "shtrep";
    case Algorithm::kShtrepA:
      return "shtrep_a";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : kAllAlgorithms) {
    if (algorithm_name(a) == name) return a;
  }
  throw ContractError("unknown algorithm '" + std::string(name) +
                      "' (expected sindy, sindy_anne, shtrep or shtrep_a)");
}

AnnealingSchedule::AnnealingSchedule(std::vector<double> probabilities)
    : p_(std::move(probabilities)) {
  if (p_.empty()) {
    throw ContractError("annealing schedule must not be empty");
  }
  for (std::size_t k = 0; k < p_.size(); ++k) {
    if (!(p_[k] >= 0.0 && p_[k] <= 1.0)) {
      throw ContractError("annealing probabilities must lie in [0, 1]");
    }
    if (k > 0 && p_[k] > p_[k - 1]) {
      throw ContractError("annealing schedule must be non-increasing");
    }
  }
  if (p_.back() != 0.0) {
    throw ContractError("annealing schedule must end at 0");
  }
}

AnnealingSchedule AnnealingSchedule::cold() { return AnnealingSchedule({0.0}); }

std::size_t AnnealingSchedule::nonzero_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(p_.begin(), p_.end(), [](double p) { return p > 0.0; }));
}

AnnealingSchedule default_schedule() {
  // Percent steps keep every entry an exact k/100.
  std::vector<double> p;
  for (int pct = 100; pct >= 80; --pct) p.push_back(pct / 100.0);
  for (int pct = 70; pct >= 10; pct -= 10) p.push_back(pct / 100.0);
  for (int pct = 9; pct >= 1; --pct) p.push_back(pct / 100.0);
  p.push_back(0.0);
  return AnnealingSchedule(std::move(p));
}

void SolverConfig::validate() const {
  if (max_iterations < 1) {
    throw ContractError("max_iterations must be at least 1");
  }
  if (is_htp_family(algorithm)) {
    if (!sparsity || *sparsity < 1) {
      throw ContractError(std::string(algorithm_name(algorithm)) +
                          " needs a sparsity s >= 1");
    }
    if (threshold) {
      throw ContractError(std::string(algorithm_name(algorithm)) +
                          " takes a sparsity, not a threshold");
    }
  } else {
    if (!threshold || !(*threshold >= 0.0)) {
      throw ContractError(std::string(algorithm_name(algorithm)) +
                          " needs a threshold lambda >= 0");
    }
    if (sparsity) {
      throw ContractError(std::string(algorithm_name(algorithm)) +
                          " takes a threshold, not a sparsity");
    }
  }
}

SolverConfig SolverConfig::make(Algorithm algorithm,
                                std::optional<std::size_t> s,
                                std::optional<double> lambda) {
  SolverConfig c;
  c.algorithm = algorithm;
  if (is_htp_family(algorithm)) {
    c.sparsity = s;
  } else {
    c.threshold = lambda;
  }
  return c;
}

SupportSet htp_step(const Matrix& f, const Vector& b, const Vector& xi,
                    std::size_t s) {
  if (f.rows() != b.size() || f.cols() != xi.size()) {
    throw ContractError("htp_step: dimension mismatch");
  }
  return top_s_support(xi + f.transpose() * (b - f * xi), s);
}

SupportSet anneal_reactivate(const SupportSet& current, Index universe,
                             double p, CounterRng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ContractError("reactivation probability must lie in [0, 1]");
  }
  current.check_bounds(universe);
  if (p == 0.0) return current;
  if (p == 1.0) return SupportSet::full(universe);
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(universe));
  for (Index j = 0; j < universe; ++j) {
    if (current.contains(j) || rng.next_uniform() < p) out.push_back(j);
  }
  return SupportSet(std::move(out));
}

FitResult sindy_fit(const FeatureMatrix& f, const Vector& b,
                    const SolverConfig& config) {
  if (config.algorithm != Algorithm::kSindy) {
    throw ContractError("sindy_fit called with algorithm " +
                        std::string(algorithm_name(config.algorithm)));
  }
  return run(f, b, config, Family::kLambda);
}

FitResult sindy_anne_fit(const FeatureMatrix& f, const Vector& b,
                         const SolverConfig& config) {
  if (config.algorithm != Algorithm::kSindyAnne) {
    throw ContractError("sindy_anne_fit called with algorithm " +
                        std::string(algorithm_name(config.algorithm)));
  }
  return run(f, b, config, Family::kLambda);
}

FitResult htp_fit(const FeatureMatrix& f, const Vector& b,
                  const SolverConfig& config) {
  if (!is_htp_family(config.algorithm)) {
    throw ContractError("htp_fit called with algorithm " +
                        std::string(algorithm_name(config.algorithm)));
  }
  return run(f, b, config, Family::kTopS);
}

FitResult fit(const FeatureMatrix& f, const Vector& b,
              const SolverConfig& config) {
  switch (config.algorithm) {
    case Algorithm::kSindy:
      return sindy_fit(f, b, config);
    case Algorithm::kSindyAnne:
      return sindy_anne_fit(f, b, config);
    case Algorithm::kShtrep:
    case Algorithm::kShtrepA:
      return htp_fit(f, b, config);
  }
  throw ContractError("unknown algorithm");
}

SystemFit fit_features(const FeatureMatrix& f, const Matrix& targets,
                       const std::vector<SolverConfig>& configs) {
  if (static_cast<Index>(configs.size()) != targets.cols()) {
    throw ContractError("fit: " + std::to_string(configs.size()) +
                        " solver configs for " +
                        std::to_string(targets.cols()) + " equations");
  }
  if (targets.rows() != f.rows()) {
    throw ContractError("fit: derivative rows do not match library rows");
  }
  SystemFit out;
  out.coefficients.column_names = f.names;
  out.coefficients.values = Matrix::Zero(targets.cols(), f.cols());
  for (Index eq = 0; eq < targets.cols(); ++eq) {
    const Vector b = targets.col(eq);
    FitResult r;
    if (b.isZero(0.0)) {
      configs[static_cast<std::size_t>(eq)].validate();
      r.coefficients = Vector::Zero(f.cols());
      r.converged = true;
    } else {
      try {
        r = fit(f, b, configs[static_cast<std::size_t>(eq)]);
      } catch (const Error& e) {
        throw EquationError(static_cast<std::size_t>(eq), e.what(),
                            std::current_exception());
      }
    }
    out.coefficients.values.row(eq) = r.coefficients.transpose();
    out.equations.push_back(std::move(r));
  }
  return out;
}

SystemFit fit_system(const TimeSeries& x, const Matrix& derivatives,
                     const LibrarySpec& library,
                     const std::vector<SolverConfig>& configs) {
  if (derivatives.rows() != x.samples() ||
      derivatives.cols() != x.dimension()) {
    throw ContractError("derivative estimate shape does not match the series");
  }
  if (static_cast<Index>(configs.size()) != x.dimension()) {
    throw ContractError("fit_system needs one solver config per state equation");
  }
  return fit_features(build_library(x, library), derivatives, configs);
}

}  // namespace sparseid
