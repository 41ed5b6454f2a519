#include "sparseid/metrics.hpp"

#include "sparseid/errors.hpp"

#include <cmath>
#include <numeric>
#include <optional>
#include <string>

namespace sparseid {

namespace {

void check_comparable(const CoefficientMatrix& estimate,
                      const CoefficientMatrix& truth) {
  if (estimate.values.rows() != truth.values.rows() ||
      estimate.values.cols() != truth.values.cols()) {
    throw ContractError("coefficient matrices differ in shape");
  }
  if (estimate.column_names != truth.column_names) {
    throw ContractError("coefficient matrices use different term names");
  }
}

// Plain row-major accumulation: results do not depend on vectorization.
struct ErrorSums {
  double error = 0.0;
  double truth = 0.0;
};

template <typename Term>
ErrorSums accumulate(const Matrix& estimate, const Matrix& truth, Term term) {
  ErrorSums s;
  for (Index i = 0; i < truth.rows(); ++i) {
    for (Index j = 0; j < truth.cols(); ++j) {
      s.error += term(estimate(i, j) - truth(i, j));
      s.truth += term(truth(i, j));
    }
  }
  if (s.truth == 0.0) {
    throw UndefinedMetricError("relative error against an all-zero truth");
  }
  return s;
}

double rel_l2(const Matrix& estimate, const Matrix& truth) {
  const ErrorSums s =
      accumulate(estimate, truth, [](double v) { return v * v; });
  return std::sqrt(s.error / s.truth);
}

double rel_l1(const Matrix& estimate, const Matrix& truth) {
  const ErrorSums s =
      accumulate(estimate, truth, [](double v) { return std::abs(v); });
  return s.error / s.truth;
}

}  // namespace

double rel_l2_error(const CoefficientMatrix& estimate,
                    const CoefficientMatrix& truth) {
  check_comparable(estimate, truth);
  return rel_l2(estimate.values, truth.values);
}

double rel_l1_error(const CoefficientMatrix& estimate,
                    const CoefficientMatrix& truth) {
  check_comparable(estimate, truth);
  return rel_l1(estimate.values, truth.values);
}

std::vector<double> rel_l2_error_by_equation(const CoefficientMatrix& estimate,
                                             const CoefficientMatrix& truth) {
  check_comparable(estimate, truth);
  std::vector<double> out;
  for (Index j = 0; j < truth.values.rows(); ++j) {
    out.push_back(rel_l2(estimate.values.row(j),
                         truth.values.row(j)));
  }
  return out;
}

std::vector<double> rel_l1_error_by_equation(const CoefficientMatrix& estimate,
                                             const CoefficientMatrix& truth) {
  check_comparable(estimate, truth);
  std::vector<double> out;
  for (Index j = 0; j < truth.values.rows(); ++j) {
    out.push_back(rel_l1(estimate.values.row(j),
                         truth.values.row(j)));
  }
  return out;
}

FrequencyEstimate reconstruct_frequency(const Vector& xi,
                                        const LibrarySpec& library) {
  const auto columns = time_columns(library);
  const auto total = static_cast<Index>(library_column_names(library).size());
  if (xi.size() != total) {
    throw ContractError("coefficient vector length " +
                        std::to_string(xi.size()) + " != library size " +
                        std::to_string(total));
  }
  bool has_sin = false;
  bool has_tcos = false;
  for (const auto& c : columns) {
    has_sin = has_sin || c.family == TimeFamily::kSin;
    has_tcos = has_tcos || c.family == TimeFamily::kTCos;
  }
  if (!has_sin || !has_tcos) {
    throw ContractError(
        "frequency reconstruction needs sin and t*cos time features");
  }

  std::optional<TimeColumn> best;
  for (const auto& c : columns) {
    if (c.family != TimeFamily::kSin) continue;
    const double mag = std::abs(xi(c.column));
    if (!best) {
      best = c;
      continue;
    }
    const double best_mag = std::abs(xi(best->column));
    if (mag > best_mag || (mag == best_mag && c.alpha < best->alpha)) best = c;
  }
  const double c1 = xi(best->column);
  if (c1 == 0.0) {
    throw NoForcingDetectedError("every sin(alpha t) coefficient is zero");
  }
  double c_tcos = 0.0;
  for (const auto& c : columns) {
    if (c.family == TimeFamily::kTCos && c.alpha == best->alpha) {
      c_tcos = xi(c.column);
    }
  }
  const double eps = c_tcos / c1;
  return {best->alpha + eps, best->alpha, eps};
}

double spurious_time_mass(const Vector& xi, const LibrarySpec& library,
                          double alpha) {
  double mass = 0.0;
  for (const auto& c : time_columns(library)) {
    if (c.column >= xi.size()) {
      throw ContractError("coefficient vector shorter than the library");
    }
    if (c.alpha != alpha) mass += std::abs(xi(c.column));
  }
  return mass;
}

EnsembleStats ensemble_stats(const std::vector<double>& samples) {
  if (samples.size() < 2) {
    throw InsufficientSamplesError("ensemble statistics need >= 2 samples");
  }
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace sparseid
