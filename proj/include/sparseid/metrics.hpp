#pragma once

#include "sparseid/library.hpp"
#include "sparseid/numerics.hpp"
#include "sparseid/timeseries.hpp"

#include <vector>

namespace sparseid {

/// ||estimate - truth||_2 / ||truth||_2 over every equation and term jointly.
/// Throws ContractError on a shape or name mismatch and UndefinedMetricError
/// when truth is all zero.
double rel_l2_error(const CoefficientMatrix& estimate,
                    const CoefficientMatrix& truth);

/// ||estimate - truth||_1 / ||truth||_1 over every equation and term jointly.
double rel_l1_error(const CoefficientMatrix& estimate,
                    const CoefficientMatrix& truth);

/// Per-equation relative errors (rows of the two matrices).
std::vector<double> rel_l2_error_by_equation(const CoefficientMatrix& estimate,
                                             const CoefficientMatrix& truth);
std::vector<double> rel_l1_error_by_equation(const CoefficientMatrix& estimate,
                                             const CoefficientMatrix& truth);

struct FrequencyEstimate {
  double omega;    // alpha + epsilon
  double alpha;    // library frequency with the dominant sin coefficient
  double epsilon;  // c[t*cos(alpha t)] / c[sin(alpha t)]
};

/// Recovers the forcing frequency from coefficients over the library
/// described by `library` through sin(w t) ~ sin(a t) + eps t cos(a t).
/// The dominant alpha is the one with the largest |c[sin(alpha t)]|, ties to
/// the smaller alpha. Throws ContractError when the library lacks the sin or
/// t*cos family and NoForcingDetectedError when every sin coefficient is 0.
FrequencyEstimate reconstruct_frequency(const Vector& xi,
                                        const LibrarySpec& library);

/// Sum of |xi_j| over time-feature columns whose alpha differs from `alpha`.
double spurious_time_mass(const Vector& xi, const LibrarySpec& library,
                          double alpha);

struct EnsembleStats {
  double mean;
  double std;  // sample standard deviation (n - 1)
};

/// Throws InsufficientSamplesError on fewer than 2 samples.
EnsembleStats ensemble_stats(const std::vector<double>& samples);

}  // namespace sparseid
