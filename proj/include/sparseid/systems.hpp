#pragma once

#include "sparseid/library.hpp"
#include "sparseid/numerics.hpp"
#include "sparseid/timeseries.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sparseid {

/// Right-hand side f(t, x) written into `dx` (already sized).
using RhsFunction = std::function<void(double t, const Vector& x, Vector& dx)>;

struct OdeSystem {
  std::string name;
  std::vector<std::string> variable_names;
  std::map<std::string, double> parameters;
  RhsFunction rhs;
  bool time_dependent = false;

  Index dimension() const noexcept {
    return static_cast<Index>(variable_names.size());
  }
  Vector evaluate(double t, const Vector& x) const;
};

inline constexpr std::size_t kMaxTrajectorySamples = 10'000'000;

/// Number of points on the grid t0, t0+dt, ... not exceeding tf (with a
/// small allowance for rounding in (tf - t0) / dt).
std::size_t grid_size(double t0, double tf, double dt);

/// Dormand-Prince 5(4) with adaptive steps; the solution is sampled on the
/// uniform grid t0 + k*dt through the method's 4th-order continuous
/// extension. Throws ContractError on tf <= t0, dt <= 0 or an oversized
/// grid, and IntegrationError when the step size underflows or the state
/// stops being finite.
TimeSeries integrate_rk45(const OdeSystem& system, const Vector& x0, double t0,
                          double tf, double dt, double rel_tol = 1e-9,
                          double abs_tol = 1e-9);

Eigen::Vector3d lorenz_rhs(const Eigen::Vector3d& state, double sigma = 10.0,
                           double rho = 28.0, double beta = 8.0 / 3.0);

/// x' = 0.1 + x + cubic_sign * x^3 / 3 - y, y' = 0.1 (x - y).
Eigen::Vector2d fitzhugh_nagumo_rhs(const Eigen::Vector2d& state,
                                    double cubic_sign = 1.0);

/// K x0 e^{rt} / (K + x0 (e^{rt} - 1)).
double logistic_exact(double t, double r, double k, double x0);

/// First-order form of x'' + mu (1 - x^2) x' + x - A sin(omega t) = 0.
Eigen::Vector2d forced_vdp_rhs(double t, const Eigen::Vector2d& state,
                               double mu, double amplitude, double omega);

inline constexpr double kVdpMu = 8.53;
inline constexpr double kVdpAmplitude = 1.2;

OdeSystem lorenz_system(double sigma = 10.0, double rho = 28.0,
                        double beta = 8.0 / 3.0);
OdeSystem fitzhugh_nagumo_system(double cubic_sign = 1.0);
OdeSystem logistic_system(double r = 1.0, double k = 5.0);
/// Damping sign of x'' + sign * mu (1 - x^2) x' + x = A sin(omega t).
/// -1 gives the self-sustained limit cycle; +1 grows without bound from
/// (-1, -1) within one time unit.
inline constexpr double kVdpLimitCycleSign = -1.0;

/// Variables are (x, v) with v = x'.
OdeSystem forced_vdp_system(double omega, double mu = kVdpMu,
                            double amplitude = kVdpAmplitude,
                            double damping_sign = kVdpLimitCycleSign);

/// Logistic trajectory sampled from the closed form.
TimeSeries logistic_trajectory(double r, double k, double x0, double t0,
                               double tf, double dt);

/// f(t_k, x_k) for every sample of `x`.
Matrix analytic_derivatives(const OdeSystem& system, const TimeSeries& x);

using ModelTerm = std::pair<std::string, double>;

/// Ground-truth right-hand side written in library term names.
struct TrueModel {
  std::string system;
  std::vector<std::vector<ModelTerm>> equations;
};

TrueModel lorenz_true_model(double sigma = 10.0, double rho = 28.0,
                            double beta = 8.0 / 3.0);
TrueModel fitzhugh_nagumo_true_model(double cubic_sign = 1.0);
TrueModel logistic_true_model(double r = 1.0, double k = 5.0);

/// The forcing A sin(omega t) is written through the second-order expansion
/// about `alpha`: A sin(alpha t) + A eps t cos(alpha t)
/// - A eps^2 t^2 sin(alpha t) / 2, eps = omega - alpha.
TrueModel forced_vdp_true_model(double omega, double alpha,
                                double mu = kVdpMu,
                                double amplitude = kVdpAmplitude,
                                double damping_sign = kVdpLimitCycleSign);

/// Places each model coefficient in the column with the same name.
/// Throws MissingTermError if a term is not in the library.
CoefficientMatrix ground_truth_coefficients(const TrueModel& model,
                                            const LibrarySpec& library);

}  // namespace sparseid
