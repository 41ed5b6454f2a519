#pragma once

#include "sparseid/numerics.hpp"

#include <string>
#include <vector>

namespace sparseid {

/// Uniformly sampled multivariate trajectory. Row k of `states()` is the
/// state at time t0 + k*dt.
class TimeSeries {
 public:
  /// Throws ContractError on fewer than 2 samples, dt <= 0, or a name count
  /// that does not match the column count; InvalidDataError on non-finite
  /// states. Empty `names` yields "x1".."xd".
  TimeSeries(double t0, double dt, Matrix states,
             std::vector<std::string> names = {});

  double t0() const noexcept { return t0_; }
  double dt() const noexcept { return dt_; }
  Index samples() const noexcept { return states_.rows(); }
  Index dimension() const noexcept { return states_.cols(); }
  const Matrix& states() const noexcept { return states_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  double time(Index k) const noexcept {
    return t0_ + static_cast<double>(k) * dt_;
  }
  Vector times() const;

  /// Same grid and names with replaced state values.
  TimeSeries with_states(Matrix states) const;

 private:
  double t0_;
  double dt_;
  Matrix states_;
  std::vector<std::string> names_;
};

/// One coefficient row per state equation, one column per library term.
struct CoefficientMatrix {
  Matrix values;
  std::vector<std::string> column_names;

  Index equations() const noexcept { return values.rows(); }
  Index terms() const noexcept { return values.cols(); }
};

}  // namespace sparseid
