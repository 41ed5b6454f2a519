#include "sparseid/timeseries.hpp"

#include "sparseid/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace sparseid {

TimeSeries::TimeSeries(double t0, double dt, Matrix states,
                       std::vector<std::string> names)
    : t0_(t0), dt_(dt), states_(std::move(states)), names_(std::move(names)) {
  if (states_.rows() < 2) {
    throw ContractError("time series needs at least 2 samples");
  }
  if (!(dt_ > 0.0) || !std::isfinite(dt_) || !std::isfinite(t0_)) {
    throw ContractError("time series needs a finite t0 and dt > 0");
  }
  if (names_.empty()) {
    for (Index j = 0; j < states_.cols(); ++j) {
      names_.push_back("x" + std::to_string(j + 1));
    }
  }
  if (static_cast<Index>(names_.size()) != states_.cols()) {
    throw ContractError("time series: " + std::to_string(names_.size()) +
                        " names for " + std::to_string(states_.cols()) +
                        " channels");
  }
  require_finite(states_, "time series states");
}

Vector TimeSeries::times() const {
  Vector t(samples());
  for (Index k = 0; k < samples(); ++k) t(k) = time(k);
  return t;
}

TimeSeries TimeSeries::with_states(Matrix states) const {
  return TimeSeries(t0_, dt_, std::move(states), names_);
}

}  // namespace sparseid
