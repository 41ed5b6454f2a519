#pragma once

#include "sparseid/numerics.hpp"
#include "sparseid/timeseries.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>

namespace sparseid {

struct NoiseSpec {
  double variance = 0.0;
  std::uint64_t seed = 0;
};

/// Adds independent N(0, variance) draws to every state entry. Entry (k, j)
/// uses draw k * dimension + j of a CounterRng keyed by the seed.
TimeSeries add_gaussian_noise(const TimeSeries& x, const NoiseSpec& spec);

struct DerivativeEstimate {
  Matrix values;
  std::string scheme;
  int order = 1;
};

/// Centered second-order differences in the interior, second-order one-sided
/// stencils at both ends. `order` is 1 or 2; needs at least 5 samples.
DerivativeEstimate finite_difference(const TimeSeries& x, int order);

inline constexpr std::size_t kDefaultSmoothingWindow = 5;

/// `passes` sequential centered moving averages. Near the ends the window is
/// clipped to the available samples.
Vector moving_average_smooth(const Vector& x,
                             std::size_t window = kDefaultSmoothingWindow,
                             std::size_t passes = 1);

/// Applies moving_average_smooth to every channel.
TimeSeries smooth_series(const TimeSeries& x,
                         std::size_t window = kDefaultSmoothingWindow,
                         std::size_t passes = 1);

/// Reads "t,<channel>,..." CSV. A time grid whose steps deviate from the
/// median step by more than 1e-6 relative is resampled onto a uniform grid
/// at the median step by linear interpolation.
TimeSeries parse_tracking_csv(std::istream& in);
TimeSeries load_tracking_csv(const std::filesystem::path& path);

}  // namespace sparseid
