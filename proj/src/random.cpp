#include "sparseid/random.hpp"

#include <cmath>
#include <numbers>

namespace sparseid {

double CounterRng::normal_at(std::uint64_t i) const noexcept {
  const double u1 = static_cast<double>((bits_at(2 * i) >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform_at(2 * i + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sparseid
