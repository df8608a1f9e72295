#include "abxeval/rng.hpp"

#include <cmath>
#include <numbers>

namespace abxeval {

double CounterRng::next_gaussian() {
  // 1 - u keeps the log argument in (0, 1]
  double u1 = 1.0 - next_unit();
  double u2 = next_unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace abxeval
