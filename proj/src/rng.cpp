#include "nspcert/rng.hpp"

#include <cmath>
#include <numbers>

namespace nspcert {

std::uint64_t CounterRng::bits(std::uint64_t counter) const noexcept {
  std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform_open(std::uint64_t counter) const noexcept {
  return static_cast<double>((bits(counter) >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t index) const noexcept {
  const std::uint64_t pair = index / 2;
  const double radius = std::sqrt(-2.0 * std::log(uniform_open(2 * pair)));
  const double angle = 2.0 * std::numbers::pi * uniform_open(2 * pair + 1);
  return radius * (index % 2 == 0 ? std::cos(angle) : std::sin(angle));
}

}  // namespace nspcert
