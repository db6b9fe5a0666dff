#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace nspcert {

/// log(sum exp(v_i)); -inf for an empty span or all -inf entries.
inline double log_sum_exp(std::span<const double> values) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : values) peak = std::max(peak, v);
  if (!std::isfinite(peak)) return peak;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - peak);
  return peak + std::log(acc);
}

inline bool strictly_increasing(std::span<const double> values) {
  return std::adjacent_find(values.begin(), values.end(),
                            [](double a, double b) { return !(a < b); }) ==
         values.end();
}

}  // namespace nspcert
