#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "common/error.hpp"

namespace aix {

// Nearest-rank percentile: the value at rank ceil(p/100 * n) of the ascending
// sample. Used everywhere a percentile cut is needed.
inline std::size_t nearest_rank(std::size_t n, double percent) {
  if (n == 0) fail(ErrorKind::Data, "percentile of an empty sample");
  if (!(percent > 0.0 && percent <= 100.0))
    fail(ErrorKind::Config, "percentile {} outside (0, 100]", percent);
  // The epsilon keeps exact products such as 0.9 * 10 from rounding up a rank.
  long double x = static_cast<long double>(percent) * static_cast<long double>(n) / 100.0L;
  auto rank = static_cast<std::size_t>(std::ceil(x - 1e-9L));
  return std::clamp<std::size_t>(rank, 1, n);
}

inline double nearest_rank_value(std::span<const double> values, double percent) {
  std::vector<double> sorted(values.begin(), values.end());
  std::size_t idx = nearest_rank(sorted.size(), percent) - 1;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(idx),
                   sorted.end());
  return sorted[idx];
}

}  // namespace aix
