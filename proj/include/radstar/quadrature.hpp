#pragma once

#include <cstddef>
#include <span>

namespace radstar {

/// Composite Simpson rule on a uniform grid of step dr. For an odd number of
/// intervals the trailing one uses the three-point closed end correction.
inline double composite_simpson(std::span<const double> f, double dr) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  const std::size_t intervals = n - 1;
  double sum = 0.0;
  const std::size_t m = intervals % 2 == 0 ? intervals : intervals - 1;
  for (std::size_t j = 0; j + 2 <= m; j += 2)
    sum += dr / 3.0 * (f[j] + 4.0 * f[j + 1] + f[j + 2]);
  if (intervals % 2 != 0) {
    if (n >= 3)
      sum += dr / 12.0 * (-f[n - 3] + 8.0 * f[n - 2] + 5.0 * f[n - 1]);
    else
      sum += dr / 2.0 * (f[0] + f[1]);
  }
  return sum;
}

}  // namespace radstar
