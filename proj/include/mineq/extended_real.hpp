#pragma once

#include <limits>

namespace mineq {

// Statistics in this library live on the extended real line [-inf, +inf];
// validated inputs never contain NaN, so the usual ordering is total.
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Division convention for studentized terms with a zero standard deviation:
// c/0 = +inf for c > 0, -inf for c < 0, and 0/0 = 0. A degenerate moment
// exactly at the boundary neither forces rejection nor blocks it.
inline double studentized_ratio(double numerator, double sigma) {
  if (sigma > 0.0) return numerator / sigma;
  if (numerator > 0.0) return kPosInf;
  if (numerator < 0.0) return kNegInf;
  return 0.0;
}

}  // namespace mineq
