#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace mineq {

// Neumaier-compensated accumulator. Long reductions (p ~ 1000 columns,
// n ~ 400 rows) must stay stable to the 1e-12 relative tolerances asserted
// in the tests.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

}  // namespace mineq
