#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mineq/extended_real.hpp"
#include "mineq/sample_matrix.hpp"
#include "mineq/summation.hpp"

namespace mineq {

// Per-coordinate sample means and divide-by-n standard deviations, plus the
// moment-norm estimate m_hat = max_j (n^-1 sum_i |X_ij|^{2+delta})^{1/(2+delta)}
// taken over all k coordinates of the supplied sample.
struct MomentEstimates {
  std::vector<double> mu_hat;
  std::vector<double> sigma_hat;
  double m_hat = 0.0;
  double delta = 1.0;

  int k() const { return static_cast<int>(mu_hat.size()); }
};

inline MomentEstimates estimate_moments(const SampleMatrix& sample, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("estimate_moments: delta must lie in (0, 1]");
  }
  const auto& x = sample.data();
  const int n = sample.n();
  const int k = sample.k();
  MomentEstimates est;
  est.delta = delta;
  est.mu_hat.resize(k);
  est.sigma_hat.resize(k);
  const bool cubic = (delta == 1.0);
  double m_max = 0.0;
  for (int j = 0; j < k; ++j) {
    const auto col = x.col(j);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    double mu, sd;
    if (lo == hi) {
      // Constant column: sigma_hat must be exactly zero, not rounding noise.
      mu = lo;
      sd = 0.0;
    } else {
      CompensatedSum s;
      for (int i = 0; i < n; ++i) s.add(col[i]);
      mu = std::clamp(s.value() / n, lo, hi);
      CompensatedSum ss;
      for (int i = 0; i < n; ++i) {
        const double d = col[i] - mu;
        ss.add(d * d);
      }
      sd = std::sqrt(ss.value() / n);
    }
    est.mu_hat[j] = mu;
    est.sigma_hat[j] = sd;

    CompensatedSum pw;
    for (int i = 0; i < n; ++i) {
      const double a = std::abs(col[i]);
      pw.add(cubic ? a * a * a : std::pow(a, 2.0 + delta));
    }
    m_max = std::max(m_max, std::pow(pw.value() / n, 1.0 / (2.0 + delta)));
  }
  est.m_hat = m_max;
  return est;
}

// Studentized max statistic: signed terms over the first p (inequality)
// coordinates, absolute terms over the remaining (equality) coordinates.
// Degenerate coordinates follow the studentized_ratio division convention.
inline double test_statistic(const MomentEstimates& est, int n, int p) {
  const int k = est.k();
  if (p < 0 || p > k) throw std::invalid_argument("test_statistic: p must lie in [0, k]");
  if (k < 1) throw std::invalid_argument("test_statistic: need at least one coordinate");
  if (n < 1) throw std::invalid_argument("test_statistic: n must be positive");
  const double sqn = std::sqrt(static_cast<double>(n));
  double t = kNegInf;
  for (int j = 0; j < p; ++j) {
    t = std::max(t, sqn * studentized_ratio(est.mu_hat[j], est.sigma_hat[j]));
  }
  for (int s = p; s < k; ++s) {
    t = std::max(t, sqn * studentized_ratio(std::abs(est.mu_hat[s]), est.sigma_hat[s]));
  }
  return t;
}

inline double test_statistic(const SampleMatrix& sample, const MomentEstimates& est) {
  return test_statistic(est, sample.n(), sample.p());
}

}  // namespace mineq
