#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mineq/extended_real.hpp"
#include "mineq/moments.hpp"
#include "mineq/rng.hpp"
#include "mineq/sample_matrix.hpp"
#include "mineq/selection.hpp"
#include "mineq/summation.hpp"

namespace mineq {

enum class BootstrapKind { mb, eb };

inline const char* to_string(BootstrapKind k) {
  return k == BootstrapKind::mb ? "MB" : "EB";
}

namespace detail {

inline void check_selection_indices(std::span<const int> ineq_set, int p) {
  int prev = -1;
  for (int j : ineq_set) {
    if (j < 0 || j >= p) throw std::invalid_argument("bootstrap: selection index out of range");
    if (j <= prev) throw std::invalid_argument("bootstrap: selection indices must be strictly increasing");
    prev = j;
  }
}

inline void warn_small_draw_count(int draws) {
  static std::atomic<bool> warned{false};
  if (draws < 100 && !warned.exchange(true)) {
    std::cerr << "mineq: warning: bootstrap draw count B = " << draws
              << " is below 100; critical values will be coarse\n";
  }
}

}  // namespace detail

// One multiplier-bootstrap statistic for externally supplied weights:
// max over j in the selection of n^{-1/2} sum_i eps_i (X_ij - mu_j) / sigma_j
// plus the absolute analogue over every equality coordinate. Reference
// implementation; the draw table below is the vectorized production path.
inline double mb_statistic(const SampleMatrix& sample, const MomentEstimates& est,
                           std::span<const int> ineq_set, std::span<const double> multipliers) {
  const int n = sample.n();
  const int p = sample.p();
  const int k = sample.k();
  if (static_cast<int>(multipliers.size()) != n) {
    throw std::invalid_argument("mb_statistic: multiplier length must equal n");
  }
  detail::check_selection_indices(ineq_set, p);
  const double sqn = std::sqrt(static_cast<double>(n));
  auto term = [&](int j) {
    if (est.sigma_hat[j] == 0.0) return 0.0;  // centered column is identically zero
    CompensatedSum s;
    for (int i = 0; i < n; ++i) s.add(multipliers[i] * (sample(i, j) - est.mu_hat[j]));
    return s.value() / (sqn * est.sigma_hat[j]);
  };
  double best = kNegInf;
  for (int j : ineq_set) best = std::max(best, term(j));
  for (int s = p; s < k; ++s) best = std::max(best, std::abs(term(s)));
  return best;
}

// One empirical-bootstrap statistic for an externally supplied resample
// (0-based observation indices).
inline double eb_statistic(const SampleMatrix& sample, const MomentEstimates& est,
                           std::span<const int> ineq_set, std::span<const int> resample_indices) {
  const int n = sample.n();
  const int p = sample.p();
  const int k = sample.k();
  if (static_cast<int>(resample_indices.size()) != n) {
    throw std::invalid_argument("eb_statistic: resample length must equal n");
  }
  for (int idx : resample_indices) {
    if (idx < 0 || idx >= n) throw std::invalid_argument("eb_statistic: resample index out of range");
  }
  detail::check_selection_indices(ineq_set, p);
  const double sqn = std::sqrt(static_cast<double>(n));
  auto term = [&](int j) {
    if (est.sigma_hat[j] == 0.0) return 0.0;
    CompensatedSum s;
    for (int i = 0; i < n; ++i) s.add(sample(resample_indices[i], j) - est.mu_hat[j]);
    return s.value() / (sqn * est.sigma_hat[j]);
  };
  double best = kNegInf;
  for (int j : ineq_set) best = std::max(best, term(j));
  for (int s = p; s < k; ++s) best = std::max(best, std::abs(term(s)));
  return best;
}

// Conservative right-continuous order statistic: the ceil(B (1-level))-th of
// B sorted draws (1-based). Near-integer products are snapped to the integer
// so that exact levels like 0.25 on B = 4 pick the intended index.
inline int bootstrap_order_index(int draws, double level) {
  if (draws < 1) throw std::invalid_argument("bootstrap_order_index: need B >= 1");
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("bootstrap_order_index: level must lie in (0, 1)");
  }
  const double x = static_cast<double>(draws) * (1.0 - level);
  const double r = std::round(x);
  int idx = (std::abs(x - r) < 1e-9) ? static_cast<int>(r) : static_cast<int>(std::ceil(x));
  return std::clamp(idx, 1, draws);
}

// Realized bootstrap statistics for one (kind, selection, seed) combination.
struct BootstrapDraws {
  std::vector<double> statistics;  // draw order
  std::vector<double> sorted;      // ascending, cached at finalization
  BootstrapKind kind = BootstrapKind::mb;
  std::optional<SelectionSet> restricted_to;  // nullopt = full inequality set
  std::uint64_t seed = 0;

  int draw_count() const { return static_cast<int>(statistics.size()); }

  static BootstrapDraws finalize(std::vector<double> stats, BootstrapKind kind,
                                 std::optional<SelectionSet> restricted, std::uint64_t seed) {
    BootstrapDraws d;
    d.statistics = std::move(stats);
    d.sorted = d.statistics;
    std::sort(d.sorted.begin(), d.sorted.end());
    d.kind = kind;
    d.restricted_to = std::move(restricted);
    d.seed = seed;
    return d;
  }
};

inline double bootstrap_quantile(const BootstrapDraws& draws, double level) {
  if (draws.draw_count() < 1) throw std::invalid_argument("bootstrap_quantile: need B >= 1");
  return draws.sorted[static_cast<std::size_t>(bootstrap_order_index(draws.draw_count(), level)) - 1];
}

// All B realized per-coordinate bootstrap statistics for one (sample, seed).
// The weights depend only on (seed, purpose, draw index), never on the
// selection set, so every selection evaluated against one table shares the
// same draws; that is what makes c^B(L1) <= c^B(L2) hold draw by draw for
// nested selections.
class BootstrapDrawTable {
 public:
  BootstrapDrawTable(BootstrapKind kind, const SampleMatrix& sample, const MomentEstimates& est,
                     int draws, std::uint64_t seed)
      : kind_(kind), seed_(seed), draws_(draws), p_(sample.p()) {
    if (draws < 1) throw std::invalid_argument("bootstrap: draw count B must be >= 1");
    detail::warn_small_draw_count(draws);
    const int n = sample.n();
    const int k = sample.k();
    if (est.k() != k) throw std::invalid_argument("bootstrap: estimates do not match sample");

    Eigen::MatrixXd z(n, k);
    for (int j = 0; j < k; ++j) {
      if (est.sigma_hat[j] > 0.0) {
        z.col(j) = (sample.data().col(j).array() - est.mu_hat[j]) / est.sigma_hat[j];
      } else {
        z.col(j).setZero();  // exact 0/0 = 0 contribution
      }
    }

    Eigen::MatrixXd weights(draws_, n);
    if (kind == BootstrapKind::mb) {
      for (int b = 0; b < draws_; ++b) {
        RngStream s(seed, StreamPurpose::mb_weights, static_cast<std::uint64_t>(b));
        for (int i = 0; i < n; ++i) weights(b, i) = s.normal();
      }
    } else {
      weights.setZero();
      const auto un = static_cast<std::uint32_t>(n);
      for (int b = 0; b < draws_; ++b) {
        RngStream s(seed, StreamPurpose::eb_indices, static_cast<std::uint64_t>(b));
        for (int i = 0; i < n; ++i) weights(b, static_cast<int>(s.uniform_index(un))) += 1.0;
      }
    }

    const Eigen::MatrixXd stats = (weights * z) / std::sqrt(static_cast<double>(n));
    ineq_ = stats.leftCols(p_);
    eq_.assign(static_cast<std::size_t>(draws_), kNegInf);
    full_.resize(static_cast<std::size_t>(draws_));
    for (int b = 0; b < draws_; ++b) {
      double eq_part = kNegInf;
      for (int s = p_; s < k; ++s) eq_part = std::max(eq_part, std::abs(stats(b, s)));
      eq_[static_cast<std::size_t>(b)] = eq_part;
      double m = eq_part;
      for (int j = 0; j < p_; ++j) m = std::max(m, ineq_(b, j));
      full_[static_cast<std::size_t>(b)] = m;
    }
  }

  BootstrapKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  int draw_count() const { return draws_; }
  int p() const { return p_; }

  // W_b restricted to the inequality set J (every equality always enters).
  double statistic(int b, std::span<const int> ineq_set) const {
    if (static_cast<int>(ineq_set.size()) == p_) return full_[static_cast<std::size_t>(b)];
    double m = eq_[static_cast<std::size_t>(b)];
    for (int j : ineq_set) m = std::max(m, ineq_(b, j));
    return m;
  }

  BootstrapDraws draws_for(std::span<const int> ineq_set,
                           std::optional<SelectionSet> restricted = {}) const {
    detail::check_selection_indices(ineq_set, p_);
    std::vector<double> w(static_cast<std::size_t>(draws_));
    for (int b = 0; b < draws_; ++b) w[static_cast<std::size_t>(b)] = statistic(b, ineq_set);
    return BootstrapDraws::finalize(std::move(w), kind_, std::move(restricted), seed_);
  }

  double critical_value(std::span<const int> ineq_set, double level) const {
    detail::check_selection_indices(ineq_set, p_);
    const int idx = bootstrap_order_index(draws_, level);
    std::vector<double> w(static_cast<std::size_t>(draws_));
    for (int b = 0; b < draws_; ++b) w[static_cast<std::size_t>(b)] = statistic(b, ineq_set);
    std::nth_element(w.begin(), w.begin() + (idx - 1), w.end());
    return w[static_cast<std::size_t>(idx) - 1];
  }

  double critical_value_full(double level) const {
    const int idx = bootstrap_order_index(draws_, level);
    std::vector<double> w = full_;
    std::nth_element(w.begin(), w.begin() + (idx - 1), w.end());
    return w[static_cast<std::size_t>(idx) - 1];
  }

 private:
  BootstrapKind kind_;
  std::uint64_t seed_;
  int draws_;
  int p_;
  Eigen::MatrixXd ineq_;      // B x p per-coordinate statistics
  std::vector<double> eq_;    // per-draw equality part; -inf when v = 0
  std::vector<double> full_;  // per-draw statistic over the full set
};

// Conditional (1-level)-quantile of the bootstrap statistic restricted to
// `ineq_set`, from B draws seeded deterministically by (seed, draw index).
inline double bootstrap_critical_value(BootstrapKind kind, const SampleMatrix& sample,
                                       const MomentEstimates& est, std::span<const int> ineq_set,
                                       double level, int draws, std::uint64_t seed) {
  if (draws < 1) throw std::invalid_argument("bootstrap_critical_value: draw count B must be >= 1");
  BootstrapDrawTable table(kind, sample, est, draws, seed);
  return table.critical_value(ineq_set, level);
}

// Bootstrap first-step selection:
// { j : sqrt(n) mu_hat_j / sigma_hat_j > -2 c^{B,1S}(beta_n) }, with the
// one-step critical value computed from the same shared draw stream.
inline SelectionSet bootstrap_first_step_set(BootstrapKind kind, const SampleMatrix& sample,
                                             const MomentEstimates& est, double alpha,
                                             double beta_n, int draws, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw std::invalid_argument("bootstrap_first_step_set: alpha must lie in (0, 0.5)");
  }
  if (!(beta_n > 0.0 && beta_n < alpha / 2.0)) {
    throw std::invalid_argument("bootstrap_first_step_set: beta_n must lie in (0, alpha/2)");
  }
  BootstrapDrawTable table(kind, sample, est, draws, seed);
  const double c1s = table.critical_value_full(beta_n);
  const double cut = -2.0 * c1s / std::sqrt(static_cast<double>(sample.n()));
  return select_by_ratio_cut(est, sample.p(), cut, /*strict=*/true, SelectionRule::bootstrap);
}

}  // namespace mineq
