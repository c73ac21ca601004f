#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mineq/extended_real.hpp"
#include "mineq/lasso.hpp"
#include "mineq/normal.hpp"
#include "mineq/sn.hpp"

namespace mineq {

// One configuration of the power-dominance diagnostics: a pure-inequality
// model (k = p) with moment-norm value M and Lasso constant epsilon
// (epsilon = C - 4/3 at delta = 1).
struct PowerRegionQuery {
  int n = 400;
  int p = 200;
  double beta_n = 0.001;
  double epsilon = 2.0 / 3.0;
  double delta = 1.0;
  double M = 1.0;
  std::optional<double> rho;  // max pairwise correlation, for the second bootstrap condition

  static PowerRegionQuery with_c_factor(int n, int p, double beta_n, double c_factor,
                                        double delta, double M) {
    if (!(c_factor > 4.0 / 3.0)) {
      throw std::invalid_argument("PowerRegionQuery: C must exceed 4/3");
    }
    PowerRegionQuery q;
    q.n = n;
    q.p = p;
    q.beta_n = beta_n;
    q.epsilon = c_factor - 4.0 / 3.0;
    q.delta = delta;
    q.M = M;
    return q;
  }

  void validate() const {
    if (n < 2) throw std::invalid_argument("PowerRegionQuery: n must be at least 2");
    if (p < 1) throw std::invalid_argument("PowerRegionQuery: p must be positive");
    if (!(beta_n > 0.0 && beta_n < 1.0)) {
      throw std::invalid_argument("PowerRegionQuery: beta_n must lie in (0, 1)");
    }
    if (!(epsilon > 0.0)) throw std::invalid_argument("PowerRegionQuery: epsilon must be positive");
    if (!(delta > 0.0 && delta <= 1.0)) {
      throw std::invalid_argument("PowerRegionQuery: delta must lie in (0, 1]");
    }
    if (!(M > 0.0)) throw std::invalid_argument("PowerRegionQuery: M must be positive");
  }
};

struct SnConditionCheck {
  bool highlevel = false;
  bool lowlevel = false;
  bool degenerate = false;     // lambda precondition failed; highlevel vacuous
  double slack_highlevel = 0;  // (4/3) c^{SN}(beta_n) - sqrt(n) lambda_n
  double slack_lowlevel = 0;   // log clause slack (third clause)
  bool beta_clause = false;    // beta_n <= 0.1
  bool moment_clause = false;  // M^2 n^{2/(2+delta)} >= 2
};

// Sufficient conditions for the Lasso first step to select inside the SN
// first step: the sharp comparison (4/3) c^{SN}(beta_n) >= sqrt(n) lambda_n,
// and the low-level three-clause condition whose log inequality slack is
// reported alongside.
inline SnConditionCheck check_sn_conditions(const PowerRegionQuery& q) {
  q.validate();
  SnConditionCheck out;
  const double c_sn = sn_quantile_value(q.n, q.p, q.beta_n);
  PenaltySpec penalty;
  penalty.mode = PenaltyMode::theoretical;
  penalty.epsilon = q.epsilon;
  penalty.delta = q.delta;
  try {
    const double lambda = lambda_penalty(penalty, q.n, q.M);
    out.slack_highlevel = (4.0 / 3.0) * c_sn - std::sqrt(static_cast<double>(q.n)) * lambda;
    out.highlevel = out.slack_highlevel >= 0.0;
  } catch (const std::domain_error&) {
    out.degenerate = true;
    out.highlevel = true;  // vacuously satisfied; flagged
    out.slack_highlevel = kPosInf;
  }
  out.beta_clause = q.beta_n <= 0.1;
  out.moment_clause = q.M * q.M * std::pow(q.n, 2.0 / (2.0 + q.delta)) >= 2.0;
  const double lhs = std::log(q.p / (2.0 * q.beta_n * kSqrt2Pi));
  const double factor = 4.0 / 3.0 + q.epsilon;
  const double rhs =
      9.0 / 8.0 * factor * factor * std::pow(q.n, q.delta / (2.0 + q.delta)) / (q.M * q.M);
  out.slack_lowlevel = lhs - rhs;
  out.lowlevel = out.beta_clause && out.moment_clause && lhs >= rhs;
  return out;
}

struct BootConditionCheck {
  bool cond_2ssuff = false;
  std::optional<bool> cond_2ssuff2;  // requires rho
  bool moment_clause = false;        // M^2 n^{2/(2+delta)} >= 2, reported alongside
  double slack_2ssuff = 0;
  std::optional<double> slack_2ssuff2;
};

// Sufficient conditions for the Lasso first step to select inside the
// bootstrap first step with probability approaching one: a Gaussian tail
// condition, and a correlation-sensitive variant when rho is supplied.
inline BootConditionCheck check_boot_conditions(const PowerRegionQuery& q) {
  q.validate();
  BootConditionCheck out;
  const double factor = 4.0 / 3.0 + q.epsilon;
  const double arg = 3.0 / std::pow(2.0, 1.5) * factor *
                     std::pow(q.n, q.delta / (2.0 * (2.0 + q.delta))) / q.M;
  out.slack_2ssuff = (1.0 - normal_cdf(arg)) - 3.0 * q.beta_n;
  out.cond_2ssuff = out.slack_2ssuff >= 0.0;
  out.moment_clause = q.M * q.M * std::pow(q.n, 2.0 / (2.0 + q.delta)) >= 2.0;
  if (q.rho) {
    const double one_minus_3b = 1.0 - 3.0 * q.beta_n;
    double lhs = kNegInf;
    if (one_minus_3b > 0.0) {
      lhs = std::sqrt((1.0 - *q.rho) * std::log(static_cast<double>(q.p)) / 2.0) -
            std::sqrt(2.0 * std::log(1.0 / one_minus_3b));
    }
    out.slack_2ssuff2 = lhs - arg;
    out.cond_2ssuff2 = lhs >= arg;
  }
  return out;
}

struct HeatmapCell {
  int p = 0;
  double M = 0.0;
  bool highlevel = false;
  bool lowlevel = false;
  bool degenerate = false;
  double slack_high = 0.0;
  double slack_low = 0.0;
};

struct HeatmapGrid {
  std::vector<int> p_values;
  std::vector<double> M_values;
  std::vector<HeatmapCell> cells;  // for each p, for each M

  std::string to_csv() const {
    std::string out = "p,M,highlevel,lowlevel,slack_high,slack_low,degenerate\n";
    char buf[128];
    for (const auto& c : cells) {
      std::snprintf(buf, sizeof(buf), "%d,%g,%d,%d,%g,%g,%d\n", c.p, c.M, c.highlevel ? 1 : 0,
                    c.lowlevel ? 1 : 0, c.slack_high, c.slack_low, c.degenerate ? 1 : 0);
      out += buf;
    }
    return out;
  }

  // Share of cells (degenerate ones excluded) where the sharp condition fails.
  double highlevel_fail_fraction() const {
    if (cells.empty()) return 0.0;
    std::size_t fail = 0;
    for (const auto& c : cells) {
      if (!c.degenerate && !c.highlevel) ++fail;
    }
    return static_cast<double>(fail) / static_cast<double>(cells.size());
  }
};

// Evaluates both SN power conditions over a (p, M) grid. Cells whose M makes
// the penalty radicand non-positive (including M = 0) are flagged degenerate.
inline HeatmapGrid heatmap_grid(int n = 400, double beta_n = 0.001, double c_factor = 2.0,
                                double delta = 1.0, double m_min = 0.0, double m_max = 10.0,
                                int m_steps = 101, int p_min = 1, int p_max = 1000,
                                int p_steps = 1000) {
  if (m_steps < 2 || p_steps < 2) {
    throw std::invalid_argument("heatmap_grid: need at least 2 steps per axis");
  }
  if (!(m_min >= 0.0 && m_max > m_min)) {
    throw std::invalid_argument("heatmap_grid: need 0 <= m_min < m_max");
  }
  if (!(p_min >= 1 && p_max >= p_min)) {
    throw std::invalid_argument("heatmap_grid: need 1 <= p_min <= p_max");
  }
  HeatmapGrid grid;
  grid.M_values.resize(static_cast<std::size_t>(m_steps));
  for (int i = 0; i < m_steps; ++i) {
    grid.M_values[static_cast<std::size_t>(i)] =
        m_min + (m_max - m_min) * static_cast<double>(i) / (m_steps - 1);
  }
  for (int i = 0; i < p_steps; ++i) {
    const double x = p_min + (static_cast<double>(p_max - p_min)) * i / (p_steps - 1);
    const int p = static_cast<int>(std::lround(x));
    if (grid.p_values.empty() || grid.p_values.back() != p) grid.p_values.push_back(p);
  }
  grid.cells.reserve(grid.p_values.size() * grid.M_values.size());
  for (int p : grid.p_values) {
    for (double M : grid.M_values) {
      HeatmapCell cell;
      cell.p = p;
      cell.M = M;
      if (M <= 0.0) {
        cell.degenerate = true;
        cell.highlevel = true;  // vacuous, as with a failed penalty precondition
        cell.lowlevel = false;
        cell.slack_high = kPosInf;
        cell.slack_low = kNegInf;
      } else {
        const auto q = PowerRegionQuery::with_c_factor(n, p, beta_n, c_factor, delta, M);
        const auto check = check_sn_conditions(q);
        cell.highlevel = check.highlevel;
        cell.lowlevel = check.lowlevel;
        cell.degenerate = check.degenerate;
        cell.slack_high = check.slack_highlevel;
        cell.slack_low = check.slack_lowlevel;
      }
      grid.cells.push_back(cell);
    }
  }
  return grid;
}

}  // namespace mineq
