#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mineq/moments.hpp"
#include "mineq/selection.hpp"

namespace mineq {

enum class PenaltyMode { theoretical, monte_carlo };

// The two printed forms of the data-driven penalty disagree on the exponent
// of the variance-like term; the `half` reading makes C = 4/3 + epsilon an
// exact reconciliation at delta = 1 and matches the reported selection
// behaviour, so it is the default. `one` is exposed for sensitivity checks.
enum class LambdaMcExponent { half, one };

struct PenaltySpec {
  PenaltyMode mode = PenaltyMode::monte_carlo;
  double epsilon = 2.0 / 3.0;  // theoretical mode
  double c_factor = 2.0;       // monte-carlo mode
  double delta = 1.0;
  LambdaMcExponent mc_exponent = LambdaMcExponent::half;

  void validate() const {
    if (!(delta > 0.0 && delta <= 1.0)) {
      throw std::invalid_argument("PenaltySpec: delta must lie in (0, 1]");
    }
    if (mode == PenaltyMode::theoretical) {
      if (!(epsilon > 0.0)) throw std::invalid_argument("PenaltySpec: epsilon must be positive");
    } else {
      if (!(c_factor > 0.0)) throw std::invalid_argument("PenaltySpec: C must be positive");
      if (delta != 1.0) {
        throw std::invalid_argument("PenaltySpec: the monte-carlo penalty is the delta = 1 analogue");
      }
    }
  }
};

// Penalty sequence lambda_n. Theoretical mode:
//   (4/3 + eps) n^{-1/2} (m^2 n^{-delta/(2+delta)} - n^{-1})^{-1/2};
// monte-carlo mode replaces 4/3 + eps by C at delta = 1.
inline double lambda_penalty(const PenaltySpec& spec, int n, double m_hat) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("lambda_penalty: n must be positive");
  if (!(m_hat >= 0.0)) throw std::invalid_argument("lambda_penalty: m_hat must be non-negative");
  const bool theoretical = spec.mode == PenaltyMode::theoretical;
  const double factor = theoretical ? 4.0 / 3.0 + spec.epsilon : spec.c_factor;
  const double shrink =
      theoretical ? std::pow(n, -spec.delta / (2.0 + spec.delta)) : std::pow(n, -1.0 / 3.0);
  const double radicand = m_hat * m_hat * shrink - 1.0 / n;
  if (!(radicand > 0.0)) {
    std::ostringstream msg;
    msg << "lambda_penalty: degenerate penalty: m_hat = " << m_hat << " with n = " << n
        << " makes m_hat^2 n^{-delta/(2+delta)} - 1/n non-positive";
    throw std::domain_error(msg.str());
  }
  const double tail = (!theoretical && spec.mc_exponent == LambdaMcExponent::one)
                          ? 1.0 / radicand
                          : 1.0 / std::sqrt(radicand);
  return factor / std::sqrt(static_cast<double>(n)) * tail;
}

// Per-coordinate closed form of the one-dimensional penalized least squares
// problem: sign(mu) max(|mu| - sigma lambda / 2, 0).
inline double soft_threshold(double mu_hat_j, double sigma_hat_j, double lambda) {
  if (!(sigma_hat_j >= 0.0)) throw std::invalid_argument("soft_threshold: sigma must be >= 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("soft_threshold: lambda must be positive");
  const double mag = std::abs(mu_hat_j) - 0.5 * sigma_hat_j * lambda;
  return mag > 0.0 ? std::copysign(mag, mu_hat_j) : 0.0;
}

// Lasso first-step selection: { j < p : mu_hat_j / sigma_hat_j >= -(3/2) lambda }.
// Degenerate coordinates are kept exactly when mu_hat_j >= 0.
inline SelectionSet select_lasso(const MomentEstimates& est, int p, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("select_lasso: lambda must be positive");
  return select_by_ratio_cut(est, p, -1.5 * lambda, /*strict=*/false, SelectionRule::lasso);
}

}  // namespace mineq
