#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mineq/lasso.hpp"
#include "mineq/moments.hpp"
#include "mineq/normal.hpp"
#include "mineq/selection.hpp"

namespace mineq {

struct SNContext {
  int n = 0;
  int k = 0;
  int p = 0;
  double alpha = 0.05;

  void validate() const {
    if (n < 2) throw std::invalid_argument("SNContext: n must be at least 2");
    if (k < 1 || p < 0 || p > k) throw std::invalid_argument("SNContext: need 0 <= p <= k, k >= 1");
    if (2 * (k - p) + p < 1) throw std::invalid_argument("SNContext: 2(k-p)+p must be >= 1");
    if (!(alpha > 0.0 && alpha < 0.5)) {
      throw std::invalid_argument("SNContext: alpha must lie in (0, 0.5)");
    }
  }
};

// Core self-normalized quantile with m = 2(k-p) + d moment conditions:
// 0 when m = 0, else Phi^{-1}(1 - level/m) / sqrt(1 - Phi^{-1}(...)^2 / n).
inline double sn_quantile_value(int n, int m, double level) {
  if (m < 0) throw std::invalid_argument("sn_quantile: negative condition count");
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("sn_quantile: level must lie in (0, 1)");
  }
  if (m == 0) return 0.0;
  const double q = normal_quantile(1.0 - level / m);
  const double radicand = 1.0 - q * q / n;
  if (!(radicand > 0.0)) {
    std::ostringstream msg;
    msg << "sn_quantile: sample too small: normal quantile " << q << " at level " << level
        << " with " << m << " conditions requires n > " << q * q << " (n = " << n << ")";
    throw std::domain_error(msg.str());
  }
  return q / std::sqrt(radicand);
}

// Self-normalized critical value when d of the p inequalities are retained.
inline double sn_quantile(const SNContext& ctx, int d, double level) {
  ctx.validate();
  if (d < 0 || d > ctx.p) throw std::invalid_argument("sn_quantile: d must lie in [0, p]");
  return sn_quantile_value(ctx.n, 2 * (ctx.k - ctx.p) + d, level);
}

// SN first-step selection: { j : sqrt(n) mu_hat_j / sigma_hat_j > -2 c^{SN,1S}(beta_n) }.
// The inequality is strict as printed; the two-step SN theory requires
// beta_n in (0, alpha/3) and that range is enforced here, so hybrid callers
// inherit it as well.
inline SelectionSet sn_first_step_set(const MomentEstimates& est, const SNContext& ctx,
                                      double beta_n) {
  ctx.validate();
  if (!(beta_n > 0.0 && beta_n < ctx.alpha / 3.0)) {
    throw std::invalid_argument("sn_first_step_set: beta_n must lie in (0, alpha/3)");
  }
  const double c1s = sn_quantile(ctx, ctx.p, beta_n);
  const double cut = -2.0 * c1s / std::sqrt(static_cast<double>(ctx.n));
  return select_by_ratio_cut(est, ctx.p, cut, /*strict=*/true, SelectionRule::sn);
}

enum class SNMethod { one_step, two_step, lasso };

// Critical value dispatch: one-step uses all p inequalities at level alpha;
// two-step uses |J_SN(beta_n)| at level alpha - 2 beta_n; lasso uses
// |J_L(lambda)| at level alpha. `tuning` is beta_n for two_step, lambda for
// lasso, and ignored for one_step.
inline double sn_critical_value(SNMethod method, const MomentEstimates& est, const SNContext& ctx,
                                double tuning = 0.0) {
  ctx.validate();
  switch (method) {
    case SNMethod::one_step:
      return sn_quantile(ctx, ctx.p, ctx.alpha);
    case SNMethod::two_step: {
      const double beta_n = tuning;
      if (!(ctx.alpha - 2.0 * beta_n > 0.0)) {
        throw std::invalid_argument("sn_critical_value: need alpha - 2 beta_n > 0");
      }
      const SelectionSet j = sn_first_step_set(est, ctx, beta_n);
      return sn_quantile(ctx, j.count(), ctx.alpha - 2.0 * beta_n);
    }
    case SNMethod::lasso: {
      const SelectionSet j = select_lasso(est, ctx.p, tuning);
      return sn_quantile(ctx, j.count(), ctx.alpha);
    }
  }
  throw std::logic_error("sn_critical_value: unreachable");
}

}  // namespace mineq
