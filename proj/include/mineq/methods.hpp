#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "mineq/bootstrap.hpp"
#include "mineq/lasso.hpp"
#include "mineq/moments.hpp"
#include "mineq/parallel.hpp"
#include "mineq/rng.hpp"
#include "mineq/sample_matrix.hpp"
#include "mineq/selection.hpp"
#include "mineq/sn.hpp"

namespace mineq {

// The eleven inference methods: second step SN / multiplier bootstrap /
// empirical bootstrap, crossed with no first step (1S), an SN first step
// (2S for SN, H for bootstrap), a same-kind bootstrap first step (2S), or a
// Lasso first step.
enum class MethodId {
  sn_lasso,
  mb_lasso,
  eb_lasso,
  sn_1s,
  sn_2s,
  mb_1s,
  mb_h,
  mb_2s,
  eb_1s,
  eb_h,
  eb_2s,
};

inline const char* to_string(MethodId id) {
  switch (id) {
    case MethodId::sn_lasso: return "SN-Lasso";
    case MethodId::mb_lasso: return "MB-Lasso";
    case MethodId::eb_lasso: return "EB-Lasso";
    case MethodId::sn_1s: return "SN-1S";
    case MethodId::sn_2s: return "SN-2S";
    case MethodId::mb_1s: return "MB-1S";
    case MethodId::mb_h: return "MB-H";
    case MethodId::mb_2s: return "MB-2S";
    case MethodId::eb_1s: return "EB-1S";
    case MethodId::eb_h: return "EB-H";
    case MethodId::eb_2s: return "EB-2S";
  }
  return "?";
}

inline std::optional<MethodId> parse_method_id(std::string_view token) {
  static const std::pair<std::string_view, MethodId> table[] = {
      {"SN-Lasso", MethodId::sn_lasso}, {"MB-Lasso", MethodId::mb_lasso},
      {"EB-Lasso", MethodId::eb_lasso}, {"SN-1S", MethodId::sn_1s},
      {"SN-2S", MethodId::sn_2s},       {"MB-1S", MethodId::mb_1s},
      {"MB-H", MethodId::mb_h},         {"MB-2S", MethodId::mb_2s},
      {"EB-1S", MethodId::eb_1s},       {"EB-H", MethodId::eb_h},
      {"EB-2S", MethodId::eb_2s},
  };
  for (const auto& [name, id] : table) {
    if (name == token) return id;
  }
  return std::nullopt;
}

struct MethodSpec {
  MethodId id = MethodId::sn_1s;
  double alpha = 0.05;
  std::optional<double> beta_n;         // SN-2S, MB-H, MB-2S, EB-H, EB-2S
  std::optional<PenaltySpec> penalty;   // *-Lasso
  std::optional<int> draws;             // bootstrap draw count B
  std::uint64_t seed = 0;

  bool uses_bootstrap() const {
    switch (id) {
      case MethodId::mb_lasso:
      case MethodId::mb_1s:
      case MethodId::mb_h:
      case MethodId::mb_2s:
      case MethodId::eb_lasso:
      case MethodId::eb_1s:
      case MethodId::eb_h:
      case MethodId::eb_2s: return true;
      default: return false;
    }
  }

  bool needs_beta() const {
    return id == MethodId::sn_2s || id == MethodId::mb_h || id == MethodId::mb_2s ||
           id == MethodId::eb_h || id == MethodId::eb_2s;
  }

  bool is_lasso() const {
    return id == MethodId::sn_lasso || id == MethodId::mb_lasso || id == MethodId::eb_lasso;
  }

  BootstrapKind bootstrap_kind() const {
    switch (id) {
      case MethodId::mb_lasso:
      case MethodId::mb_1s:
      case MethodId::mb_h:
      case MethodId::mb_2s: return BootstrapKind::mb;
      default: return BootstrapKind::eb;
    }
  }

  void validate() const {
    if (!(alpha > 0.0 && alpha < 0.5)) {
      throw std::invalid_argument(std::string(to_string(id)) + ": alpha must lie in (0, 0.5)");
    }
    if (needs_beta() != beta_n.has_value()) {
      throw std::invalid_argument(std::string(to_string(id)) +
                                  ": beta_n must be present exactly for two-step/hybrid methods");
    }
    if (is_lasso() != penalty.has_value()) {
      throw std::invalid_argument(std::string(to_string(id)) +
                                  ": penalty must be present exactly for Lasso methods");
    }
    if (penalty) penalty->validate();
    if (uses_bootstrap() != draws.has_value()) {
      throw std::invalid_argument(std::string(to_string(id)) +
                                  ": draw count B must be present exactly for bootstrap methods");
    }
    if (draws && *draws < 1) {
      throw std::invalid_argument(std::string(to_string(id)) + ": draw count B must be >= 1");
    }
    if (beta_n) {
      const double limit = (id == MethodId::sn_2s) ? alpha / 3.0 : alpha / 2.0;
      if (!(*beta_n > 0.0 && *beta_n < limit)) {
        throw std::invalid_argument(std::string(to_string(id)) + ": beta_n must lie in (0, alpha/" +
                                    (id == MethodId::sn_2s ? "3)" : "2)"));
      }
    }
  }

  // e.g. "MB-Lasso[C=2]", "EB-2S[bn=0.01%]", "SN-1S"
  std::string label() const {
    std::string out = to_string(id);
    char buf[48];
    if (penalty) {
      if (penalty->mode == PenaltyMode::monte_carlo) {
        std::snprintf(buf, sizeof(buf), "[C=%g]", penalty->c_factor);
      } else {
        std::snprintf(buf, sizeof(buf), "[eps=%g]", penalty->epsilon);
      }
      out += buf;
    } else if (beta_n) {
      std::snprintf(buf, sizeof(buf), "[bn=%g%%]", *beta_n * 100.0);
      out += buf;
    }
    return out;
  }
};

// Result of one hypothesis test. `selection` is absent for one-step methods
// (they treat every inequality as binding), in which case retained == p.
struct TestOutcome {
  std::string method;
  double alpha = 0.05;
  double statistic = 0.0;       // extended real
  double critical_value = 0.0;  // extended real
  bool reject = false;
  int retained = 0;
  std::optional<SelectionSet> selection;
  std::optional<double> lambda;  // Lasso penalty actually used
  std::optional<double> beta_n;
  std::uint64_t seed = 0;
};

// Evaluates methods against one sample while sharing everything shareable:
// moment estimates per delta, bootstrap draw tables per (kind, B, seed), and
// first-step selections per tuning. Sharing the draw tables across methods is
// what makes the dominance relations hold exactly, draw by draw.
class MethodEngine {
 public:
  explicit MethodEngine(const SampleMatrix& sample) : sample_(sample) {}

  const SampleMatrix& sample() const { return sample_; }

  const MomentEstimates& moments(double delta = 1.0) {
    auto it = moments_.find(delta);
    if (it == moments_.end()) it = moments_.emplace(delta, estimate_moments(sample_, delta)).first;
    return it->second;
  }

  const BootstrapDrawTable& draw_table(BootstrapKind kind, int draws, std::uint64_t seed) {
    const auto key = std::make_tuple(kind == BootstrapKind::mb ? 0 : 1, draws, seed);
    auto it = tables_.find(key);
    if (it == tables_.end()) {
      it = tables_
               .emplace(std::piecewise_construct, std::forward_as_tuple(key),
                        std::forward_as_tuple(kind, sample_, moments(1.0), draws, seed))
               .first;
    }
    return it->second;
  }

  // Returns (lambda, selection) for the given penalty specification.
  const std::pair<double, SelectionSet>& lasso_selection(const PenaltySpec& penalty) {
    const auto& est = moments(penalty.delta);
    const double lambda = lambda_penalty(penalty, sample_.n(), est.m_hat);
    auto it = lasso_.find(lambda);
    if (it == lasso_.end()) {
      it = lasso_.emplace(lambda, std::make_pair(lambda, select_lasso(est, sample_.p(), lambda)))
               .first;
    }
    return it->second;
  }

  const SelectionSet& sn_selection(double alpha, double beta_n) {
    const auto key = std::make_pair(alpha, beta_n);
    auto it = sn_.find(key);
    if (it == sn_.end()) {
      const SNContext ctx{sample_.n(), sample_.k(), sample_.p(), alpha};
      it = sn_.emplace(key, sn_first_step_set(moments(1.0), ctx, beta_n)).first;
    }
    return it->second;
  }

  const SelectionSet& bootstrap_selection(BootstrapKind kind, double alpha, double beta_n,
                                          int draws, std::uint64_t seed) {
    const auto key = std::make_tuple(kind == BootstrapKind::mb ? 0 : 1, alpha, beta_n, draws, seed);
    auto it = boot_.find(key);
    if (it == boot_.end()) {
      if (!(beta_n > 0.0 && beta_n < alpha / 2.0)) {
        throw std::invalid_argument("bootstrap selection: beta_n must lie in (0, alpha/2)");
      }
      const auto& table = draw_table(kind, draws, seed);
      const double c1s = table.critical_value_full(beta_n);
      const double cut = -2.0 * c1s / std::sqrt(static_cast<double>(sample_.n()));
      it = boot_
               .emplace(key, select_by_ratio_cut(moments(1.0), sample_.p(), cut, /*strict=*/true,
                                                 SelectionRule::bootstrap))
               .first;
    }
    return it->second;
  }

  TestOutcome run(const MethodSpec& spec) {
    spec.validate();
    const int n = sample_.n();
    const int p = sample_.p();
    const int k = sample_.k();
    const double delta = spec.penalty ? spec.penalty->delta : 1.0;
    const auto& est = moments(delta);
    const SNContext ctx{n, k, p, spec.alpha};
    const double statistic = test_statistic(est, n, p);

    double critical = 0.0;
    std::optional<SelectionSet> selection;
    std::optional<double> lambda;

    switch (spec.id) {
      case MethodId::sn_1s:
        critical = sn_quantile(ctx, p, spec.alpha);
        break;
      case MethodId::sn_2s: {
        selection = sn_selection(spec.alpha, *spec.beta_n);
        critical = sn_quantile(ctx, selection->count(), spec.alpha - 2.0 * *spec.beta_n);
        break;
      }
      case MethodId::sn_lasso: {
        const auto& [lam, set] = lasso_selection(*spec.penalty);
        lambda = lam;
        selection = set;
        critical = sn_quantile(ctx, selection->count(), spec.alpha);
        break;
      }
      case MethodId::mb_1s:
      case MethodId::eb_1s:
        critical = draw_table(spec.bootstrap_kind(), *spec.draws, spec.seed)
                       .critical_value_full(spec.alpha);
        break;
      case MethodId::mb_2s:
      case MethodId::eb_2s: {
        selection =
            bootstrap_selection(spec.bootstrap_kind(), spec.alpha, *spec.beta_n, *spec.draws, spec.seed);
        critical = draw_table(spec.bootstrap_kind(), *spec.draws, spec.seed)
                       .critical_value(selection->indices, spec.alpha - 2.0 * *spec.beta_n);
        break;
      }
      case MethodId::mb_h:
      case MethodId::eb_h: {
        selection = sn_selection(spec.alpha, *spec.beta_n);
        critical = draw_table(spec.bootstrap_kind(), *spec.draws, spec.seed)
                       .critical_value(selection->indices, spec.alpha - 2.0 * *spec.beta_n);
        break;
      }
      case MethodId::mb_lasso:
      case MethodId::eb_lasso: {
        const auto& [lam, set] = lasso_selection(*spec.penalty);
        lambda = lam;
        selection = set;
        critical = draw_table(spec.bootstrap_kind(), *spec.draws, spec.seed)
                       .critical_value(selection->indices, spec.alpha);
        break;
      }
    }

    TestOutcome out;
    out.method = spec.label();
    out.alpha = spec.alpha;
    out.statistic = statistic;
    out.critical_value = critical;
    out.reject = statistic > critical;  // strict; ties never reject
    out.retained = selection ? selection->count() : p;
    out.selection = std::move(selection);
    out.lambda = lambda;
    out.beta_n = spec.beta_n;
    out.seed = spec.seed;
    return out;
  }

 private:
  const SampleMatrix& sample_;
  std::map<double, MomentEstimates> moments_;
  std::map<std::tuple<int, int, std::uint64_t>, BootstrapDrawTable> tables_;
  std::map<double, std::pair<double, SelectionSet>> lasso_;
  std::map<std::pair<double, double>, SelectionSet> sn_;
  std::map<std::tuple<int, double, double, int, std::uint64_t>, SelectionSet> boot_;
};

inline TestOutcome run_method(const MethodSpec& spec, const SampleMatrix& sample) {
  MethodEngine engine(sample);
  return engine.run(spec);
}

// One candidate parameter in a confidence-set scan; the caller supplies the
// mapping from the parameter to its moment sample.
struct GridPoint {
  std::string label;
  std::function<SampleMatrix()> provider;
};

struct GridEvaluation {
  std::string label;
  bool failed = false;
  std::string error;
  std::optional<TestOutcome> outcome;
};

struct ConfidenceSetResult {
  std::vector<GridEvaluation> evaluations;
  std::vector<std::string> retained_labels;  // grid points where the test does not reject
};

// Test inversion over a parameter grid: keeps every point with T <= c.
// Each point gets a deterministic seed derived from (seed, point index);
// provider failures are recorded and the scan continues.
inline ConfidenceSetResult confidence_set(const MethodSpec& base, std::span<const GridPoint> grid,
                                          std::uint64_t seed, int threads = 1) {
  if (grid.empty()) throw std::invalid_argument("confidence_set: grid must be nonempty");
  base.validate();
  ConfidenceSetResult result;
  result.evaluations.resize(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    auto& eval = result.evaluations[i];
    eval.label = grid[i].label;
    try {
      const SampleMatrix sample = grid[i].provider();
      MethodSpec spec = base;
      spec.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
      eval.outcome = run_method(spec, sample);
    } catch (const std::exception& e) {
      eval.failed = true;
      eval.error = e.what();
    }
  });
  for (const auto& eval : result.evaluations) {
    if (eval.outcome && !eval.outcome->reject) result.retained_labels.push_back(eval.label);
  }
  return result;
}

}  // namespace mineq
