#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mineq/methods.hpp"
#include "mineq/parallel.hpp"
#include "mineq/rng.hpp"
#include "mineq/sample_matrix.hpp"
#include "mineq/summation.hpp"

namespace mineq {

enum class SigmaKind { equicorrelated, toeplitz };
enum class ErrorLaw { t4_scaled, uniform_sym };

inline const char* to_string(SigmaKind k) {
  return k == SigmaKind::equicorrelated ? "equicorrelated" : "toeplitz";
}
inline const char* to_string(ErrorLaw law) {
  return law == ErrorLaw::t4_scaled ? "t4" : "uniform";
}

// Mean vectors of the fourteen built-in designs. The head/tail boundary is
// the literal real inequality j <= 0.1 p (no flooring), with j one-based.
inline std::vector<double> make_mu(int design_id, int p) {
  if (p < 1) throw std::invalid_argument("make_mu: p must be positive");
  const double boundary = 0.1 * static_cast<double>(p);
  double head = 0.0;
  double tail = 0.0;
  switch (design_id) {
    case 1:
    case 2: head = 0.0; tail = -0.8; break;
    case 3:
    case 4: head = 0.0; tail = 0.0; break;
    case 5:
    case 6: head = 0.05; tail = 0.05; break;
    case 7:
    case 8: head = 0.05; tail = -0.75; break;
    case 9: head = 0.05; tail = -0.6; break;
    case 10: head = 0.05; tail = -0.5; break;
    case 11: head = 0.05; tail = -0.4; break;
    case 12: head = 0.05; tail = -0.3; break;
    case 13: head = 0.05; tail = -0.2; break;
    case 14: head = 0.05; tail = -0.1; break;
    default:
      throw std::invalid_argument("make_mu: unknown design id " + std::to_string(design_id));
  }
  std::vector<double> mu(static_cast<std::size_t>(p));
  for (int j = 1; j <= p; ++j) {
    mu[static_cast<std::size_t>(j - 1)] = (static_cast<double>(j) <= boundary) ? head : tail;
  }
  return mu;
}

inline SigmaKind design_sigma_kind(int design_id) {
  switch (design_id) {
    case 1:
    case 3:
    case 5:
    case 7: return SigmaKind::equicorrelated;
    case 2:
    case 4:
    case 6:
    case 8:
    case 9:
    case 10:
    case 11:
    case 12:
    case 13:
    case 14: return SigmaKind::toeplitz;
    default:
      throw std::invalid_argument("design_sigma_kind: unknown design id " +
                                  std::to_string(design_id));
  }
}

struct DesignSpec {
  int design_id = 3;
  int p = 200;
  double rho = 0.0;
  SigmaKind sigma_kind = SigmaKind::equicorrelated;
  ErrorLaw error_law = ErrorLaw::t4_scaled;
  int n = 400;

  static DesignSpec make(int design_id, int p, double rho, ErrorLaw law, int n = 400) {
    DesignSpec d;
    d.design_id = design_id;
    d.p = p;
    d.rho = rho;
    d.sigma_kind = design_sigma_kind(design_id);
    d.error_law = law;
    d.n = n;
    d.validate();
    return d;
  }

  void validate() const {
    if (p < 1) throw std::invalid_argument("DesignSpec: p must be positive");
    if (n < 2) throw std::invalid_argument("DesignSpec: n must be at least 2");
    make_mu(design_id, p);  // rejects unknown ids
    if (sigma_kind != design_sigma_kind(design_id)) {
      throw std::invalid_argument("DesignSpec: sigma kind does not match design " +
                                  std::to_string(design_id));
    }
  }

  bool null_hypothesis_true() const { return design_id <= 4; }
};

// Covariance matrix plus a factor A with A' A = Sigma (A upper triangular
// from the Cholesky factorization), so that X = mu + A' eps has variance
// Sigma when eps has identity covariance.
struct SigmaFactor {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd factor;
};

// Positive-definiteness bounds: equicorrelated needs rho in (-1/(p-1), 1),
// Toeplitz needs |rho| < 1.
inline void validate_sigma_params(SigmaKind kind, int p, double rho) {
  if (p < 1) throw std::invalid_argument("make_sigma: p must be positive");
  if (kind == SigmaKind::equicorrelated) {
    if (p > 1 && !(rho > -1.0 / (p - 1) && rho < 1.0)) {
      throw std::invalid_argument("make_sigma: equicorrelated needs rho in (-1/(p-1), 1)");
    }
  } else {
    if (!(std::abs(rho) < 1.0)) {
      throw std::invalid_argument("make_sigma: Toeplitz needs |rho| < 1");
    }
  }
}

inline SigmaFactor make_sigma(SigmaKind kind, int p, double rho) {
  validate_sigma_params(kind, p, rho);
  SigmaFactor out;
  if (rho == 0.0) {
    out.sigma = Eigen::MatrixXd::Identity(p, p);
    out.factor = Eigen::MatrixXd::Identity(p, p);
    return out;
  }
  out.sigma.resize(p, p);
  if (kind == SigmaKind::equicorrelated) {
    out.sigma.setConstant(rho);
    out.sigma.diagonal().setOnes();
  } else {
    std::vector<double> pw(static_cast<std::size_t>(p));
    pw[0] = 1.0;
    for (int d = 1; d < p; ++d) pw[static_cast<std::size_t>(d)] = pw[static_cast<std::size_t>(d - 1)] * rho;
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) out.sigma(i, j) = pw[static_cast<std::size_t>(std::abs(i - j))];
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(out.sigma);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("make_sigma: covariance is not positive definite");
  }
  out.factor = llt.matrixL().transpose();
  return out;
}

// i.i.d. error matrix with the requested law; both laws have mean 0 and
// variance 1. Entries are drawn row-major (observation, then coordinate).
inline Eigen::MatrixXd draw_errors(ErrorLaw law, int n, int p, RngStream& stream) {
  if (n < 1 || p < 1) throw std::invalid_argument("draw_errors: need n, p >= 1");
  Eigen::MatrixXd e(n, p);
  if (law == ErrorLaw::t4_scaled) {
    const double inv_sqrt2 = kInvSqrt2;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) e(i, j) = stream.t4() * inv_sqrt2;
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) e(i, j) = stream.uniform_sym_sqrt3();
    }
  }
  return e;
}

// X_i = mu + A' eps_i, i.e. X = E A + 1 mu' in row form. All p coordinates
// are inequalities (v = 0).
inline SampleMatrix generate_sample(const DesignSpec& design, const SigmaFactor& factor,
                                    RngStream& stream) {
  if (factor.factor.rows() != design.p || factor.factor.cols() != design.p) {
    throw std::invalid_argument("generate_sample: factor dimensions do not match design");
  }
  Eigen::MatrixXd x = draw_errors(design.error_law, design.n, design.p, stream);
  if (design.rho != 0.0) x = (x * factor.factor).eval();
  const std::vector<double> mu = make_mu(design.design_id, design.p);
  for (int j = 0; j < design.p; ++j) x.col(j).array() += mu[static_cast<std::size_t>(j)];
  return SampleMatrix(std::move(x), design.p);
}

inline SampleMatrix generate_sample(const DesignSpec& design, const SigmaFactor& factor,
                                    std::uint64_t seed) {
  RngStream stream(seed, StreamPurpose::dgp_errors, 0);
  return generate_sample(design, factor, stream);
}

inline SampleMatrix generate_sample(const DesignSpec& design, std::uint64_t seed) {
  return generate_sample(design, make_sigma(design.sigma_kind, design.p, design.rho), seed);
}

struct MonteCarloConfig {
  int replications = 500;
  std::vector<MethodSpec> methods;
  std::uint64_t seed = 0;
  int threads = 1;
};

// A first-step selection rule tracked for the retained-fraction tables.
struct FirstStepRule {
  SelectionRule kind = SelectionRule::lasso;
  double alpha = 0.05;
  double beta_n = 0.0;          // sn / bootstrap rules
  PenaltySpec penalty{};        // lasso rules
  BootstrapKind boot_kind = BootstrapKind::mb;
  int draws = 0;
  std::string label;
};

inline std::vector<FirstStepRule> first_step_rules(std::span<const MethodSpec> methods) {
  std::vector<FirstStepRule> rules;
  auto add = [&](FirstStepRule r) {
    for (const auto& existing : rules) {
      if (existing.label == r.label) return;
    }
    rules.push_back(std::move(r));
  };
  char buf[48];
  for (const auto& m : methods) {
    if (m.is_lasso()) {
      FirstStepRule r;
      r.kind = SelectionRule::lasso;
      r.alpha = m.alpha;
      r.penalty = *m.penalty;
      if (r.penalty.mode == PenaltyMode::monte_carlo) {
        std::snprintf(buf, sizeof(buf), "lasso[C=%g]", r.penalty.c_factor);
      } else {
        std::snprintf(buf, sizeof(buf), "lasso[eps=%g]", r.penalty.epsilon);
      }
      r.label = buf;
      add(std::move(r));
    } else if (m.id == MethodId::sn_2s || m.id == MethodId::mb_h || m.id == MethodId::eb_h) {
      FirstStepRule r;
      r.kind = SelectionRule::sn;
      r.alpha = m.alpha;
      r.beta_n = *m.beta_n;
      std::snprintf(buf, sizeof(buf), "sn[bn=%g%%]", r.beta_n * 100.0);
      r.label = buf;
      add(std::move(r));
    } else if (m.id == MethodId::mb_2s || m.id == MethodId::eb_2s) {
      FirstStepRule r;
      r.kind = SelectionRule::bootstrap;
      r.alpha = m.alpha;
      r.beta_n = *m.beta_n;
      r.boot_kind = m.bootstrap_kind();
      r.draws = *m.draws;
      std::snprintf(buf, sizeof(buf), "%s[bn=%g%%]",
                    r.boot_kind == BootstrapKind::mb ? "mb" : "eb", r.beta_n * 100.0);
      r.label = buf;
      add(std::move(r));
    }
  }
  return rules;
}

struct SimulationCell {
  DesignSpec design;
  std::vector<double> rejection_pct;  // aligned with SimulationReport::method_labels
  std::vector<double> retained_pct;   // aligned with SimulationReport::rule_labels
  int replications = 0;
  int failures = 0;
  std::string first_error;
  std::uint64_t seed = 0;
};

struct SimulationReport {
  std::vector<std::string> method_labels;
  std::vector<std::string> rule_labels;
  std::vector<SimulationCell> cells;
  std::uint64_t seed = 0;
  int replications = 0;
  double wall_seconds = 0.0;  // reported on stderr only, never in artifacts

  // One row per (design, density, p, rho), one rejection column per method,
  // mirroring the layout of the published tables.
  std::string rejection_csv() const { return table_csv(method_labels, &SimulationCell::rejection_pct); }
  std::string retained_csv() const { return table_csv(rule_labels, &SimulationCell::retained_pct); }

 private:
  std::string table_csv(const std::vector<std::string>& columns,
                        std::vector<double> SimulationCell::* field) const {
    std::string out = "design,density,p,rho";
    for (const auto& c : columns) {
      out += ',';
      out += c;
    }
    out += '\n';
    char buf[64];
    for (const auto& cell : cells) {
      std::snprintf(buf, sizeof(buf), "%d,%s,%d,%g", cell.design.design_id,
                    to_string(cell.design.error_law), cell.design.p, cell.design.rho);
      out += buf;
      for (double v : cell.*field) {
        std::snprintf(buf, sizeof(buf), ",%.2f", v);
        out += buf;
      }
      out += '\n';
    }
    return out;
  }
};

// Monte Carlo engine. Replication r of cell c uses the derived seed
// (seed, c, r) for both the data draw and every bootstrap stream, so a
// report is reproducible bit-for-bit at any thread count.
inline SimulationReport run_monte_carlo(const MonteCarloConfig& config,
                                        std::span<const DesignSpec> designs) {
  if (config.replications < 1) {
    throw std::invalid_argument("run_monte_carlo: need at least one replication");
  }
  if (config.methods.empty()) throw std::invalid_argument("run_monte_carlo: no methods");
  if (designs.empty()) throw std::invalid_argument("run_monte_carlo: no designs");
  for (const auto& m : config.methods) m.validate();
  for (const auto& d : designs) d.validate();

  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n_methods = config.methods.size();
  const std::vector<FirstStepRule> rules = first_step_rules(config.methods);
  const std::size_t n_rules = rules.size();
  const int reps = config.replications;

  SimulationReport report;
  report.seed = config.seed;
  report.replications = reps;
  for (const auto& m : config.methods) report.method_labels.push_back(m.label());
  for (const auto& r : rules) report.rule_labels.push_back(r.label);

  for (std::size_t cell_index = 0; cell_index < designs.size(); ++cell_index) {
    const DesignSpec& design = designs[cell_index];
    const SigmaFactor factor = make_sigma(design.sigma_kind, design.p, design.rho);

    std::vector<std::uint8_t> rejects(static_cast<std::size_t>(reps) * n_methods, 0);
    std::vector<double> retained(static_cast<std::size_t>(reps) * n_rules, 0.0);
    std::vector<std::uint8_t> failed(static_cast<std::size_t>(reps), 0);
    std::vector<std::string> errors(static_cast<std::size_t>(reps));

    parallel_for(static_cast<std::size_t>(reps), config.threads, [&](std::size_t r) {
      const std::uint64_t rep_seed = derive_seed(config.seed, cell_index, r);
      try {
        const SampleMatrix sample = generate_sample(design, factor, rep_seed);
        MethodEngine engine(sample);
        for (std::size_t m = 0; m < n_methods; ++m) {
          MethodSpec spec = config.methods[m];
          spec.seed = rep_seed;
          rejects[r * n_methods + m] = engine.run(spec).reject ? 1 : 0;
        }
        for (std::size_t q = 0; q < n_rules; ++q) {
          const FirstStepRule& rule = rules[q];
          int count = 0;
          switch (rule.kind) {
            case SelectionRule::lasso:
              count = engine.lasso_selection(rule.penalty).second.count();
              break;
            case SelectionRule::sn:
              count = engine.sn_selection(rule.alpha, rule.beta_n).count();
              break;
            case SelectionRule::bootstrap:
              count = engine
                          .bootstrap_selection(rule.boot_kind, rule.alpha, rule.beta_n, rule.draws,
                                               rep_seed)
                          .count();
              break;
          }
          retained[r * n_rules + q] = 100.0 * count / design.p;
        }
      } catch (const std::exception& e) {
        failed[r] = 1;
        errors[r] = e.what();
      }
    });

    SimulationCell cell;
    cell.design = design;
    cell.replications = reps;
    cell.seed = config.seed;
    int ok = 0;
    for (int r = 0; r < reps; ++r) {
      if (failed[static_cast<std::size_t>(r)]) {
        ++cell.failures;
        if (cell.first_error.empty()) cell.first_error = errors[static_cast<std::size_t>(r)];
      } else {
        ++ok;
      }
    }
    cell.rejection_pct.resize(n_methods, 0.0);
    for (std::size_t m = 0; m < n_methods; ++m) {
      long hits = 0;
      for (int r = 0; r < reps; ++r) {
        if (!failed[static_cast<std::size_t>(r)]) hits += rejects[static_cast<std::size_t>(r) * n_methods + m];
      }
      cell.rejection_pct[m] = ok > 0 ? 100.0 * static_cast<double>(hits) / ok : 0.0;
    }
    cell.retained_pct.resize(n_rules, 0.0);
    for (std::size_t q = 0; q < n_rules; ++q) {
      CompensatedSum s;
      for (int r = 0; r < reps; ++r) {
        if (!failed[static_cast<std::size_t>(r)]) s.add(retained[static_cast<std::size_t>(r) * n_rules + q]);
      }
      cell.retained_pct[q] = ok > 0 ? s.value() / ok : 0.0;
    }
    report.cells.push_back(std::move(cell));
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace mineq
