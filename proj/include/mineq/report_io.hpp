#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "json.hpp"
#include "mineq/methods.hpp"
#include "mineq/simulate.hpp"

namespace mineq {

// JSON cannot carry infinities; extended reals are emitted as numbers when
// finite and as the strings "inf" / "-inf" otherwise.
inline nlohmann::json extended_to_json(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : "-inf";
}

inline nlohmann::json to_json(const TestOutcome& outcome) {
  nlohmann::json tuning = nlohmann::json::object();
  if (outcome.lambda) tuning["lambda"] = *outcome.lambda;
  if (outcome.beta_n) tuning["beta_n"] = *outcome.beta_n;
  return nlohmann::json{
      {"method", outcome.method},
      {"alpha", outcome.alpha},
      {"statistic", extended_to_json(outcome.statistic)},
      {"critical_value", extended_to_json(outcome.critical_value)},
      {"reject", outcome.reject},
      {"retained", outcome.retained},
      {"tuning", tuning},
      {"seed", outcome.seed},
  };
}

inline nlohmann::json to_json(const SimulationReport& report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : report.cells) {
    nlohmann::json rejections = nlohmann::json::object();
    for (std::size_t m = 0; m < report.method_labels.size(); ++m) {
      rejections[report.method_labels[m]] = cell.rejection_pct[m];
    }
    nlohmann::json retained = nlohmann::json::object();
    for (std::size_t q = 0; q < report.rule_labels.size(); ++q) {
      retained[report.rule_labels[q]] = cell.retained_pct[q];
    }
    nlohmann::json c{
        {"design", cell.design.design_id},
        {"density", to_string(cell.design.error_law)},
        {"p", cell.design.p},
        {"rho", cell.design.rho},
        {"n", cell.design.n},
        {"replications", cell.replications},
        {"failures", cell.failures},
        {"rejection_pct", rejections},
        {"retained_pct", retained},
    };
    if (cell.failures > 0) c["first_error"] = cell.first_error;
    cells.push_back(std::move(c));
  }
  return nlohmann::json{
      {"seed", report.seed},
      {"replications", report.replications},
      {"cells", cells},
  };
}

inline std::string to_csv(const ConfidenceSetResult& result) {
  std::string out = "label,in_set,statistic,critical_value,reject,retained,flagged,error\n";
  char buf[96];
  auto num = [&](double x) -> std::string {
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
  };
  for (const auto& eval : result.evaluations) {
    out += eval.label;
    if (eval.failed || !eval.outcome) {
      out += ",0,,,,,1," + eval.error + "\n";
      continue;
    }
    const TestOutcome& o = *eval.outcome;
    out += std::string(",") + (o.reject ? "0" : "1") + "," + num(o.statistic) + "," +
           num(o.critical_value) + "," + (o.reject ? "1" : "0") + "," + std::to_string(o.retained) +
           ",0,\n";
  }
  return out;
}

}  // namespace mineq
