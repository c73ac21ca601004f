#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mineq/extended_real.hpp"
#include "mineq/moments.hpp"

namespace mineq {

enum class SelectionRule { lasso, sn, bootstrap };

inline const char* to_string(SelectionRule r) {
  switch (r) {
    case SelectionRule::lasso: return "lasso";
    case SelectionRule::sn: return "sn";
    case SelectionRule::bootstrap: return "bootstrap";
  }
  return "?";
}

// Subset of the inequality coordinates {0, ..., p-1} kept by a first-step
// rule. `threshold` records the cut on the mu_hat/sigma_hat scale that
// produced the set.
struct SelectionSet {
  std::vector<int> indices;  // strictly increasing
  SelectionRule rule = SelectionRule::lasso;
  double threshold = 0.0;

  int count() const { return static_cast<int>(indices.size()); }
  bool contains(int j) const { return std::binary_search(indices.begin(), indices.end(), j); }
};

inline std::vector<int> full_index_set(int p) {
  std::vector<int> out(static_cast<std::size_t>(std::max(p, 0)));
  for (int j = 0; j < p; ++j) out[static_cast<std::size_t>(j)] = j;
  return out;
}

// Keeps inequality coordinates whose ratio mu_hat/sigma_hat clears the cut;
// the sigma_hat = 0 cases ride on the studentized_ratio convention. SN- and
// bootstrap-style sets use a strict inequality, the Lasso set does not.
inline SelectionSet select_by_ratio_cut(const MomentEstimates& est, int p, double cut,
                                        bool strict, SelectionRule rule) {
  if (p < 0 || p > est.k()) {
    throw std::invalid_argument("selection: p must lie in [0, k]");
  }
  SelectionSet out;
  out.rule = rule;
  out.threshold = cut;
  for (int j = 0; j < p; ++j) {
    const double ratio = studentized_ratio(est.mu_hat[j], est.sigma_hat[j]);
    if (strict ? (ratio > cut) : (ratio >= cut)) out.indices.push_back(j);
  }
  return out;
}

}  // namespace mineq
