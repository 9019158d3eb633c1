#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "dld/network.hpp"

namespace dld {

/// Connection-weights variable importance for the fitted model.
/// raw_share and scaled follow kFeatureNames order.
struct ImportanceReport {
  std::vector<double> raw_share;  // percents, summing to 100
  std::vector<double> scaled;     // min-max scaled to [0, 100]
  bool degenerate_scaling = false;  // all shares equal; scaled all 100
};

/// Absolute-weights importance: input i collects, over hidden units j, its
/// within-unit share |w_ij| / sum_i' |w_i'j| weighted by |v_j|. Biases are
/// excluded; a hidden unit whose input weights are all zero contributes
/// nothing. Results are normalized to percents.
inline std::vector<double> raw_importance(const NetworkWeights& w) {
  const int ni = w.n_inputs;
  const int sz = w.size;
  std::vector<double> r(static_cast<std::size_t>(ni), 0.0);
  for (int j = 0; j < sz; ++j) {
    double column_sum = 0.0;
    for (int i = 0; i < ni; ++i) column_sum += std::abs(w.ih(i, j));
    if (column_sum == 0.0) continue;
    const double v = std::abs(w.hidden_to_output[static_cast<std::size_t>(j)]);
    for (int i = 0; i < ni; ++i) {
      r[static_cast<std::size_t>(i)] += std::abs(w.ih(i, j)) / column_sum * v;
    }
  }
  double total = 0.0;
  for (double x : r) total += x;
  if (total == 0.0) {
    throw Error("importance undefined: all input-to-hidden weights are zero");
  }
  for (double& x : r) x = 100.0 * x / total;
  return r;
}

/// Min-max scaling to [0, 100]. Equal shares scale to 100 with the
/// degenerate flag set.
inline std::vector<double> scale_importance(std::span<const double> shares,
                                            bool* degenerate = nullptr) {
  const auto [lo_it, hi_it] = std::minmax_element(shares.begin(), shares.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> scaled(shares.size());
  if (hi == lo) {
    std::fill(scaled.begin(), scaled.end(), 100.0);
    if (degenerate) *degenerate = true;
    return scaled;
  }
  if (degenerate) *degenerate = false;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    scaled[i] = 100.0 * (shares[i] - lo) / (hi - lo);
  }
  return scaled;
}

inline ImportanceReport importance_report(const TrainedModel& m) {
  ImportanceReport rep;
  rep.raw_share = raw_importance(m.weights);
  rep.scaled = scale_importance(rep.raw_share, &rep.degenerate_scaling);
  return rep;
}

}  // namespace dld
