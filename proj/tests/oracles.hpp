#pragma once

// Independent oracles used by the unit and acceptance suites. These
// deliberately avoid the library's computation paths: gradients come from
// finite differences of the loss, metrics from direct recounting with
// single-division rational arithmetic, and AUC from the rank statistic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dld/metrics.hpp"
#include "dld/network.hpp"

namespace oracle {

/// Central finite differences of dld::loss over the flattened parameters.
inline std::vector<double> fd_gradient(const dld::NetworkWeights& w,
                                       const std::vector<std::vector<double>>& Z,
                                       const std::vector<int>& y, double decay,
                                       double step = 1e-5) {
  std::vector<double> theta = w.flat();
  std::vector<double> g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + step;
    const double up = dld::loss(
        dld::NetworkWeights::from_flat(w.n_inputs, w.size, theta), Z, y, decay);
    theta[i] = saved - step;
    const double down = dld::loss(
        dld::NetworkWeights::from_flat(w.n_inputs, w.size, theta), Z, y, decay);
    theta[i] = saved;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

/// max_i |a_i - b_i| / max(|a_i|, |b_i|, 1e-6)
inline double max_rel_error(std::span<const double> a,
                            std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-6});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

struct BruteMetrics {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double kappa = 0.0;
};

/// Recounts the confusion cells and evaluates each formula as exact integer
/// arithmetic followed by one floating-point division.
inline BruteMetrics brute_metrics(std::span<const dld::Group> labels,
                                  std::span<const dld::Group> preds) {
  BruteMetrics m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool a = labels[i] == dld::Group::DLD;
    const bool p = preds[i] == dld::Group::DLD;
    if (a && p) ++m.tp;
    if (!a && p) ++m.fp;
    if (a && !p) ++m.fn;
    if (!a && !p) ++m.tn;
  }
  const std::int64_t n = m.tp + m.fp + m.fn + m.tn;
  m.accuracy = double(m.tp + m.tn) / double(n);
  m.precision = m.tp + m.fp == 0 ? 0.0 : double(m.tp) / double(m.tp + m.fp);
  m.recall = m.tp + m.fn == 0 ? 0.0 : double(m.tp) / double(m.tp + m.fn);
  m.f1 = m.tp == 0 ? 0.0 : double(2 * m.tp) / double(2 * m.tp + m.fp + m.fn);
  const std::int64_t e =
      (m.tp + m.fn) * (m.tp + m.fp) + (m.fp + m.tn) * (m.fn + m.tn);
  if (e == n * n) {
    m.kappa = m.tp + m.tn == n ? 1.0 : 0.0;
  } else {
    m.kappa = double(n * (m.tp + m.tn) - e) / double(n * n - e);
  }
  return m;
}

/// Mann-Whitney statistic P(score_pos > score_neg) + P(tie)/2 over all
/// positive/negative pairs.
inline double mann_whitney_auc(std::span<const double> scores,
                               std::span<const dld::Group> labels) {
  double wins = 0.0;
  std::int64_t pairs = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != dld::Group::DLD) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != dld::Group::TD) continue;
      ++pairs;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / double(pairs);
}

}  // namespace oracle
