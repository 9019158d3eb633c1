#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dld/common.hpp"

namespace dld {

/// Prediction counts with DLD as the positive class.
struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
};

inline ConfusionMatrix confusion(std::span<const Group> labels,
                                 std::span<const Group> preds) {
  if (labels.size() != preds.size()) {
    throw Error("labels and predictions differ in length");
  }
  if (labels.empty()) throw Error("empty label vector");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool actual = labels[i] == Group::DLD;
    const bool predicted = preds[i] == Group::DLD;
    if (actual && predicted) ++cm.tp;
    else if (!actual && predicted) ++cm.fp;
    else if (actual && !predicted) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

// Each metric is a single division of integer counts, so results are
// reproducible exactly from the stored matrix. Degenerate denominators
// yield 0; callers can query the predicates to flag them.

inline double accuracy(const ConfusionMatrix& c) {
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

inline bool precision_degenerate(const ConfusionMatrix& c) {
  return c.tp + c.fp == 0;
}

inline double precision(const ConfusionMatrix& c) {
  if (precision_degenerate(c)) return 0.0;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

inline bool recall_degenerate(const ConfusionMatrix& c) {
  return c.tp + c.fn == 0;
}

inline double recall(const ConfusionMatrix& c) {
  if (recall_degenerate(c)) return 0.0;
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

inline bool f1_degenerate(const ConfusionMatrix& c) {
  return c.tp == 0;  // precision + recall == 0
}

/// Harmonic mean of precision and recall, computed in count form
/// 2tp / (2tp + fp + fn) so one division gives the exact value.
inline double f1(const ConfusionMatrix& c) {
  if (f1_degenerate(c)) return 0.0;
  return static_cast<double>(2 * c.tp) /
         static_cast<double>(2 * c.tp + c.fp + c.fn);
}

inline bool kappa_degenerate(const ConfusionMatrix& c) {
  const std::int64_t n = c.total();
  const std::int64_t e =
      (c.tp + c.fn) * (c.tp + c.fp) + (c.fp + c.tn) * (c.fn + c.tn);
  return e == n * n;  // expected agreement 1: both vectors constant and equal
}

/// Cohen's kappa (p_o - p_e) / (1 - p_e) as a single rational division:
/// (n*(tp+tn) - E) / (n^2 - E) with E the chance-agreement numerator.
/// When p_e = 1 the value is 1 if observed agreement is perfect, else 0.
inline double kappa(const ConfusionMatrix& c) {
  const std::int64_t n = c.total();
  const std::int64_t e =
      (c.tp + c.fn) * (c.tp + c.fp) + (c.fp + c.tn) * (c.fn + c.tn);
  const std::int64_t n2 = n * n;
  if (e == n2) return c.tp + c.tn == n ? 1.0 : 0.0;
  return static_cast<double>(n * (c.tp + c.tn) - e) /
         static_cast<double>(n2 - e);
}

/// ROC polyline. Parallel vectors; point i is the cumulative (fpr, tpr) when
/// predicting positive at score >= thresholds[i]. thresholds[0] is +inf and
/// maps to (0, 0); tied scores form one threshold, so ties appear as a single
/// diagonal segment. The final point is always (1, 1).
struct RocCurve {
  std::vector<double> fpr;
  std::vector<double> tpr;
  std::vector<double> thresholds;
};

inline RocCurve roc_curve(std::span<const double> scores,
                          std::span<const Group> labels) {
  if (scores.size() != labels.size()) {
    throw Error("scores and labels differ in length");
  }
  if (scores.empty()) throw Error("empty score vector");
  for (double s : scores) {
    if (!std::isfinite(s)) throw Error("non-finite score");
  }
  std::int64_t pos = 0;
  for (Group g : labels) pos += g == Group::DLD;
  const std::int64_t neg = static_cast<std::int64_t>(labels.size()) - pos;
  if (pos == 0 || neg == 0) {
    throw Error("ROC requires both groups among the labels");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.fpr.push_back(0.0);
  curve.tpr.push_back(0.0);
  curve.thresholds.push_back(std::numeric_limits<double>::infinity());

  std::int64_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      (labels[order[i]] == Group::DLD ? tp : fp) += 1;
      ++i;
    }
    curve.fpr.push_back(static_cast<double>(fp) / static_cast<double>(neg));
    curve.tpr.push_back(static_cast<double>(tp) / static_cast<double>(pos));
    curve.thresholds.push_back(threshold);
  }
  return curve;
}

/// Trapezoidal area under the curve. With ties grouped into single
/// thresholds this equals the Mann-Whitney statistic
/// P(score_pos > score_neg) + P(tie)/2.
inline double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.fpr.size(); ++i) {
    area += (curve.fpr[i] - curve.fpr[i - 1]) *
            (curve.tpr[i] + curve.tpr[i - 1]) * 0.5;
  }
  return area;
}

/// Vertically averaged ROC band on a fixed fpr grid.
struct MeanRocBand {
  std::vector<double> fpr;       // grid_size equally spaced points in [0, 1]
  std::vector<double> mean_tpr;  // non-decreasing
  std::vector<double> sd_tpr;    // sample sd across curves; 0 when single
  double mean_auc = 0.0;
  bool single_curve = false;     // sd undefined, reported as 0
};

namespace roc_detail {

/// Value of the curve at fpr = x, treating the polyline as a
/// right-continuous function (vertical segments evaluate to their top).
inline double interpolate_tpr(const RocCurve& c, double x) {
  std::size_t j = c.fpr.size() - 1;
  while (c.fpr[j] > x) --j;  // fpr[0] == 0 <= x terminates the walk
  if (c.fpr[j] == x) {
    return c.tpr[j];  // last point at this fpr holds the largest tpr
  }
  const double x0 = c.fpr[j], x1 = c.fpr[j + 1];
  const double y0 = c.tpr[j], y1 = c.tpr[j + 1];
  return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

}  // namespace roc_detail

inline MeanRocBand mean_roc(const std::vector<RocCurve>& curves,
                            int grid_size = 101) {
  if (curves.empty()) throw Error("mean ROC needs at least one curve");
  if (grid_size < 2) throw Error("grid_size must be at least 2");

  MeanRocBand band;
  band.single_curve = curves.size() == 1;
  band.fpr.resize(static_cast<std::size_t>(grid_size));
  band.mean_tpr.resize(static_cast<std::size_t>(grid_size));
  band.sd_tpr.resize(static_cast<std::size_t>(grid_size));

  std::vector<double> tprs(curves.size());
  for (int t = 0; t < grid_size; ++t) {
    const double x = static_cast<double>(t) / static_cast<double>(grid_size - 1);
    band.fpr[static_cast<std::size_t>(t)] = x;
    for (std::size_t c = 0; c < curves.size(); ++c) {
      tprs[c] = roc_detail::interpolate_tpr(curves[c], x);
    }
    band.mean_tpr[static_cast<std::size_t>(t)] = mean(tprs);
    band.sd_tpr[static_cast<std::size_t>(t)] = sample_sd(tprs);
  }

  double auc_sum = 0.0;
  for (const auto& c : curves) auc_sum += auc(c);
  band.mean_auc = auc_sum / static_cast<double>(curves.size());
  return band;
}

/// Scalar metrics plus the matrix and scores context they derive from.
struct MetricsReport {
  ConfusionMatrix cm;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double kappa = 0.0;
  double auc = 0.0;
  std::vector<std::string> degenerate_flags;
};

/// Builds the full report from true labels and positive-class scores.
/// Hard labels are taken at the 0.5 threshold (ties classify as DLD).
inline MetricsReport evaluate_metrics(std::span<const Group> labels,
                                      std::span<const double> scores) {
  if (labels.size() != scores.size()) {
    throw Error("labels and scores differ in length");
  }
  std::vector<Group> preds(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    preds[i] = scores[i] >= 0.5 ? Group::DLD : Group::TD;
  }
  MetricsReport r;
  r.cm = confusion(labels, preds);
  r.accuracy = accuracy(r.cm);
  r.precision = precision(r.cm);
  r.recall = recall(r.cm);
  r.f1 = f1(r.cm);
  r.kappa = kappa(r.cm);
  if (precision_degenerate(r.cm)) r.degenerate_flags.push_back("precision");
  if (recall_degenerate(r.cm)) r.degenerate_flags.push_back("recall");
  if (f1_degenerate(r.cm)) r.degenerate_flags.push_back("f1");
  if (kappa_degenerate(r.cm)) r.degenerate_flags.push_back("kappa");
  r.auc = auc(roc_curve(scores, labels));
  return r;
}

}  // namespace dld
