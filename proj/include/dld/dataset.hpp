#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dld/common.hpp"
#include "dld/rng.hpp"

namespace dld {

/// One child's feature vector plus, when known, the diagnostic label.
/// The label is absent only for prediction-time inputs.
struct Sample {
  std::string id;
  std::optional<Group> group;
  double perception = 0.0;     // correct responses in the perceptual task
  double rt_perception = 0.0;  // mean reaction time in seconds, strictly positive
  double vocabulary = 0.0;     // raw vocabulary-production score
  double morphosyntax = 0.0;   // raw morphosyntactic-production score
  double repetition = 0.0;     // raw sentence-repetition score

  FeatureVector features() const {
    return {perception, rt_perception, vocabulary, morphosyntax, repetition};
  }
};

struct Dataset {
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }

  std::size_t count(Group g) const {
    std::size_t n = 0;
    for (const auto& s : samples) {
      if (s.group && *s.group == g) ++n;
    }
    return n;
  }
};

/// Per-feature z-scoring parameters fitted on a training partition.
/// A feature with zero empirical variance stores sd = 1 and is flagged,
/// so applying the transform reduces to centering.
struct StandardizationParams {
  FeatureVector mean{};
  FeatureVector sd{};  // always > 0; 1 where constant[i] is true
  std::array<bool, kNumFeatures> constant{};
};

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool stratified = true;
};

/// Fold index per training-sample position, folds numbered [0, k).
struct FoldAssignment {
  std::vector<int> fold_of;
  int k = 10;
};

inline constexpr std::string_view kCohortHeader =
    "id,group,perception,rt_perception,vocabulary,morphosyntax,repetition";
inline constexpr std::string_view kUnlabeledHeader =
    "id,perception,rt_perception,vocabulary,morphosyntax,repetition";

namespace csv_detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    out.push_back(trim(std::string_view(line).substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string> split_header(std::string_view header) {
  return split_line(std::string(header));
}

inline double parse_number(const std::string& cell, std::size_t line_no,
                           std::string_view column) {
  const std::string where =
      "line " + std::to_string(line_no) + ", column '" + std::string(column) + "'";
  if (cell.empty()) throw Error(where + ": missing value");
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw Error(where + ": not a number: '" + cell + "'");
  }
  return value;
}

/// Exact-order header check; names the first offending column.
inline void check_header(const std::vector<std::string>& got,
                         std::string_view expected, const std::string& path) {
  const auto want = split_header(expected);
  if (got == want) return;
  std::set<std::string> got_set(got.begin(), got.end());
  for (const auto& w : want) {
    if (!got_set.count(w)) throw Error(path + ": missing column '" + w + "'");
  }
  std::set<std::string> want_set(want.begin(), want.end());
  for (const auto& g : got) {
    if (!want_set.count(g)) throw Error(path + ": unknown column '" + g + "'");
  }
  throw Error(path + ": header must be exactly '" + std::string(expected) + "'");
}

inline Sample parse_sample(const std::vector<std::string>& cells, bool labeled,
                           std::size_t line_no, const std::string& path) {
  const std::string where = path + ": line " + std::to_string(line_no);
  Sample s;
  std::size_t col = 0;
  s.id = cells[col++];
  if (s.id.empty()) throw Error(where + ", column 'id': must be non-empty");
  if (labeled) {
    const std::string& label = cells[col++];
    const auto g = parse_group(label);
    if (!g) {
      throw Error(where + ", column 'group': unknown label '" + label +
                  "' (expected DLD or TD)");
    }
    s.group = *g;
  }
  s.perception = parse_number(cells[col++], line_no, "perception");
  s.rt_perception = parse_number(cells[col++], line_no, "rt_perception");
  s.vocabulary = parse_number(cells[col++], line_no, "vocabulary");
  s.morphosyntax = parse_number(cells[col++], line_no, "morphosyntax");
  s.repetition = parse_number(cells[col++], line_no, "repetition");

  if (!(s.rt_perception > 0.0)) {
    throw Error(where + ", column 'rt_perception': must be > 0");
  }
  const FeatureVector f = s.features();
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (i == 1) continue;  // rt_perception handled above
    if (f[i] < 0.0) {
      throw Error(where + ", column '" + std::string(kFeatureNames[i]) +
                  "': must be >= 0");
    }
  }
  return s;
}

inline Dataset load_samples(const std::string& path, bool require_group) {
  std::ifstream in(path);
  if (!in) throw Error(path + ": cannot open file");

  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file, no header");
  auto header = split_line(line);

  bool labeled = require_group;
  if (require_group) {
    check_header(header, kCohortHeader, path);
  } else {
    // Prediction inputs may be unlabeled or carry a (ignored) group column.
    const bool has_group =
        std::find(header.begin(), header.end(), "group") != header.end();
    labeled = has_group;
    check_header(header, has_group ? kCohortHeader : kUnlabeledHeader, path);
  }

  Dataset ds;
  std::set<std::string> seen_ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw Error(path + ": line " + std::to_string(line_no) + ": expected " +
                  std::to_string(header.size()) + " fields, got " +
                  std::to_string(cells.size()));
    }
    Sample s = parse_sample(cells, labeled, line_no, path);
    if (!seen_ids.insert(s.id).second) {
      throw Error(path + ": line " + std::to_string(line_no) +
                  ": duplicate id '" + s.id + "'");
    }
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) throw Error(path + ": no samples");
  return ds;
}

}  // namespace csv_detail

/// Loads a labeled cohort CSV. The header must be exactly kCohortHeader;
/// every row must satisfy the Sample invariants. Rejections name the
/// offending line and column.
inline Dataset load_cohort(const std::string& path) {
  return csv_detail::load_samples(path, /*require_group=*/true);
}

/// Loads prediction-time inputs: the unlabeled schema, or the labeled one
/// (group values are parsed but predictions do not use them).
inline Dataset load_prediction_input(const std::string& path) {
  return csv_detail::load_samples(path, /*require_group=*/false);
}

inline void write_cohort_csv(const Dataset& ds, std::ostream& os) {
  os << kCohortHeader << "\n";
  for (const auto& s : ds.samples) {
    if (!s.group) throw Error("sample '" + s.id + "' has no group label");
    os << s.id << ',' << to_string(*s.group);
    for (double v : s.features()) os << ',' << format_double(v);
    os << "\n";
  }
}

namespace split_detail {

inline long long round_half_up(double x) {
  return static_cast<long long>(std::floor(x + 0.5));
}

inline std::vector<std::size_t> group_indices(const Dataset& ds, Group g) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    if (ds.samples[i].group == g) idx.push_back(i);
  }
  return idx;
}

}  // namespace split_detail

/// Splits a labeled cohort into disjoint, exhaustive train/test partitions.
/// Stratified mode draws round(class_n * (1 - train_fraction)) test samples
/// per class (half-up), then shifts the larger class by one if the per-class
/// counts miss the overall target. Deterministic given the seed; both
/// partitions preserve cohort order.
inline std::pair<Dataset, Dataset> split_train_test(const Dataset& ds,
                                                    const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw Error("train_fraction must be in (0,1)");
  }
  const std::size_t n = ds.samples.size();
  if (n == 0) throw Error("empty dataset");
  for (const auto& s : ds.samples) {
    if (!s.group) throw Error("sample '" + s.id + "' has no group label");
  }
  const auto dld_idx = split_detail::group_indices(ds, Group::DLD);
  const auto td_idx = split_detail::group_indices(ds, Group::TD);
  if (dld_idx.empty() || td_idx.empty()) {
    throw Error("both groups must be present for splitting");
  }

  const double test_fraction = 1.0 - spec.train_fraction;
  const long long target_total = split_detail::round_half_up(
      static_cast<double>(n) * test_fraction);

  Rng rng(spec.seed);
  std::vector<std::size_t> test_idx;

  if (spec.stratified) {
    long long t_dld = split_detail::round_half_up(
        static_cast<double>(dld_idx.size()) * test_fraction);
    long long t_td = split_detail::round_half_up(
        static_cast<double>(td_idx.size()) * test_fraction);
    const long long delta = target_total - (t_dld + t_td);
    if (delta != 0) {
      // Larger class absorbs the correction; ties go to DLD.
      if (dld_idx.size() >= td_idx.size()) {
        t_dld += delta;
      } else {
        t_td += delta;
      }
    }
    const auto guard = [](Group g, long long t, std::size_t class_n) {
      if (t < 1) {
        throw Error("group " + std::string(to_string(g)) +
                    " would receive 0 test samples");
      }
      if (t > static_cast<long long>(class_n) - 1) {
        throw Error("group " + std::string(to_string(g)) +
                    " would receive 0 train samples");
      }
    };
    guard(Group::DLD, t_dld, dld_idx.size());
    guard(Group::TD, t_td, td_idx.size());

    auto pick = [&rng, &test_idx](std::vector<std::size_t> idx, long long t) {
      shuffle(idx, rng);
      test_idx.insert(test_idx.end(), idx.begin(), idx.begin() + t);
    };
    pick(dld_idx, t_dld);
    pick(td_idx, t_td);
  } else {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    shuffle(all, rng);
    if (target_total < 1 || target_total > static_cast<long long>(n) - 1) {
      throw Error("split would leave an empty partition");
    }
    test_idx.assign(all.begin(), all.begin() + target_total);
  }

  std::sort(test_idx.begin(), test_idx.end());
  std::vector<bool> in_test(n, false);
  for (auto i : test_idx) in_test[i] = true;

  Dataset train, test;
  for (std::size_t i = 0; i < n; ++i) {
    (in_test[i] ? test : train).samples.push_back(ds.samples[i]);
  }
  for (const Dataset* part : {&train, &test}) {
    const char* name = part == &train ? "train" : "test";
    if (part->count(Group::DLD) == 0 || part->count(Group::TD) == 0) {
      throw Error(std::string("a group received 0 ") + name + " samples");
    }
  }
  return {std::move(train), std::move(test)};
}

/// Stratified k-fold assignment. Each class is shuffled and dealt to
/// consecutive folds; the dealing position carries over between classes so
/// overall fold sizes also differ by at most one.
inline FoldAssignment make_folds(const Dataset& train, int k,
                                 std::uint64_t seed) {
  const std::size_t n = train.samples.size();
  if (k < 2) throw Error("k must be at least 2");
  if (static_cast<std::size_t>(k) > n) {
    throw Error("k (" + std::to_string(k) + ") exceeds training-set size (" +
                std::to_string(n) + ")");
  }
  for (const auto& s : train.samples) {
    if (!s.group) throw Error("sample '" + s.id + "' has no group label");
  }
  const auto dld_idx = split_detail::group_indices(train, Group::DLD);
  const auto td_idx = split_detail::group_indices(train, Group::TD);
  if (dld_idx.empty() || td_idx.empty()) {
    throw Error("both groups must be present for fold assignment");
  }

  FoldAssignment fa;
  fa.k = k;
  fa.fold_of.assign(n, -1);
  Rng rng(seed);
  std::size_t pos = 0;
  for (auto idx : {dld_idx, td_idx}) {
    shuffle(idx, rng);
    for (auto i : idx) {
      fa.fold_of[i] = static_cast<int>(pos % static_cast<std::size_t>(k));
      ++pos;
    }
  }
  return fa;
}

/// Per-feature mean and sample sd (n-1) over the training partition.
/// Constant features (or n = 1) store sd = 1 and set the flag.
inline StandardizationParams fit_standardizer(const Dataset& train) {
  const std::size_t n = train.samples.size();
  if (n == 0) throw Error("cannot fit standardizer on empty dataset");
  StandardizationParams p;
  std::vector<double> column(n);
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = train.samples[i].features()[f];
    }
    p.mean[f] = mean(column);
    const double sd = sample_sd(column);
    if (n < 2 || sd == 0.0) {
      p.sd[f] = 1.0;
      p.constant[f] = true;
    } else {
      p.sd[f] = sd;
      p.constant[f] = false;
    }
  }
  return p;
}

inline FeatureVector apply_standardizer(const StandardizationParams& p,
                                        const FeatureVector& x) {
  FeatureVector z;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    z[i] = (x[i] - p.mean[i]) / p.sd[i];
  }
  return z;
}

}  // namespace dld
