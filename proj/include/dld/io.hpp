#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dld/dataset.hpp"
#include "dld/importance.hpp"
#include "dld/metrics.hpp"
#include "dld/network.hpp"
#include "dld/synth.hpp"
#include "dld/tuner.hpp"

namespace dld {

using nlohmann::json;

inline constexpr int kModelFormatVersion = 1;

// ---------------------------------------------------------------------------
// Model persistence. The document is versioned and value-exact: doubles are
// serialized with shortest round-trip precision, so save -> load -> predict
// reproduces in-memory probabilities bit for bit.

inline json model_to_json(const TrainedModel& m) {
  if (m.weights.size != m.hyperparams.size) {
    throw Error("model is inconsistent: weights.size != hyperparams.size");
  }
  if (m.weights.n_inputs != static_cast<int>(kNumFeatures)) {
    throw Error("only models over the canonical feature set can be persisted");
  }
  json j;
  j["format_version"] = kModelFormatVersion;
  j["feature_order"] = json::array();
  for (auto name : kFeatureNames) j["feature_order"].push_back(std::string(name));

  json st;
  st["means"] = m.standardizer.mean;
  st["sds"] = m.standardizer.sd;
  st["constant_flags"] = m.standardizer.constant;
  j["standardizer"] = st;

  json hp;
  hp["size"] = m.hyperparams.size;
  hp["decay"] = m.hyperparams.decay;
  hp["maxit"] = m.hyperparams.maxit;
  hp["max_weights"] = m.hyperparams.max_weights;
  j["hyperparams"] = hp;

  json w;
  w["n_inputs"] = m.weights.n_inputs;
  json rows = json::array();
  for (int i = 0; i <= m.weights.n_inputs; ++i) {  // bias row last
    json row = json::array();
    for (int h = 0; h < m.weights.size; ++h) row.push_back(m.weights.ih(i, h));
    rows.push_back(std::move(row));
  }
  w["input_to_hidden"] = std::move(rows);
  w["hidden_to_output"] = m.weights.hidden_to_output;  // bias last
  j["weights"] = std::move(w);

  j["seed"] = m.seed;
  return j;
}

inline TrainedModel model_from_json(const json& j) {
  try {
    if (!j.contains("format_version") ||
        j.at("format_version").get<int>() != kModelFormatVersion) {
      throw Error("unsupported model format_version");
    }
    const auto order = j.at("feature_order").get<std::vector<std::string>>();
    if (order.size() != kNumFeatures) {
      throw Error("model feature_order has wrong length");
    }
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      if (order[i] != kFeatureNames[i]) {
        throw Error("model feature_order mismatch at '" + order[i] + "'");
      }
    }

    TrainedModel m;
    const auto& st = j.at("standardizer");
    const auto means = st.at("means").get<std::vector<double>>();
    const auto sds = st.at("sds").get<std::vector<double>>();
    const auto flags = st.at("constant_flags").get<std::vector<bool>>();
    if (means.size() != kNumFeatures || sds.size() != kNumFeatures ||
        flags.size() != kNumFeatures) {
      throw Error("standardizer arrays must have " +
                  std::to_string(kNumFeatures) + " entries");
    }
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      m.standardizer.mean[i] = means[i];
      m.standardizer.sd[i] = sds[i];
      m.standardizer.constant[i] = flags[i];
      if (!(m.standardizer.sd[i] > 0.0)) {
        throw Error("standardizer sd must be > 0");
      }
    }

    const auto& hp = j.at("hyperparams");
    m.hyperparams.size = hp.at("size").get<int>();
    m.hyperparams.decay = hp.at("decay").get<double>();
    m.hyperparams.maxit = hp.at("maxit").get<int>();
    m.hyperparams.max_weights = hp.at("max_weights").get<int>();

    const auto& w = j.at("weights");
    m.weights.n_inputs = w.at("n_inputs").get<int>();
    m.weights.size = m.hyperparams.size;
    const auto rows = w.at("input_to_hidden").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != m.weights.n_inputs + 1) {
      throw Error("input_to_hidden must have n_inputs + 1 rows");
    }
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != m.weights.size) {
        throw Error("input_to_hidden rows must have 'size' entries");
      }
      m.weights.input_to_hidden.insert(m.weights.input_to_hidden.end(),
                                       row.begin(), row.end());
    }
    m.weights.hidden_to_output =
        w.at("hidden_to_output").get<std::vector<double>>();
    if (static_cast<int>(m.weights.hidden_to_output.size()) !=
        m.weights.size + 1) {
      throw Error("hidden_to_output must have size + 1 entries");
    }
    for (double v : m.weights.flat()) {
      if (!std::isfinite(v)) throw Error("model contains non-finite weights");
    }

    m.seed = j.at("seed").get<std::uint64_t>();
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// File helpers. Writes go through a sibling temp file plus rename, so a
// half-written file never lands at the final path.

inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(tmp.string() + ": cannot open for writing");
    out << content;
    if (!out.flush()) throw Error(tmp.string() + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(path.string() + ": rename failed: " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void save_model(const TrainedModel& m, const std::string& path) {
  write_file_atomic(path, model_to_json(m).dump(2) + "\n");
}

inline TrainedModel load_model(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(path + ": invalid JSON: " + e.what());
  }
  return model_from_json(j);
}

// ---------------------------------------------------------------------------
// Report exports.

inline json metrics_to_json(const MetricsReport& r) {
  json j;
  j["accuracy"] = r.accuracy;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["kappa"] = r.kappa;
  j["auc"] = r.auc;
  j["confusion"] = {{"tp", r.cm.tp}, {"fp", r.cm.fp}, {"fn", r.cm.fn}, {"tn", r.cm.tn}};
  j["degenerate_flags"] = r.degenerate_flags;
  return j;
}

inline void write_roc_csv(const RocCurve& c, std::ostream& os) {
  os << "fpr,tpr,threshold\n";
  for (std::size_t i = 0; i < c.fpr.size(); ++i) {
    os << format_double(c.fpr[i]) << ',' << format_double(c.tpr[i]) << ','
       << format_double(c.thresholds[i]) << "\n";
  }
}

inline void write_band_csv(const MeanRocBand& b, std::ostream& os) {
  os << "fpr,mean_tpr,sd_tpr\n";
  for (std::size_t i = 0; i < b.fpr.size(); ++i) {
    os << format_double(b.fpr[i]) << ',' << format_double(b.mean_tpr[i]) << ','
       << format_double(b.sd_tpr[i]) << "\n";
  }
}

inline void write_grid_csv(const GridSearchResult& r, std::ostream& os) {
  os << "size,decay,accuracy,accuracy_sd,kappa,kappa_sd\n";
  for (const auto& c : r.cells) {
    os << c.size << ',' << format_double(c.decay) << ','
       << format_double(c.mean_accuracy) << ',' << format_double(c.sd_accuracy)
       << ',' << format_double(c.mean_kappa) << ',' << format_double(c.sd_kappa)
       << "\n";
  }
}

/// Reads a grid CSV back into cells (statistics only; fold lists are not
/// serialized). Enough to re-run selection on exported results.
inline std::vector<CellResult> read_grid_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("grid CSV: empty file");
  if (csv_detail::trim(line) != "size,decay,accuracy,accuracy_sd,kappa,kappa_sd") {
    throw Error("grid CSV: unexpected header");
  }
  std::vector<CellResult> cells;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (csv_detail::trim(line).empty()) continue;
    const auto cells_raw = csv_detail::split_line(line);
    if (cells_raw.size() != 6) {
      throw Error("grid CSV: line " + std::to_string(line_no) +
                  ": expected 6 fields");
    }
    CellResult c;
    c.size = static_cast<int>(csv_detail::parse_number(cells_raw[0], line_no, "size"));
    c.decay = csv_detail::parse_number(cells_raw[1], line_no, "decay");
    c.mean_accuracy = csv_detail::parse_number(cells_raw[2], line_no, "accuracy");
    c.sd_accuracy = csv_detail::parse_number(cells_raw[3], line_no, "accuracy_sd");
    c.mean_kappa = csv_detail::parse_number(cells_raw[4], line_no, "kappa");
    c.sd_kappa = csv_detail::parse_number(cells_raw[5], line_no, "kappa_sd");
    cells.push_back(std::move(c));
  }
  if (cells.empty()) throw Error("grid CSV: no rows");
  return cells;
}

inline void write_folds_csv(const Dataset& training, const FoldAssignment& fa,
                            std::ostream& os) {
  os << "id,fold\n";
  for (std::size_t i = 0; i < training.samples.size(); ++i) {
    os << training.samples[i].id << ',' << fa.fold_of[i] << "\n";
  }
}

/// Rebuilds a fold assignment against `training` by matching ids. The file
/// must cover exactly the training ids with contiguous folds 0..k-1.
inline FoldAssignment read_folds_csv(std::istream& is, const Dataset& training) {
  std::string line;
  if (!std::getline(is, line)) throw Error("folds CSV: empty file");
  if (csv_detail::trim(line) != "id,fold") {
    throw Error("folds CSV: header must be 'id,fold'");
  }
  std::map<std::string, int> by_id;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (csv_detail::trim(line).empty()) continue;
    const auto cells = csv_detail::split_line(line);
    if (cells.size() != 2) {
      throw Error("folds CSV: line " + std::to_string(line_no) +
                  ": expected 2 fields");
    }
    const int fold =
        static_cast<int>(csv_detail::parse_number(cells[1], line_no, "fold"));
    if (!by_id.emplace(cells[0], fold).second) {
      throw Error("folds CSV: duplicate id '" + cells[0] + "'");
    }
  }
  if (by_id.size() != training.samples.size()) {
    throw Error("folds CSV covers " + std::to_string(by_id.size()) +
                " ids but the cohort has " +
                std::to_string(training.samples.size()));
  }
  FoldAssignment fa;
  int max_fold = -1;
  for (const auto& s : training.samples) {
    const auto it = by_id.find(s.id);
    if (it == by_id.end()) {
      throw Error("folds CSV has no entry for id '" + s.id + "'");
    }
    if (it->second < 0) throw Error("folds CSV: negative fold index");
    fa.fold_of.push_back(it->second);
    max_fold = std::max(max_fold, it->second);
  }
  fa.k = max_fold + 1;
  std::vector<int> counts(static_cast<std::size_t>(fa.k), 0);
  for (int f : fa.fold_of) ++counts[static_cast<std::size_t>(f)];
  for (int c : counts) {
    if (c == 0) throw Error("folds CSV: empty fold in assignment");
  }
  return fa;
}

inline json importance_to_json(const ImportanceReport& rep) {
  json features = json::array();
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    features.push_back({{"feature", std::string(kFeatureNames[i])},
                        {"raw_share", rep.raw_share[i]},
                        {"scaled", rep.scaled[i]}});
  }
  json j;
  j["features"] = std::move(features);
  j["degenerate_scaling"] = rep.degenerate_scaling;
  return j;
}

/// Rows ordered by scaled importance, descending; ties keep feature order.
inline void write_importance_csv(const ImportanceReport& rep, std::ostream& os) {
  std::vector<std::size_t> order(kNumFeatures);
  for (std::size_t i = 0; i < kNumFeatures; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&rep](std::size_t a, std::size_t b) {
    return rep.scaled[a] > rep.scaled[b];
  });
  os << "feature,raw_share,scaled\n";
  for (std::size_t i : order) {
    os << kFeatureNames[i] << ',' << format_double(rep.raw_share[i]) << ','
       << format_double(rep.scaled[i]) << "\n";
  }
}

inline void write_predictions_csv(const std::vector<std::string>& ids,
                                  const std::vector<double>& probabilities,
                                  const std::vector<Group>& labels,
                                  std::ostream& os) {
  os << "id,probability,label\n";
  char buf[32];
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.6f", probabilities[i]);
    os << ids[i] << ',' << buf << ',' << to_string(labels[i]) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Synthetic-spec documents.

inline json synth_spec_to_json(const SynthSpec& spec) {
  json features;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    features[std::string(kFeatureNames[i])] = {
        {"dld", {{"mean", spec.dld[i].mean}, {"sd", spec.dld[i].sd}}},
        {"td", {{"mean", spec.td[i].mean}, {"sd", spec.td[i].sd}}}};
  }
  json j;
  j["n_per_class"] = spec.n_per_class;
  j["seed"] = spec.seed;
  j["features"] = std::move(features);
  return j;
}

inline SynthSpec synth_spec_from_json(const json& j) {
  try {
    SynthSpec spec;
    spec.n_per_class = j.at("n_per_class").get<int>();
    spec.seed = j.value("seed", std::uint64_t{0});
    const auto& features = j.at("features");
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      const auto& f = features.at(std::string(kFeatureNames[i]));
      spec.dld[i].mean = f.at("dld").at("mean").get<double>();
      spec.dld[i].sd = f.at("dld").at("sd").get<double>();
      spec.td[i].mean = f.at("td").at("mean").get<double>();
      spec.td[i].sd = f.at("td").at("sd").get<double>();
    }
    validate_spec(spec);
    return spec;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed synth spec: ") + e.what());
  }
}

}  // namespace dld
