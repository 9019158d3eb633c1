// Command-line front end for the DLD screening pipeline:
// simulate | tune | train | evaluate | importance | predict.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error. Every command is
// deterministic given its flags and seed, writes files atomically, and echoes
// the fully resolved configuration next to its outputs.

#include <bit>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dld/io.hpp"

namespace fs = std::filesystem;
using dld::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::string text;
  try {
    text = dld::read_file(path);
  } catch (const dld::Error& e) {
    throw UsageError(e.what());
  }
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw UsageError(path + ": config must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw UsageError(path + ": invalid config JSON: " + e.what());
  }
}

/// Config-file value for `key` fills `value` unless the flag was given
/// explicitly on the command line.
template <typename T>
void merge_opt(const json& cfg, const char* key, const CLI::Option* opt,
               T& value) {
  if (opt != nullptr && opt->count() > 0) return;
  if (!cfg.contains(key)) return;
  try {
    value = cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> sizes;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token = dld::csv_detail::trim(token);
    if (token.empty()) continue;
    const auto dots = token.find("..");
    try {
      if (dots != std::string::npos) {
        const int lo = std::stoi(token.substr(0, dots));
        const int hi = std::stoi(token.substr(dots + 2));
        if (lo < 1 || hi < lo) throw UsageError("bad size range '" + token + "'");
        for (int s = lo; s <= hi; ++s) sizes.push_back(s);
      } else {
        const int s = std::stoi(token);
        if (s < 1) throw UsageError("sizes must be >= 1");
        sizes.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw UsageError("cannot parse size '" + token + "'");
    }
  }
  if (sizes.empty()) throw UsageError("no sizes given");
  return sizes;
}

std::vector<double> parse_decays(const std::string& text) {
  std::vector<double> decays;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token = dld::csv_detail::trim(token);
    if (token.empty()) continue;
    try {
      const double d = std::stod(token);
      if (d < 0.0) throw UsageError("decays must be >= 0");
      decays.push_back(d);
    } catch (const std::logic_error&) {
      throw UsageError("cannot parse decay '" + token + "'");
    }
  }
  if (decays.empty()) throw UsageError("no decays given");
  return decays;
}

fs::path prepare_out_dir(const std::string& out) {
  if (out.empty()) throw UsageError("missing output directory");
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  dld::write_file_atomic(path, content);
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::string csv_of_cohort(const dld::Dataset& ds) {
  std::ostringstream os;
  dld::write_cohort_csv(ds, os);
  return os.str();
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  bool paper_like = false;
  std::string spec_file;
  std::string out_file;
  std::string config;
  std::uint64_t seed = 0;
  int n_per_class = 0;  // 0: keep the spec's value
  CLI::Option* seed_opt = nullptr;
  CLI::Option* n_opt = nullptr;
  CLI::Option* paper_opt = nullptr;
  CLI::Option* spec_opt = nullptr;
};

void run_simulate(SimulateOpts& o) {
  const json cfg = load_config_file(o.config);
  merge_opt(cfg, "seed", o.seed_opt, o.seed);
  merge_opt(cfg, "n_per_class", o.n_opt, o.n_per_class);
  merge_opt(cfg, "paper_like", o.paper_opt, o.paper_like);
  merge_opt(cfg, "spec", o.spec_opt, o.spec_file);

  dld::SynthSpec spec;
  if (!o.spec_file.empty()) {
    try {
      spec = dld::synth_spec_from_json(json::parse(dld::read_file(o.spec_file)));
    } catch (const json::exception& e) {
      throw dld::Error(o.spec_file + ": invalid JSON: " + e.what());
    }
  } else {
    spec = dld::default_paper_like_spec();
  }
  if (o.seed_opt->count() > 0 || cfg.contains("seed") || o.spec_file.empty()) {
    spec.seed = o.seed;
  }
  if (o.n_per_class > 0) spec.n_per_class = o.n_per_class;

  bool clamped = false;
  const dld::Dataset ds = dld::generate(spec, &clamped);
  write_text(o.out_file, csv_of_cohort(ds));

  json echo;
  echo["command"] = "simulate";
  echo["out"] = o.out_file;
  echo["spec"] = dld::synth_spec_to_json(spec);
  echo["clamped"] = clamped;
  write_json(o.out_file + ".spec.json", echo);
  std::cerr << "wrote " << ds.size() << " samples to " << o.out_file << "\n";
}

// ---------------------------------------------------------------------------
// tune

struct TuneOpts {
  std::string cohort;
  std::string out;
  std::string config;
  std::string sizes = "1..10";
  std::string decays = "0,0.0001,0.001,0.01,0.1";
  int k = 10;
  double train_fraction = 0.8;
  bool unstratified = false;
  std::uint64_t seed = 0;
  CLI::Option* sizes_opt = nullptr;
  CLI::Option* decays_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* fraction_opt = nullptr;
  CLI::Option* unstratified_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* cohort_opt = nullptr;
};

json split_config(const dld::SplitSpec& split) {
  return {{"train_fraction", split.train_fraction},
          {"seed", split.seed},
          {"stratified", split.stratified}};
}

void run_tune(TuneOpts& o) {
  const json cfg = load_config_file(o.config);
  merge_opt(cfg, "cohort", o.cohort_opt, o.cohort);
  merge_opt(cfg, "sizes", o.sizes_opt, o.sizes);
  merge_opt(cfg, "decays", o.decays_opt, o.decays);
  merge_opt(cfg, "k", o.k_opt, o.k);
  merge_opt(cfg, "train_fraction", o.fraction_opt, o.train_fraction);
  merge_opt(cfg, "unstratified", o.unstratified_opt, o.unstratified);
  merge_opt(cfg, "seed", o.seed_opt, o.seed);
  if (o.cohort.empty()) throw UsageError("missing --cohort");

  const fs::path dir = prepare_out_dir(o.out);
  const dld::Dataset cohort = dld::load_cohort(o.cohort);

  dld::SplitSpec split;
  split.train_fraction = o.train_fraction;
  split.seed = o.seed;
  split.stratified = !o.unstratified;
  const auto [train_ds, test_ds] = dld::split_train_test(cohort, split);

  dld::GridSpec grid;
  grid.sizes = parse_sizes(o.sizes);
  grid.decays = parse_decays(o.decays);
  grid.k = o.k;
  grid.seed = o.seed;
  const dld::GridSearchResult result = dld::grid_search(train_ds, grid);
  const dld::FoldAssignment folds = dld::make_folds(train_ds, grid.k, grid.seed);

  std::ostringstream grid_csv;
  dld::write_grid_csv(result, grid_csv);
  write_text(dir / "grid.csv", grid_csv.str());

  const dld::CellResult* best_cell = nullptr;
  for (const auto& c : result.cells) {
    if (c.size == result.best_size && c.decay == result.best_decay) best_cell = &c;
  }
  json best;
  best["size"] = result.best_size;
  best["decay"] = result.best_decay;
  if (best_cell != nullptr) {
    best["mean_accuracy"] = best_cell->mean_accuracy;
    best["sd_accuracy"] = best_cell->sd_accuracy;
    best["mean_kappa"] = best_cell->mean_kappa;
    best["sd_kappa"] = best_cell->sd_kappa;
  }
  write_json(dir / "best.json", best);

  std::ostringstream folds_csv;
  dld::write_folds_csv(train_ds, folds, folds_csv);
  write_text(dir / "folds.csv", folds_csv.str());
  write_text(dir / "train.csv", csv_of_cohort(train_ds));
  write_text(dir / "test.csv", csv_of_cohort(test_ds));

  json echo;
  echo["command"] = "tune";
  echo["cohort"] = o.cohort;
  echo["out"] = o.out;
  echo["seed"] = o.seed;
  echo["split"] = split_config(split);
  echo["grid"] = {{"sizes", grid.sizes}, {"decays", grid.decays}, {"k", grid.k}};
  write_json(dir / "config.json", echo);
  std::cerr << "best size " << result.best_size << ", decay "
            << dld::format_double(result.best_decay) << "\n";
}

// ---------------------------------------------------------------------------
// train

struct TrainOpts {
  std::string cohort;
  std::string out;
  std::string config;
  int size = 8;
  double decay = 0.001;
  int maxit = 100;
  int max_weights = 500;
  double train_fraction = 0.8;
  bool unstratified = false;
  std::uint64_t seed = 0;
  CLI::Option* size_opt = nullptr;
  CLI::Option* decay_opt = nullptr;
  CLI::Option* maxit_opt = nullptr;
  CLI::Option* cap_opt = nullptr;
  CLI::Option* fraction_opt = nullptr;
  CLI::Option* unstratified_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* cohort_opt = nullptr;
};

void run_train(TrainOpts& o) {
  const json cfg = load_config_file(o.config);
  merge_opt(cfg, "cohort", o.cohort_opt, o.cohort);
  merge_opt(cfg, "size", o.size_opt, o.size);
  merge_opt(cfg, "decay", o.decay_opt, o.decay);
  merge_opt(cfg, "maxit", o.maxit_opt, o.maxit);
  merge_opt(cfg, "max_weights", o.cap_opt, o.max_weights);
  merge_opt(cfg, "train_fraction", o.fraction_opt, o.train_fraction);
  merge_opt(cfg, "unstratified", o.unstratified_opt, o.unstratified);
  merge_opt(cfg, "seed", o.seed_opt, o.seed);
  if (o.cohort.empty()) throw UsageError("missing --cohort");

  const fs::path dir = prepare_out_dir(o.out);
  const dld::Dataset cohort = dld::load_cohort(o.cohort);

  dld::SplitSpec split;
  split.train_fraction = o.train_fraction;
  split.seed = o.seed;
  split.stratified = !o.unstratified;
  const auto [train_ds, test_ds] = dld::split_train_test(cohort, split);

  dld::Hyperparams hp;
  hp.size = o.size;
  hp.decay = o.decay;
  hp.maxit = o.maxit;
  hp.max_weights = o.max_weights;
  const dld::TrainedModel model = dld::train(train_ds, hp, o.seed);

  dld::save_model(model, (dir / "model.json").string());
  write_text(dir / "train.csv", csv_of_cohort(train_ds));
  write_text(dir / "test.csv", csv_of_cohort(test_ds));

  json echo;
  echo["command"] = "train";
  echo["cohort"] = o.cohort;
  echo["out"] = o.out;
  echo["seed"] = o.seed;
  echo["split"] = split_config(split);
  echo["hyperparams"] = {{"size", hp.size},
                         {"decay", hp.decay},
                         {"maxit", hp.maxit},
                         {"max_weights", hp.max_weights}};
  write_json(dir / "config.json", echo);
  std::cerr << "trained model with " << model.weights.total() << " weights ("
            << model.loss_trace.size() - 1 << " iterations)\n";
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOpts {
  std::string model;
  std::string cohort;
  std::string folds;
  std::string out;
  std::string config;
  std::uint64_t seed = 0;
  CLI::Option* model_opt = nullptr;
  CLI::Option* cohort_opt = nullptr;
  CLI::Option* folds_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

std::string svg_polyline(const std::vector<double>& xs,
                         const std::vector<double>& ys, double x0, double y0,
                         double w, double h) {
  std::ostringstream pts;
  char buf[64];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double px = x0 + xs[i] * w;
    const double py = y0 + (1.0 - ys[i]) * h;
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px, py);
    pts << buf;
  }
  return pts.str();
}

std::string render_roc_bands_svg(const dld::MeanRocBand& train_band,
                                 const dld::MeanRocBand& test_band) {
  const double x0 = 70, y0 = 20, w = 440, h = 440;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"580\" height=\"540\" "
         "viewBox=\"0 0 580 540\">\n"
      << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << w
      << "\" height=\"" << h << "\" fill=\"white\" stroke=\"black\"/>\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << y0 + h << "\" x2=\"" << x0 + w
      << "\" y2=\"" << y0
      << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";

  const auto band_svg = [&](const dld::MeanRocBand& band, const char* color) {
    std::vector<double> upper(band.fpr.size()), lower(band.fpr.size());
    for (std::size_t i = 0; i < band.fpr.size(); ++i) {
      upper[i] = std::min(1.0, band.mean_tpr[i] + band.sd_tpr[i]);
      lower[i] = std::max(0.0, band.mean_tpr[i] - band.sd_tpr[i]);
    }
    std::vector<double> poly_x = band.fpr, poly_y = upper;
    for (std::size_t i = band.fpr.size(); i-- > 0;) {
      poly_x.push_back(band.fpr[i]);
      poly_y.push_back(lower[i]);
    }
    std::ostringstream part;
    part << "<polygon points=\"" << svg_polyline(poly_x, poly_y, x0, y0, w, h)
         << "\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n"
         << "<polyline points=\""
         << svg_polyline(band.fpr, band.mean_tpr, x0, y0, w, h)
         << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    return part.str();
  };
  svg << band_svg(train_band, "#1f77b4");
  svg << band_svg(test_band, "#d62728");

  char label[128];
  std::snprintf(label, sizeof(label),
                "<text x=\"%.0f\" y=\"%.0f\" fill=\"#1f77b4\">training mean ROC "
                "(AUC=%.3f)</text>\n",
                x0 + 20, y0 + h - 40, train_band.mean_auc);
  svg << label;
  std::snprintf(label, sizeof(label),
                "<text x=\"%.0f\" y=\"%.0f\" fill=\"#d62728\">testing mean ROC "
                "(AUC=%.3f)</text>\n",
                x0 + 20, y0 + h - 20, test_band.mean_auc);
  svg << label;
  svg << "<text x=\"" << x0 + w / 2 - 80 << "\" y=\"" << y0 + h + 35
      << "\">false positive rate</text>\n"
      << "<text x=\"15\" y=\"" << y0 + h / 2
      << "\" transform=\"rotate(-90 15," << y0 + h / 2
      << ")\">true positive rate</text>\n"
      << "</svg>\n";
  return svg.str();
}

void run_evaluate(EvaluateOpts& o) {
  const json cfg = load_config_file(o.config);
  merge_opt(cfg, "model", o.model_opt, o.model);
  merge_opt(cfg, "cohort", o.cohort_opt, o.cohort);
  merge_opt(cfg, "folds", o.folds_opt, o.folds);
  merge_opt(cfg, "seed", o.seed_opt, o.seed);
  if (o.model.empty()) throw UsageError("missing --model");
  if (o.cohort.empty()) throw UsageError("missing --cohort");

  const fs::path dir = prepare_out_dir(o.out);
  const dld::TrainedModel model = dld::load_model(o.model);
  const dld::Dataset cohort = dld::load_cohort(o.cohort);

  std::vector<double> scores;
  std::vector<dld::Group> labels;
  for (const auto& s : cohort.samples) {
    scores.push_back(dld::predict(model, s).probability);
    labels.push_back(*s.group);
  }
  const dld::MetricsReport report = dld::evaluate_metrics(labels, scores);
  write_json(dir / "metrics.json", dld::metrics_to_json(report));

  const dld::RocCurve curve = dld::roc_curve(scores, labels);
  std::ostringstream roc_csv;
  dld::write_roc_csv(curve, roc_csv);
  write_text(dir / "roc.csv", roc_csv.str());

  if (!o.folds.empty()) {
    std::ifstream folds_in(o.folds);
    if (!folds_in) throw dld::Error(o.folds + ": cannot open file");
    const dld::FoldAssignment folds = dld::read_folds_csv(folds_in, cohort);

    std::vector<dld::RocCurve> train_curves, test_curves;
    for (int f = 0; f < folds.k; ++f) {
      dld::Dataset subtrain, holdout;
      for (std::size_t i = 0; i < cohort.samples.size(); ++i) {
        (folds.fold_of[i] == f ? holdout : subtrain)
            .samples.push_back(cohort.samples[i]);
      }
      const std::uint64_t fold_seed = dld::seed_combine(
          o.seed, static_cast<std::uint64_t>(model.hyperparams.size),
          std::bit_cast<std::uint64_t>(model.hyperparams.decay),
          static_cast<std::uint64_t>(f));
      const dld::TrainedModel fold_model =
          dld::train(subtrain, model.hyperparams, fold_seed);

      const auto curve_of = [&fold_model](const dld::Dataset& ds) {
        std::vector<double> sc;
        std::vector<dld::Group> lb;
        for (const auto& s : ds.samples) {
          sc.push_back(dld::predict(fold_model, s).probability);
          lb.push_back(*s.group);
        }
        return dld::roc_curve(sc, lb);
      };
      train_curves.push_back(curve_of(subtrain));
      test_curves.push_back(curve_of(holdout));
    }
    const dld::MeanRocBand train_band = dld::mean_roc(train_curves);
    const dld::MeanRocBand test_band = dld::mean_roc(test_curves);
    std::ostringstream train_csv, test_csv;
    dld::write_band_csv(train_band, train_csv);
    dld::write_band_csv(test_band, test_csv);
    write_text(dir / "band_train.csv", train_csv.str());
    write_text(dir / "band_test.csv", test_csv.str());
    write_text(dir / "roc_bands.svg",
               render_roc_bands_svg(train_band, test_band));
  }

  json echo;
  echo["command"] = "evaluate";
  echo["model"] = o.model;
  echo["cohort"] = o.cohort;
  echo["folds"] = o.folds;
  echo["out"] = o.out;
  echo["seed"] = o.seed;
  write_json(dir / "config.json", echo);
  std::cerr << "accuracy " << dld::format_double(report.accuracy) << ", auc "
            << dld::format_double(report.auc) << "\n";
}

// ---------------------------------------------------------------------------
// importance

struct ImportanceOpts {
  std::string model;
  std::string out;
  std::string config;
  CLI::Option* model_opt = nullptr;
};

void run_importance(ImportanceOpts& o) {
  const json cfg = load_config_file(o.config);
  merge_opt(cfg, "model", o.model_opt, o.model);
  if (o.model.empty()) throw UsageError("missing --model");

  const fs::path dir = prepare_out_dir(o.out);
  const dld::TrainedModel model = dld::load_model(o.model);
  const dld::ImportanceReport report = dld::importance_report(model);

  std::ostringstream csv;
  dld::write_importance_csv(report, csv);
  write_text(dir / "importance.csv", csv.str());
  write_json(dir / "importance.json", dld::importance_to_json(report));

  json echo;
  echo["command"] = "importance";
  echo["model"] = o.model;
  echo["out"] = o.out;
  write_json(dir / "config.json", echo);
}

// ---------------------------------------------------------------------------
// predict

struct PredictOpts {
  std::string model;
  std::string input;
  std::string out;
  std::string config;
  CLI::Option* model_opt = nullptr;
  CLI::Option* input_opt = nullptr;
};

void run_predict(PredictOpts& o) {
  const json cfg = load_config_file(o.config);
  merge_opt(cfg, "model", o.model_opt, o.model);
  merge_opt(cfg, "input", o.input_opt, o.input);
  if (o.model.empty()) throw UsageError("missing --model");
  if (o.input.empty()) throw UsageError("missing --input");

  const fs::path dir = prepare_out_dir(o.out);
  const dld::TrainedModel model = dld::load_model(o.model);
  const dld::Dataset inputs = dld::load_prediction_input(o.input);

  std::vector<std::string> ids;
  std::vector<double> probabilities;
  std::vector<dld::Group> labels;
  for (const auto& s : inputs.samples) {
    const dld::Prediction p = dld::predict(model, s);
    ids.push_back(s.id);
    probabilities.push_back(p.probability);
    labels.push_back(p.label);
  }
  std::ostringstream csv;
  dld::write_predictions_csv(ids, probabilities, labels, csv);
  write_text(dir / "predictions.csv", csv.str());

  json echo;
  echo["command"] = "predict";
  echo["model"] = o.model;
  echo["input"] = o.input;
  echo["out"] = o.out;
  write_json(dir / "config.json", echo);
  std::cerr << "predicted " << ids.size() << " samples\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dldscreen: neural-network screening pipeline for DLD/TD cohorts"};
  app.require_subcommand(1);

  SimulateOpts sim;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Generate a synthetic cohort CSV from a Gaussian spec");
  sim.paper_opt = sim_cmd->add_flag("--paper-like", sim.paper_like,
                                    "Use the built-in default cohort spec");
  sim.spec_opt =
      sim_cmd->add_option("--spec", sim.spec_file, "Synth spec JSON file");
  sim.seed_opt = sim_cmd->add_option("--seed", sim.seed, "RNG seed");
  sim.n_opt = sim_cmd->add_option("--n-per-class", sim.n_per_class,
                                  "Samples per class override");
  sim_cmd->add_option("-o,--out", sim.out_file, "Output cohort CSV path")
      ->required();
  sim_cmd->add_option("--config", sim.config, "JSON config file");

  TuneOpts tune;
  CLI::App* tune_cmd = app.add_subcommand(
      "tune", "Cross-validated grid search over (size, decay)");
  tune.cohort_opt =
      tune_cmd->add_option("--cohort", tune.cohort, "Labeled cohort CSV");
  tune.sizes_opt = tune_cmd->add_option(
      "--sizes", tune.sizes, "Hidden sizes, e.g. '1..10' or '2,4,8'");
  tune.decays_opt =
      tune_cmd->add_option("--decays", tune.decays, "Comma-separated decays");
  tune.k_opt = tune_cmd->add_option("--k", tune.k, "Cross-validation folds");
  tune.fraction_opt = tune_cmd->add_option("--train-fraction",
                                           tune.train_fraction, "Train share");
  tune.unstratified_opt = tune_cmd->add_flag(
      "--unstratified", tune.unstratified, "Disable stratified splitting");
  tune.seed_opt = tune_cmd->add_option("--seed", tune.seed, "RNG seed");
  tune_cmd->add_option("--out", tune.out, "Output directory")->required();
  tune_cmd->add_option("--config", tune.config, "JSON config file");

  TrainOpts train_opts;
  CLI::App* train_cmd = app.add_subcommand(
      "train", "Train a model on the training split with fixed hyperparameters");
  train_opts.cohort_opt =
      train_cmd->add_option("--cohort", train_opts.cohort, "Labeled cohort CSV");
  train_opts.size_opt =
      train_cmd->add_option("--size", train_opts.size, "Hidden units");
  train_opts.decay_opt =
      train_cmd->add_option("--decay", train_opts.decay, "Weight decay");
  train_opts.maxit_opt =
      train_cmd->add_option("--maxit", train_opts.maxit, "Iteration cap");
  train_opts.cap_opt = train_cmd->add_option(
      "--max-weights", train_opts.max_weights, "Total weight cap");
  train_opts.fraction_opt = train_cmd->add_option(
      "--train-fraction", train_opts.train_fraction, "Train share");
  train_opts.unstratified_opt = train_cmd->add_flag(
      "--unstratified", train_opts.unstratified, "Disable stratified splitting");
  train_opts.seed_opt =
      train_cmd->add_option("--seed", train_opts.seed, "RNG seed");
  train_cmd->add_option("--out", train_opts.out, "Output directory")->required();
  train_cmd->add_option("--config", train_opts.config, "JSON config file");

  EvaluateOpts eval;
  CLI::App* eval_cmd = app.add_subcommand(
      "evaluate", "Compute metrics and ROC data for a model on a labeled CSV");
  eval.model_opt = eval_cmd->add_option("--model", eval.model, "Model JSON");
  eval.cohort_opt = eval_cmd->add_option("--cohort", eval.cohort,
                                         "Labeled CSV to evaluate on");
  eval.folds_opt = eval_cmd->add_option(
      "--folds", eval.folds,
      "Fold CSV (id,fold); adds per-fold mean ROC bands and an SVG plot");
  eval.seed_opt = eval_cmd->add_option(
      "--seed", eval.seed, "Seed used when re-deriving fold models");
  eval_cmd->add_option("--out", eval.out, "Output directory")->required();
  eval_cmd->add_option("--config", eval.config, "JSON config file");

  ImportanceOpts imp;
  CLI::App* imp_cmd = app.add_subcommand(
      "importance", "Connection-weights variable importance of a model");
  imp.model_opt = imp_cmd->add_option("--model", imp.model, "Model JSON");
  imp_cmd->add_option("--out", imp.out, "Output directory")->required();
  imp_cmd->add_option("--config", imp.config, "JSON config file");

  PredictOpts pred;
  CLI::App* pred_cmd = app.add_subcommand(
      "predict", "Probabilities and labels for an unlabeled CSV");
  pred.model_opt = pred_cmd->add_option("--model", pred.model, "Model JSON");
  pred.input_opt = pred_cmd->add_option("--input", pred.input, "Input CSV");
  pred_cmd->add_option("--out", pred.out, "Output directory")->required();
  pred_cmd->add_option("--config", pred.config, "JSON config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(sim_cmd)) run_simulate(sim);
    else if (app.got_subcommand(tune_cmd)) run_tune(tune);
    else if (app.got_subcommand(train_cmd)) run_train(train_opts);
    else if (app.got_subcommand(eval_cmd)) run_evaluate(eval);
    else if (app.got_subcommand(imp_cmd)) run_importance(imp);
    else if (app.got_subcommand(pred_cmd)) run_predict(pred);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
