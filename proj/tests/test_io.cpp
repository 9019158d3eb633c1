#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "dld/io.hpp"
#include "helpers.hpp"

using Catch::Approx;
using namespace dld;

TEST_CASE("model JSON round-trip is value-exact") {
  const Dataset ds = testutil::paper_like_cohort(33);
  Hyperparams hp;
  hp.size = 8;
  hp.decay = 0.001;
  const TrainedModel m = train(ds, hp, 424242);

  testutil::ScratchDir dir("io_model");
  const auto path = dir.file("model.json").string();
  save_model(m, path);
  const TrainedModel back = load_model(path);

  REQUIRE(back.weights.n_inputs == m.weights.n_inputs);
  REQUIRE(back.weights.size == m.weights.size);
  REQUIRE(back.weights.flat() == m.weights.flat());
  REQUIRE(back.standardizer.mean == m.standardizer.mean);
  REQUIRE(back.standardizer.sd == m.standardizer.sd);
  REQUIRE(back.standardizer.constant == m.standardizer.constant);
  REQUIRE(back.hyperparams.size == m.hyperparams.size);
  REQUIRE(back.hyperparams.decay == m.hyperparams.decay);
  REQUIRE(back.hyperparams.maxit == m.hyperparams.maxit);
  REQUIRE(back.hyperparams.max_weights == m.hyperparams.max_weights);
  REQUIRE(back.seed == m.seed);
  REQUIRE(back.loss_trace.empty());  // the trace is not persisted

  // loaded model predicts bit-identically
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const Sample s = testutil::make_sample(
        "p", std::nullopt, rng.uniform(0, 70), rng.uniform(0.5, 5.0),
        rng.uniform(0, 30), rng.uniform(0, 30), rng.uniform(0, 45));
    REQUIRE(predict(m, s).probability == predict(back, s).probability);
  }
}

TEST_CASE("model document carries the versioned schema") {
  const TrainedModel m = train(testutil::separable_toy(), Hyperparams{2, 0.001}, 1);
  const json j = model_to_json(m);
  REQUIRE(j.at("format_version") == 1);
  REQUIRE(j.at("feature_order").size() == kNumFeatures);
  REQUIRE(j.at("feature_order")[0] == "perception");
  REQUIRE(j.at("feature_order")[4] == "repetition");
  REQUIRE(j.at("standardizer").contains("means"));
  REQUIRE(j.at("standardizer").contains("sds"));
  REQUIRE(j.at("standardizer").contains("constant_flags"));
  REQUIRE(j.at("weights").at("input_to_hidden").size() == kNumFeatures + 1);
  REQUIRE(j.at("weights").at("hidden_to_output").size() == 3);  // size + bias
  REQUIRE(j.contains("seed"));
}

TEST_CASE("model loader rejects malformed documents") {
  const TrainedModel m = train(testutil::separable_toy(), Hyperparams{2, 0.001}, 1);

  SECTION("wrong version") {
    json j = model_to_json(m);
    j["format_version"] = 2;
    REQUIRE_THROWS_WITH(model_from_json(j),
                        Catch::Matchers::ContainsSubstring("format_version"));
  }
  SECTION("wrong feature order") {
    json j = model_to_json(m);
    std::swap(j["feature_order"][0], j["feature_order"][1]);
    REQUIRE_THROWS_WITH(model_from_json(j),
                        Catch::Matchers::ContainsSubstring("feature_order"));
  }
  SECTION("wrong matrix shape") {
    json j = model_to_json(m);
    j["weights"]["input_to_hidden"].erase(0);
    REQUIRE_THROWS(model_from_json(j));
  }
  SECTION("missing key") {
    json j = model_to_json(m);
    j.erase("standardizer");
    REQUIRE_THROWS_WITH(model_from_json(j),
                        Catch::Matchers::ContainsSubstring("malformed"));
  }
  SECTION("invalid JSON text") {
    testutil::ScratchDir dir("io_badjson");
    const auto p = dir.write("m.json", "{not json");
    REQUIRE_THROWS_WITH(load_model(p.string()),
                        Catch::Matchers::ContainsSubstring("invalid JSON"));
  }
}

TEST_CASE("metrics JSON carries all six metrics plus confusion and flags") {
  const std::vector<Group> labels{Group::DLD, Group::DLD, Group::TD, Group::TD};
  const std::vector<double> scores{0.9, 0.6, 0.4, 0.2};
  const MetricsReport r = evaluate_metrics(labels, scores);
  const json j = metrics_to_json(r);
  for (const char* key : {"accuracy", "precision", "recall", "f1", "kappa", "auc"}) {
    REQUIRE(j.contains(key));
  }
  REQUIRE(j.at("confusion").at("tp") == 2);
  REQUIRE(j.at("confusion").at("tn") == 2);
  REQUIRE(j.at("degenerate_flags").is_array());
  REQUIRE(j.at("accuracy") == 1.0);
}

TEST_CASE("roc and band CSV layouts") {
  const std::vector<Group> labels{Group::DLD, Group::TD};
  const RocCurve c = roc_curve(std::vector<double>{0.9, 0.1}, labels);
  std::ostringstream roc_out;
  write_roc_csv(c, roc_out);
  const std::string roc_text = roc_out.str();
  REQUIRE(roc_text.starts_with("fpr,tpr,threshold\n"));
  REQUIRE(roc_text.find("inf") != std::string::npos);
  REQUIRE(testutil::count_lines(roc_text) == 1 + c.fpr.size());

  const MeanRocBand band = mean_roc({c});
  std::ostringstream band_out;
  write_band_csv(band, band_out);
  const std::string band_text = band_out.str();
  REQUIRE(band_text.starts_with("fpr,mean_tpr,sd_tpr\n"));
  REQUIRE(testutil::count_lines(band_text) == 1 + 101);
}

TEST_CASE("grid CSV mirrors the table layout and parses back") {
  GridSearchResult r;
  CellResult c;
  c.size = 8;
  c.decay = 0.001;
  c.mean_accuracy = 0.914;
  c.sd_accuracy = 0.053;
  c.mean_kappa = 0.829;
  c.sd_kappa = 0.107;
  r.cells.push_back(c);
  std::ostringstream out;
  write_grid_csv(r, out);
  REQUIRE(out.str().starts_with("size,decay,accuracy,accuracy_sd,kappa,kappa_sd\n"));
  REQUIRE(out.str().find("8,0.001,0.914,0.053,0.829,0.107") != std::string::npos);

  std::istringstream in(out.str());
  const auto cells = read_grid_csv(in);
  REQUIRE(cells.size() == 1);
  REQUIRE(cells[0].size == 8);
  REQUIRE(cells[0].mean_accuracy == 0.914);
}

TEST_CASE("folds CSV round-trips against the cohort") {
  const Dataset ds = testutil::paper_like_cohort(3, 12);
  const FoldAssignment fa = make_folds(ds, 6, 11);
  std::ostringstream out;
  write_folds_csv(ds, fa, out);
  std::istringstream in(out.str());
  const FoldAssignment back = read_folds_csv(in, ds);
  REQUIRE(back.k == fa.k);
  REQUIRE(back.fold_of == fa.fold_of);

  SECTION("id mismatch is rejected") {
    Dataset other = ds;
    other.samples[0].id = "nobody";
    std::istringstream in2(out.str());
    REQUIRE_THROWS_WITH(read_folds_csv(in2, other),
                        Catch::Matchers::ContainsSubstring("nobody"));
  }
}

TEST_CASE("importance exports are ordered by scaled value") {
  ImportanceReport rep;
  rep.raw_share = {10.0, 5.0, 20.0, 40.0, 25.0};
  rep.scaled = {14.285714285714286, 0.0, 42.857142857142854, 100.0,
                57.142857142857146};
  std::ostringstream out;
  write_importance_csv(rep, out);
  const std::string text = out.str();
  REQUIRE(text.starts_with("feature,raw_share,scaled\n"));
  const auto pos_morph = text.find("morphosyntax");
  const auto pos_rep = text.find("repetition");
  const auto pos_rt = text.find("rt_perception");
  REQUIRE(pos_morph < pos_rep);
  REQUIRE(pos_rep < pos_rt);

  const json j = importance_to_json(rep);
  REQUIRE(j.at("features").size() == kNumFeatures);
  REQUIRE(j.at("features")[3].at("feature") == "morphosyntax");
  REQUIRE(j.at("features")[3].at("scaled") == 100.0);
}

TEST_CASE("prediction CSV uses six-decimal probabilities") {
  std::ostringstream out;
  write_predictions_csv({"a", "b"}, {0.5, 0.1234567}, {Group::DLD, Group::TD},
                        out);
  REQUIRE(out.str() ==
          "id,probability,label\n"
          "a,0.500000,DLD\n"
          "b,0.123457,TD\n");
}

TEST_CASE("synth spec JSON round-trips") {
  SynthSpec spec = default_paper_like_spec();
  spec.seed = 99;
  spec.n_per_class = 21;
  const json j = synth_spec_to_json(spec);
  const SynthSpec back = synth_spec_from_json(j);
  REQUIRE(back.n_per_class == 21);
  REQUIRE(back.seed == 99);
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    REQUIRE(back.dld[f].mean == spec.dld[f].mean);
    REQUIRE(back.dld[f].sd == spec.dld[f].sd);
    REQUIRE(back.td[f].mean == spec.td[f].mean);
    REQUIRE(back.td[f].sd == spec.td[f].sd);
  }
  REQUIRE_THROWS_WITH(synth_spec_from_json(json{{"n_per_class", 3}}),
                      Catch::Matchers::ContainsSubstring("malformed"));
}

TEST_CASE("atomic writes land complete files") {
  testutil::ScratchDir dir("io_atomic");
  const auto p = dir.file("out.txt");
  write_file_atomic(p, "payload\n");
  REQUIRE(testutil::read_text(p) == "payload\n");
  REQUIRE_FALSE(std::filesystem::exists(p.string() + ".tmp"));
  write_file_atomic(p, "new payload\n");
  REQUIRE(testutil::read_text(p) == "new payload\n");
}
