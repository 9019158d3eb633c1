#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <string>

#include "dld/dataset.hpp"

namespace dld {

struct FeatureDist {
  double mean = 0.0;
  double sd = 1.0;
};

/// Synthetic-cohort recipe: independent per-feature Gaussians per class.
struct SynthSpec {
  int n_per_class = 15;
  std::array<FeatureDist, kNumFeatures> dld{};
  std::array<FeatureDist, kNumFeatures> td{};
  std::uint64_t seed = 0;
};

inline void validate_spec(const SynthSpec& spec) {
  if (spec.n_per_class < 1) throw Error("n_per_class must be at least 1");
  for (const auto* dists : {&spec.dld, &spec.td}) {
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      if (!((*dists)[f].sd > 0.0)) {
        throw Error("sd for " + std::string(kFeatureNames[f]) +
                    " must be > 0");
      }
    }
    if (!((*dists)[1].mean > 0.0)) {
      throw Error("rt_perception mean must be > 0");
    }
  }
}

/// Draws the cohort: DLD samples first, then TD, ids DLD-001... / TD-001...
/// Score features clamp at 0 (clamped flag reports if that happened);
/// non-positive rt_perception draws are resampled so the value stays
/// strictly positive.
inline Dataset generate(const SynthSpec& spec, bool* clamped = nullptr) {
  validate_spec(spec);
  if (clamped) *clamped = false;
  Dataset ds;
  Rng rng(spec.seed);

  const auto draw = [&](const std::array<FeatureDist, kNumFeatures>& dists,
                        Group g, int index) {
    Sample s;
    char id[32];
    std::snprintf(id, sizeof(id), "%s-%03d", to_string(g).data(), index + 1);
    s.id = id;
    s.group = g;
    FeatureVector f{};
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      double v = dists[i].mean + dists[i].sd * rng.gaussian();
      if (i == 1) {
        while (!(v > 0.0)) v = dists[i].mean + dists[i].sd * rng.gaussian();
      } else if (v < 0.0) {
        v = 0.0;
        if (clamped) *clamped = true;
      }
      f[i] = v;
    }
    s.perception = f[0];
    s.rt_perception = f[1];
    s.vocabulary = f[2];
    s.morphosyntax = f[3];
    s.repetition = f[4];
    return s;
  };

  for (int i = 0; i < spec.n_per_class; ++i) {
    ds.samples.push_back(draw(spec.dld, Group::DLD, i));
  }
  for (int i = 0; i < spec.n_per_class; ++i) {
    ds.samples.push_back(draw(spec.td, Group::TD, i));
  }
  return ds;
}

/// Desk-scale cohort with production features dominating: standardized mean
/// differences 2.0 (morphosyntax), 1.5 (vocabulary), 1.2 (repetition), a
/// weak 0.5 on perception, and none on reaction time.
inline SynthSpec default_paper_like_spec() {
  SynthSpec spec;
  spec.n_per_class = 15;
  // order: perception, rt_perception, vocabulary, morphosyntax, repetition
  spec.td = {{{55.0, 6.0}, {2.5, 0.5}, {22.0, 4.0}, {24.0, 3.0}, {38.0, 5.0}}};
  spec.dld = {{{52.0, 6.0}, {2.5, 0.5}, {16.0, 4.0}, {18.0, 3.0}, {32.0, 5.0}}};
  return spec;
}

}  // namespace dld
