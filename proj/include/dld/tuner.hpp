#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dld/dataset.hpp"
#include "dld/metrics.hpp"
#include "dld/network.hpp"

namespace dld {

struct GridSpec {
  std::vector<int> sizes = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> decays = {0.0, 0.0001, 0.001, 0.01, 0.1};
  int k = 10;
  std::uint64_t seed = 0;
};

/// One (size, decay) cell: per-fold held-out scores and their statistics.
struct CellResult {
  int size = 0;
  double decay = 0.0;
  std::vector<double> fold_accuracy;
  std::vector<double> fold_kappa;
  double mean_accuracy = 0.0;
  double sd_accuracy = 0.0;
  double mean_kappa = 0.0;
  double sd_kappa = 0.0;
};

struct GridSearchResult {
  std::vector<CellResult> cells;  // ordered by (size asc, decay asc)
  int best_size = 0;
  double best_decay = 0.0;
};

/// Highest mean accuracy wins; ties break by higher mean kappa, then
/// smaller size, then smaller decay.
inline std::pair<int, double> select_best(std::span<const CellResult> cells) {
  if (cells.empty()) throw Error("cannot select from an empty grid");
  const CellResult* best = &cells[0];
  for (const auto& c : cells) {
    bool better = false;
    if (c.mean_accuracy != best->mean_accuracy) {
      better = c.mean_accuracy > best->mean_accuracy;
    } else if (c.mean_kappa != best->mean_kappa) {
      better = c.mean_kappa > best->mean_kappa;
    } else if (c.size != best->size) {
      better = c.size < best->size;
    } else {
      better = c.decay < best->decay;
    }
    if (better) best = &c;
  }
  return {best->size, best->decay};
}

/// K-fold cross-validated grid search. One stratified fold assignment is
/// built from grid.seed and shared by every cell, so cells are comparable.
/// Per-cell-per-fold training seeds derive from (seed, size, decay, fold),
/// never from grid position. Any cell violating the weight cap fails the
/// whole search up front.
inline GridSearchResult grid_search(const Dataset& training,
                                    const GridSpec& grid) {
  if (grid.sizes.empty()) throw Error("grid has no sizes");
  if (grid.decays.empty()) throw Error("grid has no decays");

  std::vector<int> sizes = grid.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  std::vector<double> decays = grid.decays;
  std::sort(decays.begin(), decays.end());
  decays.erase(std::unique(decays.begin(), decays.end()), decays.end());

  for (int size : sizes) {
    Hyperparams hp;
    hp.size = size;
    hp.decay = decays.front();
    validate_hyperparams(hp, static_cast<int>(kNumFeatures));
  }
  for (double d : decays) {
    if (d < 0.0) throw Error("decay must be >= 0");
  }

  const FoldAssignment folds = make_folds(training, grid.k, grid.seed);

  GridSearchResult result;
  for (int size : sizes) {
    for (double decay : decays) {
      CellResult cell;
      cell.size = size;
      cell.decay = decay;
      for (int f = 0; f < grid.k; ++f) {
        Dataset subtrain, holdout;
        for (std::size_t i = 0; i < training.samples.size(); ++i) {
          (folds.fold_of[i] == f ? holdout : subtrain)
              .samples.push_back(training.samples[i]);
        }
        Hyperparams hp;
        hp.size = size;
        hp.decay = decay;
        const std::uint64_t cell_seed =
            seed_combine(grid.seed, static_cast<std::uint64_t>(size),
                         std::bit_cast<std::uint64_t>(decay),
                         static_cast<std::uint64_t>(f));
        const TrainedModel model = train(subtrain, hp, cell_seed);

        std::vector<Group> labels, preds;
        for (const auto& s : holdout.samples) {
          labels.push_back(*s.group);
          preds.push_back(predict(model, s).label);
        }
        const ConfusionMatrix cm = confusion(labels, preds);
        cell.fold_accuracy.push_back(accuracy(cm));
        cell.fold_kappa.push_back(kappa(cm));
      }
      cell.mean_accuracy = mean(cell.fold_accuracy);
      cell.sd_accuracy = sample_sd(cell.fold_accuracy);
      cell.mean_kappa = mean(cell.fold_kappa);
      cell.sd_kappa = sample_sd(cell.fold_kappa);
      result.cells.push_back(std::move(cell));
    }
  }

  const auto [bs, bd] = select_best(result.cells);
  result.best_size = bs;
  result.best_decay = bd;
  return result;
}

/// Refit on the full training subset with the winning configuration and
/// the standard iteration/weight caps.
inline TrainedModel fit_final(const Dataset& training, int size, double decay,
                              std::uint64_t seed) {
  Hyperparams hp;
  hp.size = size;
  hp.decay = decay;
  return train(training, hp, seed);
}

}  // namespace dld
