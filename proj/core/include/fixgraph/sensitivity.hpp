#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fixgraph/dataset.hpp"
#include "fixgraph/metrics.hpp"
#include "fixgraph/train.hpp"

namespace fixgraph {

/// k cumulative training sets D1 ⊂ ... ⊂ Dk = train. Samples are shuffled with
/// the seed and cut into k near-equal contiguous folds; Di holds folds 1..i in
/// the original sample order. Throws BadConfig for k < 2.
std::vector<Dataset> sensitivity_folds(const Dataset& train, int k, std::uint64_t seed);

/// Partitions by changed LOC into [0,e1), [e1,e2), ..., [e_last, inf).
/// Samples without a stored changed_loc are diffed to obtain it. Throws
/// BadConfig unless edges are strictly increasing.
std::vector<Dataset> change_size_bins(const Dataset& ds, const std::vector<std::size_t>& edges);
std::vector<std::vector<ScoredCommit>> change_size_bins(const std::vector<ScoredCommit>& scored,
                                                        const std::vector<std::size_t>& edges);

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either side is constant. Throws ShapeMismatch on unequal lengths.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct FoldResult {
  std::size_t train_size = 0;
  MetricsReport metrics;
};

struct BinResult {
  std::size_t lower = 0;
  std::optional<std::size_t> upper;  // exclusive; absent for the last bin
  MetricsReport metrics;
};

struct SensitivityReport {
  std::vector<FoldResult> folds;
  /// Spearman correlation between fold index and test F1.
  double f1_trend = 0.0;
  /// Test metrics of the full-training model per change-size bin.
  std::vector<BinResult> bins;
};

struct SensitivityConfig {
  SystemConfig system;
  int folds = 5;
  std::vector<std::size_t> bin_edges{10, 30, 100};
  std::vector<double> effort_percents{5.0};
  int jobs = 1;
};

/// Trains one system per cumulative fold of `train` and evaluates each on
/// `test`. Test commits are prepared once.
SensitivityReport run_sensitivity(const Dataset& train, const Dataset& test,
                                  const SensitivityConfig& config);

std::string sensitivity_to_json(const SensitivityReport& report, int indent = 2);

}  // namespace fixgraph
