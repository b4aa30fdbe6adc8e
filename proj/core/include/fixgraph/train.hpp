#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fixgraph/checkpoint.hpp"
#include "fixgraph/embedding.hpp"
#include "fixgraph/gat.hpp"
#include "fixgraph/metrics.hpp"
#include "fixgraph/optimizer.hpp"
#include "fixgraph/pipeline.hpp"

namespace fixgraph {

struct TrainConfig {
  int epochs = 50;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double weight_decay = 1e-5;
  std::uint64_t seed = 1;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double momentum = 0.9;
  /// Share of training projects held out for checkpoint selection; 0 disables.
  double validation_fraction = 0.1;
  double threshold = 0.5;
  int jobs = 1;

  /// Throws BadConfig.
  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;  // mean weighted loss over the epoch's batches
  double f1 = 0.0;    // on the training part, after the epoch
  std::optional<double> val_loss;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainResult {
  /// The lowest-validation-loss model (the final one without validation).
  GatModel model;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  CheckpointInfo info;
  std::size_t train_samples = 0;
  std::size_t validation_samples = 0;
};

/// Throws SingleClassDataset when the commits do not hold both labels, or
/// ShapeMismatch when the table width does not match the model input.
TrainResult train_model(const std::vector<PreparedCommit>& commits, const EmbeddingTable& table,
                        const GatConfig& model_config, const TrainConfig& config);

/// Header epoch,loss,f1,val_loss; val_loss is empty when there was no slice.
std::string history_csv(const std::vector<EpochRecord>& history);

std::vector<double> score_graphs(const GatModel& model, const std::vector<Graph>& graphs,
                                 int jobs = 1);
std::vector<ScoredCommit> score_commits(const GatModel& model, const EmbeddingTable& table,
                                        const std::vector<PreparedCommit>& commits, int jobs = 1);

/// Embeddings plus classifier, everything a prediction needs.
struct SystemConfig {
  SkipGramConfig embedding;
  GatConfig model;  // input_dim is derived from the embedding width
  TrainConfig train;
};

struct TrainedSystem {
  EmbeddingTable embeddings;
  TrainResult result;
};

/// Trains skip-gram embeddings on the commits' graphs, then the classifier.
TrainedSystem train_system(const std::vector<PreparedCommit>& commits, const SystemConfig& config);

}  // namespace fixgraph
