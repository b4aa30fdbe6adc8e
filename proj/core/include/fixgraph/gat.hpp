#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fixgraph/alpha_ast.hpp"
#include "fixgraph/embedding.hpp"

namespace fixgraph {

struct GatConfig {
  int layers = 2;
  int input_dim = 64 + 3;
  int hidden_dim = 64;
  int mlp_hidden = 64;
  double negative_slope = 0.2;

  friend bool operator==(const GatConfig&, const GatConfig&) = default;
};

struct GatLayerParams {
  Eigen::MatrixXd weight;     // hidden_dim x input_dim
  Eigen::VectorXd attention;  // 2 * hidden_dim: [source half; neighbor half]
};

struct MlpHead {
  Eigen::MatrixXd hidden_weight;  // mlp_hidden x last layer dim
  Eigen::VectorXd hidden_bias;
  Eigen::VectorXd output_weight;  // mlp_hidden
  double output_bias = 0.0;
};

/// Also used as the gradient container: gradients mirror parameter shapes.
struct GatModel {
  GatConfig config;
  std::vector<GatLayerParams> layers;
  MlpHead head;

  std::size_t parameter_count() const;
  /// Declaration order: per layer W (row-major) then a; then the MLP hidden
  /// weight (row-major), hidden bias, output weight, output bias.
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);
};

/// Glorot-uniform weights, zero biases. Throws BadConfig on non-positive dims.
GatModel init_model(const GatConfig& config, std::uint64_t seed);
GatModel zeros_like(const GatModel& model);

/// Compressed neighbor lists. Every list holds the node itself.
class Neighborhoods {
 public:
  Neighborhoods() = default;
  /// Symmetrized edges plus a self-loop per node; duplicates removed, each
  /// list sorted ascending.
  static Neighborhoods from_edges(std::size_t node_count,
                                  const std::vector<std::pair<NodeId, NodeId>>& edges);
  static Neighborhoods from_graph(const AlphaAst& graph);

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t entry_count() const { return indices_.size(); }
  std::span<const NodeId> of(std::size_t node) const {
    return {indices_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
  }
  std::size_t offset(std::size_t node) const { return offsets_[node]; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> indices_;
};

struct Graph {
  NodeMatrix features;  // nodes x input_dim
  Neighborhoods neighbors;
};

Graph make_graph(const AlphaAst& graph, const EmbeddingTable& table);

/// Softmax-normalized attention coefficients, one row per node laid out like
/// the neighborhood lists: weights[neighbors.offset(i) + k] belongs to
/// neighbor neighbors.of(i)[k].
struct AttentionWeights {
  std::vector<double> weights;
  double at(const Neighborhoods& nb, std::size_t i, NodeId j) const;
};

AttentionWeights attention_weights(const GatLayerParams& layer, const NodeMatrix& h,
                                   const Neighborhoods& neighbors, double negative_slope = 0.2);

enum class Activation { Relu, Identity };

NodeMatrix gat_layer_forward(const GatLayerParams& layer, const NodeMatrix& h,
                             const Neighborhoods& neighbors, Activation activation,
                             double negative_slope = 0.2);

/// Node embeddings after all layers (ReLU between layers, identity on the last).
NodeMatrix encode_nodes(const GatModel& model, const Graph& graph);

/// Mean over nodes. Throws EmptyGraph.
Eigen::VectorXd readout(const NodeMatrix& h_final);

double predict_logit(const GatModel& model, const Graph& graph);
/// Fixing-commit probability in [0, 1].
double predict(const GatModel& model, const Graph& graph);

struct GraphBatch {
  std::vector<const Graph*> graphs;
  std::vector<int> labels;  // 1 = fixing
  /// Loss weight of positive samples (|negatives| / |positives| of the training split).
  double positive_weight = 1.0;
};

struct LossAndGradients {
  double loss = 0.0;
  GatModel gradients;
};

/// Weighted binary cross-entropy averaged over the batch, with exact analytic
/// gradients for every parameter. Per-graph gradients are summed in batch
/// order, so the result does not depend on `jobs`. Throws EmptyBatch.
LossAndGradients loss_and_gradients(const GatModel& model, const GraphBatch& batch, int jobs = 1);

}  // namespace fixgraph
