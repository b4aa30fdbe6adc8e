#include "fixgraph/gat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fixgraph/errors.hpp"
#include "fixgraph/parallel.hpp"
#include "fixgraph/random.hpp"

namespace fixgraph {

namespace {

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x))
double Softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

void GlorotFill(Eigen::MatrixXd& m, int fan_in, int fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = uniform(rng, -bound, bound);
  }
}

void GlorotFill(Eigen::VectorXd& v, int fan_in, int fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = uniform(rng, -bound, bound);
}

void CheckLayerShapes(const GatLayerParams& layer, const NodeMatrix& h,
                      const Neighborhoods& neighbors) {
  if (layer.weight.cols() != h.cols()) {
    throw ShapeMismatch("layer expects " + std::to_string(layer.weight.cols()) +
                        " input features, got " + std::to_string(h.cols()));
  }
  if (layer.attention.size() != 2 * layer.weight.rows()) {
    throw ShapeMismatch("attention vector must have 2 * output dim entries");
  }
  if (neighbors.node_count() != static_cast<std::size_t>(h.rows())) {
    throw ShapeMismatch("neighborhoods cover " + std::to_string(neighbors.node_count()) +
                        " nodes, features " + std::to_string(h.rows()));
  }
}

// Intermediate values of one layer kept for the backward pass.
struct LayerCache {
  NodeMatrix z;                // h W^T
  std::vector<double> pre;     // s_i + t_j per neighborhood entry
  std::vector<double> alpha;   // softmax-normalized coefficients
  NodeMatrix m;                // sum_j alpha_ij z_j
};

void LayerForward(const GatLayerParams& layer, const NodeMatrix& h, const Neighborhoods& nb,
                  double slope, LayerCache& cache) {
  CheckLayerShapes(layer, h, nb);
  const Eigen::Index out_dim = layer.weight.rows();
  cache.z.noalias() = h * layer.weight.transpose();
  const Eigen::VectorXd s = cache.z * layer.attention.head(out_dim);
  const Eigen::VectorXd t = cache.z * layer.attention.tail(out_dim);

  const std::size_t n = nb.node_count();
  cache.pre.resize(nb.entry_count());
  cache.alpha.resize(nb.entry_count());
  cache.m.setZero(static_cast<Eigen::Index>(n), out_dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto js = nb.of(i);
    const std::size_t base = nb.offset(i);
    double max_e = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < js.size(); ++k) {
      const double x = s(static_cast<Eigen::Index>(i)) + t(js[k]);
      cache.pre[base + k] = x;
      const double e = x > 0 ? x : slope * x;
      cache.alpha[base + k] = e;
      max_e = std::max(max_e, e);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < js.size(); ++k) {
      const double w = std::exp(cache.alpha[base + k] - max_e);
      cache.alpha[base + k] = w;
      sum += w;
    }
    auto row = cache.m.row(static_cast<Eigen::Index>(i));
    for (std::size_t k = 0; k < js.size(); ++k) {
      cache.alpha[base + k] /= sum;
      row.noalias() += cache.alpha[base + k] * cache.z.row(js[k]);
    }
  }
}

NodeMatrix Activate(const NodeMatrix& m, Activation act) {
  return act == Activation::Relu ? NodeMatrix(m.cwiseMax(0.0)) : m;
}

Activation LayerActivation(const GatModel& model, std::size_t layer) {
  return layer + 1 == model.layers.size() ? Activation::Identity : Activation::Relu;
}

struct ForwardTrace {
  std::vector<NodeMatrix> inputs;  // input to each layer
  std::vector<LayerCache> caches;
  Eigen::VectorXd pooled;
  Eigen::VectorXd hidden_pre;
  Eigen::VectorXd hidden;
  double logit = 0.0;
};

void Forward(const GatModel& model, const Graph& graph, ForwardTrace& trace) {
  if (graph.features.rows() == 0) throw EmptyGraph();
  if (graph.features.cols() != model.config.input_dim) {
    throw ShapeMismatch("model expects " + std::to_string(model.config.input_dim) +
                        " input features, graph has " + std::to_string(graph.features.cols()));
  }
  const std::size_t layers = model.layers.size();
  trace.inputs.resize(layers);
  trace.caches.resize(layers);
  trace.inputs[0] = graph.features;
  NodeMatrix out;
  for (std::size_t l = 0; l < layers; ++l) {
    LayerForward(model.layers[l], trace.inputs[l], graph.neighbors, model.config.negative_slope,
                 trace.caches[l]);
    out = Activate(trace.caches[l].m, LayerActivation(model, l));
    if (l + 1 < layers) trace.inputs[l + 1] = out;
  }
  trace.pooled = readout(out);
  trace.hidden_pre = model.head.hidden_weight * trace.pooled + model.head.hidden_bias;
  trace.hidden = trace.hidden_pre.cwiseMax(0.0);
  trace.logit = model.head.output_weight.dot(trace.hidden) + model.head.output_bias;
}

// Accumulates d(loss)/d(params) into grad given d(loss)/d(logit).
void Backward(const GatModel& model, const Graph& graph, const ForwardTrace& trace, double d_logit,
              GatModel& grad) {
  const MlpHead& head = model.head;
  grad.head.output_bias += d_logit;
  grad.head.output_weight += d_logit * trace.hidden;
  Eigen::VectorXd d_hidden_pre = d_logit * head.output_weight;
  for (Eigen::Index k = 0; k < d_hidden_pre.size(); ++k) {
    if (trace.hidden_pre(k) <= 0) d_hidden_pre(k) = 0.0;
  }
  grad.head.hidden_weight.noalias() += d_hidden_pre * trace.pooled.transpose();
  grad.head.hidden_bias += d_hidden_pre;
  const Eigen::VectorXd d_pooled = head.hidden_weight.transpose() * d_hidden_pre;

  const auto n = graph.features.rows();
  const double slope = model.config.negative_slope;
  NodeMatrix d_out = (d_pooled / static_cast<double>(n)).transpose().replicate(n, 1);
  const Neighborhoods& nb = graph.neighbors;

  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const GatLayerParams& layer = model.layers[l];
    const LayerCache& c = trace.caches[l];
    const Eigen::Index out_dim = layer.weight.rows();

    NodeMatrix d_m = d_out;
    if (LayerActivation(model, l) == Activation::Relu) {
      d_m = d_out.cwiseProduct((c.m.array() > 0.0).cast<double>().matrix());
    }

    NodeMatrix d_z = NodeMatrix::Zero(n, out_dim);
    Eigen::VectorXd d_s = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd d_t = Eigen::VectorXd::Zero(n);
    std::vector<double> d_alpha;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto js = nb.of(static_cast<std::size_t>(i));
      const std::size_t base = nb.offset(static_cast<std::size_t>(i));
      const auto dm_i = d_m.row(i);
      d_alpha.assign(js.size(), 0.0);
      double weighted = 0.0;
      for (std::size_t k = 0; k < js.size(); ++k) {
        const double a = c.alpha[base + k];
        d_z.row(js[k]).noalias() += a * dm_i;
        d_alpha[k] = dm_i.dot(c.z.row(js[k]));
        weighted += a * d_alpha[k];
      }
      for (std::size_t k = 0; k < js.size(); ++k) {
        const double d_e = c.alpha[base + k] * (d_alpha[k] - weighted);
        const double d_x = d_e * (c.pre[base + k] > 0 ? 1.0 : slope);
        d_s(i) += d_x;
        d_t(js[k]) += d_x;
      }
    }

    GatLayerParams& g = grad.layers[l];
    g.attention.head(out_dim).noalias() += c.z.transpose() * d_s;
    g.attention.tail(out_dim).noalias() += c.z.transpose() * d_t;
    d_z.noalias() += d_s * layer.attention.head(out_dim).transpose();
    d_z.noalias() += d_t * layer.attention.tail(out_dim).transpose();
    g.weight.noalias() += d_z.transpose() * trace.inputs[l];
    if (l > 0) d_out.noalias() = d_z * layer.weight;
  }
}

}  // namespace

std::size_t GatModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.attention.size();
  n += head.hidden_weight.size() + head.hidden_bias.size() + head.output_weight.size() + 1;
  return n;
}

Eigen::VectorXd GatModel::flatten() const {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index pos = 0;
  auto put_matrix = [&](const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) flat(pos++) = m(r, c);
    }
  };
  auto put_vector = [&](const Eigen::VectorXd& v) {
    flat.segment(pos, v.size()) = v;
    pos += v.size();
  };
  for (const auto& l : layers) {
    put_matrix(l.weight);
    put_vector(l.attention);
  }
  put_matrix(head.hidden_weight);
  put_vector(head.hidden_bias);
  put_vector(head.output_weight);
  flat(pos++) = head.output_bias;
  return flat;
}

void GatModel::assign(const Eigen::VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
    throw ShapeMismatch("flat parameter vector has " + std::to_string(flat.size()) +
                        " entries, model " + std::to_string(parameter_count()));
  }
  Eigen::Index pos = 0;
  auto get_matrix = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = flat(pos++);
    }
  };
  auto get_vector = [&](Eigen::VectorXd& v) {
    v = flat.segment(pos, v.size());
    pos += v.size();
  };
  for (auto& l : layers) {
    get_matrix(l.weight);
    get_vector(l.attention);
  }
  get_matrix(head.hidden_weight);
  get_vector(head.hidden_bias);
  get_vector(head.output_weight);
  head.output_bias = flat(pos++);
}

GatModel init_model(const GatConfig& config, std::uint64_t seed) {
  if (config.layers < 1 || config.input_dim < 1 || config.hidden_dim < 1 ||
      config.mlp_hidden < 1) {
    throw BadConfig("layers and all dimensions must be positive");
  }
  if (!(config.negative_slope >= 0.0)) throw BadConfig("negative slope must be non-negative");
  Rng rng(seed);
  GatModel model;
  model.config = config;
  int in = config.input_dim;
  for (int l = 0; l < config.layers; ++l) {
    GatLayerParams layer;
    layer.weight.resize(config.hidden_dim, in);
    GlorotFill(layer.weight, in, config.hidden_dim, rng);
    layer.attention.resize(2 * config.hidden_dim);
    GlorotFill(layer.attention, 2 * config.hidden_dim, 1, rng);
    model.layers.push_back(std::move(layer));
    in = config.hidden_dim;
  }
  model.head.hidden_weight.resize(config.mlp_hidden, in);
  GlorotFill(model.head.hidden_weight, in, config.mlp_hidden, rng);
  model.head.hidden_bias = Eigen::VectorXd::Zero(config.mlp_hidden);
  model.head.output_weight.resize(config.mlp_hidden);
  GlorotFill(model.head.output_weight, config.mlp_hidden, 1, rng);
  model.head.output_bias = 0.0;
  return model;
}

GatModel zeros_like(const GatModel& model) {
  GatModel z = model;
  for (auto& l : z.layers) {
    l.weight.setZero();
    l.attention.setZero();
  }
  z.head.hidden_weight.setZero();
  z.head.hidden_bias.setZero();
  z.head.output_weight.setZero();
  z.head.output_bias = 0.0;
  return z;
}

Neighborhoods Neighborhoods::from_edges(std::size_t node_count,
                                        const std::vector<std::pair<NodeId, NodeId>>& edges) {
  std::vector<std::vector<NodeId>> lists(node_count);
  for (std::size_t i = 0; i < node_count; ++i) lists[i].push_back(static_cast<NodeId>(i));
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= node_count ||
        static_cast<std::size_t>(b) >= node_count) {
      throw ShapeMismatch("edge endpoint outside node range");
    }
    lists[a].push_back(b);
    lists[b].push_back(a);
  }
  Neighborhoods nb;
  nb.offsets_.reserve(node_count + 1);
  nb.offsets_.push_back(0);
  for (auto& l : lists) {
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    nb.indices_.insert(nb.indices_.end(), l.begin(), l.end());
    nb.offsets_.push_back(nb.indices_.size());
  }
  return nb;
}

Neighborhoods Neighborhoods::from_graph(const AlphaAst& graph) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(graph.edges.size());
  for (const AlphaEdge& e : graph.edges) edges.emplace_back(e.src, e.dst);
  return from_edges(graph.nodes.size(), edges);
}

Graph make_graph(const AlphaAst& graph, const EmbeddingTable& table) {
  return Graph{assemble_features(graph, table), Neighborhoods::from_graph(graph)};
}

double AttentionWeights::at(const Neighborhoods& nb, std::size_t i, NodeId j) const {
  const auto js = nb.of(i);
  auto it = std::lower_bound(js.begin(), js.end(), j);
  if (it == js.end() || *it != j) return 0.0;
  return weights[nb.offset(i) + static_cast<std::size_t>(it - js.begin())];
}

AttentionWeights attention_weights(const GatLayerParams& layer, const NodeMatrix& h,
                                   const Neighborhoods& neighbors, double negative_slope) {
  LayerCache cache;
  LayerForward(layer, h, neighbors, negative_slope, cache);
  return AttentionWeights{std::move(cache.alpha)};
}

NodeMatrix gat_layer_forward(const GatLayerParams& layer, const NodeMatrix& h,
                             const Neighborhoods& neighbors, Activation activation,
                             double negative_slope) {
  LayerCache cache;
  LayerForward(layer, h, neighbors, negative_slope, cache);
  return Activate(cache.m, activation);
}

NodeMatrix encode_nodes(const GatModel& model, const Graph& graph) {
  NodeMatrix h = graph.features;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    h = gat_layer_forward(model.layers[l], h, graph.neighbors, LayerActivation(model, l),
                          model.config.negative_slope);
  }
  return h;
}

Eigen::VectorXd readout(const NodeMatrix& h_final) {
  if (h_final.rows() == 0) throw EmptyGraph();
  return h_final.colwise().mean().transpose();
}

double predict_logit(const GatModel& model, const Graph& graph) {
  ForwardTrace trace;
  Forward(model, graph, trace);
  return trace.logit;
}

double predict(const GatModel& model, const Graph& graph) {
  return Sigmoid(predict_logit(model, graph));
}

LossAndGradients loss_and_gradients(const GatModel& model, const GraphBatch& batch, int jobs) {
  if (batch.graphs.empty()) throw EmptyBatch();
  if (batch.labels.size() != batch.graphs.size()) {
    throw ShapeMismatch("batch has " + std::to_string(batch.graphs.size()) + " graphs and " +
                        std::to_string(batch.labels.size()) + " labels");
  }
  const std::size_t b = batch.graphs.size();
  const double inv_b = 1.0 / static_cast<double>(b);
  std::vector<GatModel> per_graph(b);
  std::vector<double> losses(b, 0.0);

  parallel_for(b, jobs, [&](std::size_t i) {
    ForwardTrace trace;
    Forward(model, *batch.graphs[i], trace);
    const int y = batch.labels[i];
    const double w = y == 1 ? batch.positive_weight : 1.0;
    // BCE with logits: y=1 -> softplus(-z), y=0 -> softplus(z).
    losses[i] = w * (y == 1 ? Softplus(-trace.logit) : Softplus(trace.logit)) * inv_b;
    const double d_logit = w * (Sigmoid(trace.logit) - static_cast<double>(y)) * inv_b;
    per_graph[i] = zeros_like(model);
    Backward(model, *batch.graphs[i], trace, d_logit, per_graph[i]);
  });

  LossAndGradients out;
  out.gradients = zeros_like(model);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.parameter_count()));
  for (std::size_t i = 0; i < b; ++i) {
    out.loss += losses[i];
    sum += per_graph[i].flatten();
  }
  out.gradients.assign(sum);
  return out;
}

}  // namespace fixgraph
