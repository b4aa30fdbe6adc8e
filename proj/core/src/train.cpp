#include "fixgraph/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "fixgraph/errors.hpp"
#include "fixgraph/parallel.hpp"
#include "fixgraph/random.hpp"

namespace fixgraph {

namespace {

constexpr std::uint64_t kValidationSalt = 0x5bd1e9955bd1e995ULL;
constexpr std::uint64_t kEpochSalt = 0x9e3779b97f4a7c15ULL;

// Splits indices into (train, validation) by project.
void HoldOutProjects(const std::vector<PreparedCommit>& commits, double fraction,
                     std::uint64_t seed, std::vector<std::size_t>& train,
                     std::vector<std::size_t>& validation) {
  train.clear();
  validation.clear();
  std::set<std::string> sorted;
  for (const auto& c : commits) sorted.insert(c.project);
  if (fraction <= 0.0 || sorted.size() < 2) {
    for (std::size_t i = 0; i < commits.size(); ++i) train.push_back(i);
    return;
  }
  std::vector<std::string> projects(sorted.begin(), sorted.end());
  Rng rng(seed ^ kValidationSalt);
  shuffle(projects, rng);
  const long p = static_cast<long>(projects.size());
  const long take =
      std::clamp(static_cast<long>(std::ceil(fraction * static_cast<double>(p) - 1e-9)), 1L, p - 1);
  const std::set<std::string> held(projects.begin(), projects.begin() + take);
  for (std::size_t i = 0; i < commits.size(); ++i) {
    (held.count(commits[i].project) ? validation : train).push_back(i);
  }
}

bool BothClasses(const std::vector<PreparedCommit>& commits, const std::vector<std::size_t>& idx) {
  bool pos = false, neg = false;
  for (std::size_t i : idx) (commits[i].label == 1 ? pos : neg) = true;
  return pos && neg;
}

double MeanLoss(const GatModel& model, const std::vector<Graph>& graphs,
                const std::vector<PreparedCommit>& commits, const std::vector<std::size_t>& idx,
                double positive_weight, int jobs) {
  GraphBatch batch;
  batch.positive_weight = positive_weight;
  for (std::size_t i : idx) {
    batch.graphs.push_back(&graphs[i]);
    batch.labels.push_back(commits[i].label);
  }
  return loss_and_gradients(model, batch, jobs).loss;
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs <= 0) throw BadConfig("epochs must be positive");
  if (batch_size <= 0) throw BadConfig("batch_size must be positive");
  if (!(learning_rate >= 0.0)) throw BadConfig("learning_rate must be non-negative");
  if (!(weight_decay >= 0.0)) throw BadConfig("weight_decay must be non-negative");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw BadConfig("momentum must lie in [0, 1)");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw BadConfig("validation_fraction must lie in [0, 1)");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw BadConfig("threshold must lie in [0, 1]");
  if (jobs <= 0) throw BadConfig("jobs must be positive");
}

TrainResult train_model(const std::vector<PreparedCommit>& commits, const EmbeddingTable& table,
                        const GatConfig& model_config, const TrainConfig& config) {
  config.validate();
  if (table.dim() + 3 != model_config.input_dim) {
    throw ShapeMismatch("embedding width " + std::to_string(table.dim()) +
                        " + 3 != model input " + std::to_string(model_config.input_dim));
  }
  std::vector<std::size_t> all(commits.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  if (!BothClasses(commits, all)) throw SingleClassDataset();

  std::vector<std::size_t> train_idx, val_idx;
  HoldOutProjects(commits, config.validation_fraction, config.seed, train_idx, val_idx);
  if (!BothClasses(commits, train_idx)) {
    train_idx = all;
    val_idx.clear();
  }

  std::size_t pos = 0;
  for (std::size_t i : train_idx) pos += commits[i].label == 1 ? 1 : 0;
  const double positive_weight =
      static_cast<double>(train_idx.size() - pos) / static_cast<double>(pos);

  const std::vector<Graph> graphs = featurize(commits, table, config.jobs);

  TrainResult result;
  result.train_samples = train_idx.size();
  result.validation_samples = val_idx.size();
  GatModel model = init_model(model_config, config.seed);
  OptimizerConfig opt_config;
  opt_config.kind = config.optimizer;
  opt_config.learning_rate = config.learning_rate;
  opt_config.weight_decay = config.weight_decay;
  opt_config.momentum = config.momentum;
  Optimizer optimizer(opt_config, static_cast<Eigen::Index>(model.parameter_count()));
  Eigen::VectorXd params = model.flatten();

  double best_val = std::numeric_limits<double>::infinity();
  result.model = model;

  std::vector<std::size_t> order = train_idx;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng rng(config.seed + kEpochSalt * static_cast<std::uint64_t>(epoch));
    order = train_idx;
    shuffle(order, rng);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      GraphBatch batch;
      batch.positive_weight = positive_weight;
      for (std::size_t k = start; k < end; ++k) {
        batch.graphs.push_back(&graphs[order[k]]);
        batch.labels.push_back(commits[order[k]].label);
      }
      const LossAndGradients lg = loss_and_gradients(model, batch, config.jobs);
      loss_sum += lg.loss * static_cast<double>(end - start);
      optimizer.step(params, lg.gradients.flatten());
      model.assign(params);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss_sum / static_cast<double>(order.size());
    std::vector<ScoredCommit> scored;
    scored.reserve(train_idx.size());
    std::vector<double> probs(train_idx.size());
    parallel_for(train_idx.size(), config.jobs,
                 [&](std::size_t k) { probs[k] = predict(model, graphs[train_idx[k]]); });
    for (std::size_t k = 0; k < train_idx.size(); ++k) {
      scored.push_back(ScoredCommit{commits[train_idx[k]].id, probs[k], commits[train_idx[k]].label, 0});
    }
    rec.f1 = prf1(confusion(scored, config.threshold)).f1;
    if (!val_idx.empty()) {
      rec.val_loss = MeanLoss(model, graphs, commits, val_idx, positive_weight, config.jobs);
    }
    result.history.push_back(rec);

    const bool better = val_idx.empty() ? true : *rec.val_loss < best_val;
    if (better) {
      if (rec.val_loss) best_val = *rec.val_loss;
      result.model = model;
      result.best_epoch = epoch;
      result.info.metrics = {{"loss", rec.loss}, {"f1", rec.f1}};
      if (rec.val_loss) result.info.metrics["val_loss"] = *rec.val_loss;
    }
  }
  result.info.seed = config.seed;
  result.info.epoch = result.best_epoch;
  return result;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream os;
  os << "epoch,loss,f1,val_loss\n";
  for (const auto& r : history) {
    os << r.epoch << ',' << FormatDouble(r.loss) << ',' << FormatDouble(r.f1) << ',';
    if (r.val_loss) os << FormatDouble(*r.val_loss);
    os << '\n';
  }
  return os.str();
}

std::vector<double> score_graphs(const GatModel& model, const std::vector<Graph>& graphs, int jobs) {
  std::vector<double> out(graphs.size());
  parallel_for(graphs.size(), jobs, [&](std::size_t i) { out[i] = predict(model, graphs[i]); });
  return out;
}

std::vector<ScoredCommit> score_commits(const GatModel& model, const EmbeddingTable& table,
                                        const std::vector<PreparedCommit>& commits, int jobs) {
  if (table.dim() + 3 != model.config.input_dim) {
    throw VersionMismatch("embedding width " + std::to_string(table.dim()) +
                          " does not fit model input " + std::to_string(model.config.input_dim));
  }
  const std::vector<double> probs = score_graphs(model, featurize(commits, table, jobs), jobs);
  std::vector<ScoredCommit> out;
  out.reserve(commits.size());
  for (std::size_t i = 0; i < commits.size(); ++i) {
    out.push_back(ScoredCommit{commits[i].id, probs[i], commits[i].label, commits[i].changed_loc});
  }
  return out;
}

TrainedSystem train_system(const std::vector<PreparedCommit>& commits, const SystemConfig& config) {
  TrainedSystem sys;
  const TokenCorpus corpus = build_corpus(graphs_of(commits), config.embedding.min_count);
  sys.embeddings = train_skipgram(corpus, config.embedding);
  GatConfig model = config.model;
  model.input_dim = config.embedding.dim + 3;
  sys.result = train_model(commits, sys.embeddings, model, config.train);
  return sys;
}

}  // namespace fixgraph
