#include "fixgraph/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "fixgraph/errors.hpp"
#include "fixgraph/random.hpp"
#include "fixgraph/tokens.hpp"

namespace fixgraph {

namespace {

constexpr char kMagic[] = "PSEMB1\n";

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow.
double LogSigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

}  // namespace

std::int32_t TokenCorpus::index_of(std::string_view token) const {
  auto it = index.find(std::string(token));
  return it == index.end() ? kUnkIndex : it->second;
}

TokenCorpus build_corpus(const std::vector<AlphaAst>& graphs, std::size_t min_count) {
  if (graphs.empty()) throw EmptyCorpus();
  std::vector<std::vector<std::string>> raw;
  raw.reserve(graphs.size());
  std::map<std::string, std::size_t> freq;
  for (const AlphaAst& g : graphs) {
    std::vector<std::string> sentence;
    for (const AlphaNode& n : g.nodes) {
      for (auto& t : node_tokens(n)) sentence.push_back(std::move(t));
    }
    for (const auto& t : sentence) ++freq[t];
    raw.push_back(std::move(sentence));
  }

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [tok, count] : freq) {
    if (count >= min_count) kept.emplace_back(tok, count);
  }
  if (kept.empty()) throw EmptyCorpus();
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  TokenCorpus corpus;
  for (const auto& [tok, count] : kept) {
    corpus.index.emplace(tok, static_cast<std::int32_t>(corpus.tokens.size()));
    corpus.tokens.push_back(tok);
    corpus.counts.push_back(count);
  }
  corpus.sentences.reserve(raw.size());
  for (const auto& sentence : raw) {
    std::vector<std::int32_t> ids;
    ids.reserve(sentence.size());
    for (const auto& t : sentence) ids.push_back(corpus.index_of(t));
    corpus.sentences.push_back(std::move(ids));
  }
  return corpus;
}

EmbeddingTable::EmbeddingTable(std::vector<std::string> tokens, NodeMatrix vectors,
                               Eigen::VectorXd unk, SkipGramConfig config)
    : tokens_(std::move(tokens)), vectors_(std::move(vectors)), unk_(std::move(unk)), config_(config) {
  if (static_cast<std::size_t>(vectors_.rows()) != tokens_.size()) {
    throw ShapeMismatch("embedding rows " + std::to_string(vectors_.rows()) + " vs " +
                        std::to_string(tokens_.size()) + " tokens");
  }
  if (unk_.size() != vectors_.cols()) throw ShapeMismatch("unknown vector dimension");
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    index_.emplace(tokens_[i], static_cast<std::int32_t>(i));
  }
}

Eigen::VectorXd EmbeddingTable::lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return unk_;
  return vectors_.row(it->second).transpose();
}

Eigen::VectorXd EmbeddingTable::mean_of(const std::vector<std::string>& tokens) const {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim());
  if (tokens.empty()) return unk_;
  for (const auto& t : tokens) {
    auto it = index_.find(t);
    if (it == index_.end()) {
      sum += unk_;
    } else {
      sum += vectors_.row(it->second).transpose();
    }
  }
  return sum / static_cast<double>(tokens.size());
}

void EmbeddingTable::save(std::ostream& os) const {
  nlohmann::ordered_json header;
  header["d"] = dim();
  header["V"] = vocab_size();
  header["config"] = {{"dim", config_.dim},
                      {"window", config_.window},
                      {"negatives", config_.negatives},
                      {"epochs", config_.epochs},
                      {"min_count", config_.min_count},
                      {"learning_rate", config_.learning_rate},
                      {"seed", config_.seed}};
  header["tokens"] = tokens_;
  os.write(kMagic, sizeof(kMagic) - 1);
  os << header.dump() << '\n';
  for (Eigen::Index r = 0; r < vectors_.rows(); ++r) {
    for (Eigen::Index c = 0; c < vectors_.cols(); ++c) detail::write_f64_le(os, vectors_(r, c));
  }
  for (Eigen::Index c = 0; c < unk_.size(); ++c) detail::write_f64_le(os, unk_(c));
}

EmbeddingTable EmbeddingTable::load(std::istream& is) {
  const std::string header_text = detail::read_header(is, kMagic);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw VersionMismatch(std::string("unreadable embedding header: ") + e.what());
  }
  try {
    const int d = header.at("d").get<int>();
    const auto v = header.at("V").get<std::size_t>();
    auto tokens = header.at("tokens").get<std::vector<std::string>>();
    if (tokens.size() != v) throw VersionMismatch("embedding header token count mismatch");
    SkipGramConfig cfg;
    const auto& jc = header.at("config");
    cfg.dim = jc.at("dim").get<int>();
    cfg.window = jc.at("window").get<int>();
    cfg.negatives = jc.at("negatives").get<int>();
    cfg.epochs = jc.at("epochs").get<int>();
    cfg.min_count = jc.at("min_count").get<std::size_t>();
    cfg.learning_rate = jc.at("learning_rate").get<double>();
    cfg.seed = jc.at("seed").get<std::uint64_t>();
    NodeMatrix vectors(static_cast<Eigen::Index>(v), d);
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      for (Eigen::Index c = 0; c < d; ++c) vectors(r, c) = detail::read_f64_le(is);
    }
    Eigen::VectorXd unk(d);
    for (Eigen::Index c = 0; c < d; ++c) unk(c) = detail::read_f64_le(is);
    return EmbeddingTable(std::move(tokens), std::move(vectors), std::move(unk), cfg);
  } catch (const nlohmann::json::exception& e) {
    throw VersionMismatch(std::string("incompatible embedding header: ") + e.what());
  }
}

void EmbeddingTable::save_file(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  save(os);
  if (!os) throw IoError("failed writing " + path);
}

EmbeddingTable EmbeddingTable::load_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  return load(is);
}

SgnsObjective sgns_objective(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                             const std::vector<Eigen::VectorXd>& negatives) {
  SgnsObjective out;
  const double pos = context.dot(center);
  out.loss = -LogSigmoid(pos);
  // d/dx [-log s(x)] = s(x) - 1
  const double g_pos = Sigmoid(pos) - 1.0;
  out.d_center = g_pos * context;
  out.d_context = g_pos * center;
  for (const auto& u : negatives) {
    const double neg = u.dot(center);
    out.loss -= LogSigmoid(-neg);
    // d/dx [-log s(-x)] = s(x)
    const double g = Sigmoid(neg);
    out.d_center += g * u;
    out.d_negatives.push_back(g * center);
  }
  return out;
}

EmbeddingTable train_skipgram(const TokenCorpus& corpus, const SkipGramConfig& config) {
  if (config.dim <= 0 || config.window <= 0 || config.negatives < 0 || config.epochs < 0 ||
      config.learning_rate < 0) {
    throw BadConfig("skip-gram parameters must be positive");
  }
  const std::size_t vocab = corpus.vocab_size();
  if (vocab < 2) throw DegenerateCorpus("skip-gram needs at least 2 vocabulary tokens");

  // Compact sentences: unknown tokens are neither centers nor contexts.
  std::vector<std::vector<std::int32_t>> sentences;
  std::size_t total_tokens = 0;
  std::size_t pair_count = 0;
  for (const auto& s : corpus.sentences) {
    std::vector<std::int32_t> ids;
    for (auto t : s) {
      if (t != kUnkIndex) ids.push_back(t);
    }
    if (ids.size() >= 2) pair_count += ids.size() - 1;
    total_tokens += ids.size();
    sentences.push_back(std::move(ids));
  }
  if (pair_count == 0) throw DegenerateCorpus("no (center, context) pair in corpus");

  const int d = config.dim;
  Rng rng(config.seed);
  NodeMatrix input(static_cast<Eigen::Index>(vocab), d);
  for (Eigen::Index r = 0; r < input.rows(); ++r) {
    for (int c = 0; c < d; ++c) input(r, c) = (uniform01(rng) - 0.5) / d;
  }
  NodeMatrix output = NodeMatrix::Zero(static_cast<Eigen::Index>(vocab), d);

  // Cumulative unigram^0.75 distribution for negative draws.
  std::vector<double> cumulative(vocab);
  double acc = 0.0;
  for (std::size_t i = 0; i < vocab; ++i) {
    acc += std::pow(static_cast<double>(corpus.counts[i]), 0.75);
    cumulative[i] = acc;
  }
  auto draw_negative = [&]() -> std::int32_t {
    const double u = uniform01(rng) * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return static_cast<std::int32_t>(it - cumulative.begin());
  };

  const double budget = static_cast<double>(config.epochs) * static_cast<double>(total_tokens) + 1.0;
  std::size_t processed = 0;
  Eigen::VectorXd center_grad(d);

  // The updates below are plain SGD on sgns_objective: each (target, label)
  // term contributes (s(u.v) - label) * u to dv and (s(u.v) - label) * v to du.
  auto update = [&](std::int32_t center, std::int32_t target, double label, double lr) {
    auto v = input.row(center);
    auto u = output.row(target);
    const double g = (label - Sigmoid(u.dot(v))) * lr;
    center_grad.noalias() += g * u.transpose();
    u.noalias() += g * v;
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& s : sentences) {
      const auto len = static_cast<std::ptrdiff_t>(s.size());
      for (std::ptrdiff_t i = 0; i < len; ++i) {
        const double lr =
            config.learning_rate * std::max(1e-4, 1.0 - static_cast<double>(processed) / budget);
        ++processed;
        const std::int32_t center = s[i];
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - config.window);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, i + config.window);
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const std::int32_t context = s[j];
          center_grad.setZero();
          update(center, context, 1.0, lr);
          for (int k = 0; k < config.negatives; ++k) {
            const std::int32_t neg = draw_negative();
            if (neg == context) continue;
            update(center, neg, 0.0, lr);
          }
          input.row(center) += center_grad.transpose();
        }
      }
    }
  }

  Eigen::VectorXd unk = input.colwise().mean().transpose();
  return EmbeddingTable(corpus.tokens, std::move(input), std::move(unk), config);
}

NodeMatrix assemble_features(const AlphaAst& graph, const EmbeddingTable& table) {
  const int d = table.dim();
  NodeMatrix h(static_cast<Eigen::Index>(graph.nodes.size()), d + 3);
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const AlphaNode& n = graph.nodes[i];
    const auto row = static_cast<Eigen::Index>(i);
    h.row(row).head(d) = table.mean_of(node_tokens(n)).transpose();
    const auto hot = one_hot(n.annotation);
    for (int k = 0; k < 3; ++k) h(row, d + k) = hot[k];
  }
  return h;
}

}  // namespace fixgraph
