#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fixgraph/alpha_ast.hpp"

namespace fixgraph {

/// Row-major node-by-feature matrix.
using NodeMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::int32_t kUnkIndex = -1;

/// One sentence per graph: the node tokens in node-id order. Tokens below
/// min_count stay in the sentences as kUnkIndex.
struct TokenCorpus {
  std::vector<std::vector<std::int32_t>> sentences;
  /// Vocabulary in index order: descending frequency, then lexicographic.
  std::vector<std::string> tokens;
  std::vector<std::size_t> counts;
  std::unordered_map<std::string, std::int32_t> index;

  std::size_t vocab_size() const { return tokens.size(); }
  std::int32_t index_of(std::string_view token) const;
};

/// Throws EmptyCorpus when no token reaches min_count (or graphs is empty).
TokenCorpus build_corpus(const std::vector<AlphaAst>& graphs, std::size_t min_count);

struct SkipGramConfig {
  int dim = 64;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  std::size_t min_count = 2;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
};

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> tokens, NodeMatrix vectors, Eigen::VectorXd unk,
                 SkipGramConfig config);

  int dim() const { return static_cast<int>(vectors_.cols()); }
  std::size_t vocab_size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const NodeMatrix& vectors() const { return vectors_; }
  const Eigen::VectorXd& unk_vector() const { return unk_; }
  const SkipGramConfig& config() const { return config_; }

  /// Total: out-of-vocabulary tokens map to the unknown vector.
  Eigen::VectorXd lookup(std::string_view token) const;
  /// Arithmetic mean of the token vectors.
  Eigen::VectorXd mean_of(const std::vector<std::string>& tokens) const;

  /// "PSEMB1\n", one-line JSON header {d, V, config, tokens}, then V*d
  /// little-endian float64 (row-major), then d float64 for the unknown vector.
  void save(std::ostream& os) const;
  static EmbeddingTable load(std::istream& is);
  void save_file(const std::string& path) const;
  static EmbeddingTable load_file(const std::string& path);

  friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
    return a.tokens_ == b.tokens_ && a.vectors_ == b.vectors_ && a.unk_ == b.unk_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
  NodeMatrix vectors_;
  Eigen::VectorXd unk_;
  SkipGramConfig config_;
};

/// Skip-gram with negative sampling, single-threaded and deterministic for a
/// given seed. Negatives come from the unigram distribution raised to 0.75;
/// the learning rate decays linearly. Returns the input-side vectors; the
/// unknown vector is their mean. Throws DegenerateCorpus when V < 2 or no
/// (center, context) pair exists.
EmbeddingTable train_skipgram(const TokenCorpus& corpus, const SkipGramConfig& config);

/// Negative-sampling loss for one (center, context, negatives) triple,
///   -log s(u_o . v_c) - sum_k log s(-u_k . v_c),
/// and its gradient with respect to every vector involved.
struct SgnsObjective {
  double loss = 0.0;
  Eigen::VectorXd d_center;
  Eigen::VectorXd d_context;
  std::vector<Eigen::VectorXd> d_negatives;
};
SgnsObjective sgns_objective(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                             const std::vector<Eigen::VectorXd>& negatives);

/// Initial node features h0 = [mean token embedding || one-hot annotation],
/// one row per node in id order, dim() + 3 columns.
NodeMatrix assemble_features(const AlphaAst& graph, const EmbeddingTable& table);

}  // namespace fixgraph
