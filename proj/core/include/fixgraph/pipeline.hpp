#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fixgraph/alpha_ast.hpp"
#include "fixgraph/dataset.hpp"
#include "fixgraph/embedding.hpp"
#include "fixgraph/gat.hpp"
#include "fixgraph/matcher.hpp"

namespace fixgraph {

struct PipelineOptions {
  MatchOptions match;
  std::size_t node_cap = kDefaultNodeCap;
};

/// Parses (or takes) one side of a file. An absent side becomes a lone
/// TranslationUnit with empty source text.
Ast version_ast(const FileVersion& version, const std::string& path);

/// Per file: obtain both trees, match, annotate; then merge under a commit
/// root. Parse failures are rethrown with the sample id and file path
/// prepended, keeping their error category.
AlphaAst commit_graph(const CommitSample& sample, const PipelineOptions& options = {});

struct PreparedCommit {
  std::string id;
  std::string project;
  int label = 0;
  AlphaAst graph;
  /// The sample's own value when present, else the one computed by the diff.
  std::size_t changed_loc = 0;
};

PreparedCommit prepare_commit(const CommitSample& sample, const PipelineOptions& options = {});
/// Output order follows the dataset.
std::vector<PreparedCommit> prepare_commits(const Dataset& ds, int jobs = 1,
                                            const PipelineOptions& options = {});

std::vector<AlphaAst> graphs_of(const std::vector<PreparedCommit>& commits);
std::vector<Graph> featurize(const std::vector<PreparedCommit>& commits,
                             const EmbeddingTable& table, int jobs = 1);

}  // namespace fixgraph
