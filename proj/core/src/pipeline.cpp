#include "fixgraph/pipeline.hpp"

#include "fixgraph/errors.hpp"
#include "fixgraph/parallel.hpp"
#include "fixgraph/parser.hpp"

namespace fixgraph {

Ast version_ast(const FileVersion& version, const std::string& path) {
  if (const auto* text = std::get_if<std::string>(&version)) return parse_source(*text, path);
  if (const auto* tree = std::get_if<Ast>(&version)) return *tree;
  AstNode root;
  root.kind = kind::kTranslationUnit;
  return Ast(path, {root}, {{}}, std::string());
}

namespace {

// A tree loaded from AST-JSON carries no text; pairing it with an empty
// placeholder must not fall back to comparing texts.
Ast Textless(const Ast& ast) {
  return Ast(ast.file_path(), ast.nodes(), ast.children(), std::nullopt);
}

}  // namespace

AlphaAst commit_graph(const CommitSample& sample, const PipelineOptions& options) {
  if (sample.files.empty()) throw EmptyCommit();
  std::vector<AlphaAst> per_file;
  per_file.reserve(sample.files.size());
  for (const ChangedFile& f : sample.files) {
    try {
      Ast old_ast = version_ast(f.old_version, f.path);
      Ast new_ast = version_ast(f.new_version, f.path);
      if (old_ast.source().has_value() != new_ast.source().has_value()) {
        if (old_ast.source()) old_ast = Textless(old_ast);
        if (new_ast.source()) new_ast = Textless(new_ast);
      }
      per_file.push_back(diff_asts(old_ast, new_ast, options.match));
    } catch (const Error& e) {
      throw Error(e.category(), "sample '" + sample.id + "', file '" + f.path + "': " + e.what());
    }
  }
  return merge_commit_graph(std::move(per_file), options.node_cap);
}

PreparedCommit prepare_commit(const CommitSample& sample, const PipelineOptions& options) {
  PreparedCommit p;
  p.id = sample.id;
  p.project = sample.project;
  p.label = sample.label;
  p.graph = commit_graph(sample, options);
  p.changed_loc = sample.changed_loc ? *sample.changed_loc : p.graph.changed_loc;
  return p;
}

std::vector<PreparedCommit> prepare_commits(const Dataset& ds, int jobs,
                                            const PipelineOptions& options) {
  std::vector<PreparedCommit> out(ds.samples.size());
  parallel_for(ds.samples.size(), jobs,
               [&](std::size_t i) { out[i] = prepare_commit(ds.samples[i], options); });
  return out;
}

std::vector<AlphaAst> graphs_of(const std::vector<PreparedCommit>& commits) {
  std::vector<AlphaAst> out;
  out.reserve(commits.size());
  for (const auto& c : commits) out.push_back(c.graph);
  return out;
}

std::vector<Graph> featurize(const std::vector<PreparedCommit>& commits,
                             const EmbeddingTable& table, int jobs) {
  std::vector<Graph> out(commits.size());
  parallel_for(commits.size(), jobs,
               [&](std::size_t i) { out[i] = make_graph(commits[i].graph, table); });
  return out;
}

}  // namespace fixgraph
