#pragma once

#include <string>

#include "fixgraph/alpha_ast.hpp"

namespace fixgraph {

/// {"nodes":[{"id","kind","label","ann"}], "edges":[[src,dst,"U"|"A"|"D"]], "changed_loc"}
std::string alpha_ast_to_json(const AlphaAst& graph, int indent = -1);

/// Graphviz digraph. Added elements are green, deleted red, unchanged gray.
std::string alpha_ast_to_dot(const AlphaAst& graph);

}  // namespace fixgraph
