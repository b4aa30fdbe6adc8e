#pragma once

#include <string>
#include <string_view>

#include "fixgraph/ast.hpp"

namespace fixgraph {

/// Reads the AST-JSON interchange format:
///   {"file_path": str, "nodes": [{"id": int, "kind": str, "label": str|null,
///    "span": [l0,c0,l1,c1]|null}], "children": {"<id>": [int, ...]}}
/// Nodes may appear in any order; ids must be dense 0..n-1 with 0 the root.
/// Unknown kinds are kept verbatim. Throws SchemaError naming the offending
/// path, or CycleError when the children relation is not a tree.
Ast ingest_ast_json(std::string_view doc);

/// Nodes sorted by id, children keys in ascending numeric order.
std::string export_ast_json(const Ast& ast, int indent = -1);

}  // namespace fixgraph
