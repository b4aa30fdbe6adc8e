#pragma once

#include <string>
#include <string_view>

#include "fixgraph/ast.hpp"

namespace fixgraph {

/// Parses a C subset: function definitions and prototypes, declarations
/// (scalars, pointers, arrays, initializer lists), if/else, while, do/while,
/// for, return, break, continue, blocks, and expressions with C precedence
/// (assignment, ?:, binary, unary, casts, sizeof, calls, indexing, member
/// access, postfix ++/--). Identifiers ending in "_t" are treated as type
/// names. Statements are also accepted at file scope. No preprocessor.
///
/// Node ids are assigned in preorder. The returned tree keeps a copy of the
/// text for line-level diffing. Throws SyntaxError on the first violation.
Ast parse_source(std::string_view text, std::string path = {});

}  // namespace fixgraph
