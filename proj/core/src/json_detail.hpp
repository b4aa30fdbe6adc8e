#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "fixgraph/ast.hpp"

namespace fixgraph::detail {

/// `where` prefixes SchemaError paths, e.g. "$" or "files[0].old.ast".
Ast ast_from_json(const nlohmann::json& doc, const std::string& where);

}  // namespace fixgraph::detail
