#include "fixgraph/ast_json.hpp"

#include <algorithm>
#include <charconv>
#include <nlohmann/json.hpp>

#include "fixgraph/errors.hpp"
#include "json_detail.hpp"

namespace fixgraph {

using nlohmann::json;

namespace detail {

Ast ast_from_json(const json& doc, const std::string& where) {
  if (!doc.is_object()) throw SchemaError(where, "expected an object");

  std::string file_path;
  if (auto it = doc.find("file_path"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError(where + ".file_path", "expected a string");
    file_path = it->get<std::string>();
  }

  auto nodes_it = doc.find("nodes");
  if (nodes_it == doc.end() || !nodes_it->is_array()) {
    throw SchemaError(where + ".nodes", "expected an array");
  }
  const std::size_t n = nodes_it->size();
  if (n == 0) throw SchemaError(where + ".nodes", "tree must have a root node");

  std::vector<std::optional<AstNode>> slots(n);
  for (std::size_t i = 0; i < n; ++i) {
    const json& jn = (*nodes_it)[i];
    const std::string path = where + ".nodes[" + std::to_string(i) + "]";
    if (!jn.is_object()) throw SchemaError(path, "expected an object");
    auto id_it = jn.find("id");
    if (id_it == jn.end() || !id_it->is_number_integer()) {
      throw SchemaError(path + ".id", "expected an integer");
    }
    const auto id = id_it->get<long long>();
    if (id < 0 || static_cast<std::size_t>(id) >= n) {
      throw SchemaError(path + ".id", "id " + std::to_string(id) + " outside 0.." +
                                          std::to_string(n - 1));
    }
    if (slots[id]) throw SchemaError(path + ".id", "duplicate id " + std::to_string(id));

    AstNode node;
    node.id = static_cast<NodeId>(id);
    auto kind_it = jn.find("kind");
    if (kind_it == jn.end() || !kind_it->is_string() || kind_it->get<std::string>().empty()) {
      throw SchemaError(path + ".kind", "expected a non-empty string");
    }
    node.kind = kind_it->get<std::string>();
    if (auto it = jn.find("label"); it != jn.end() && !it->is_null()) {
      if (!it->is_string()) throw SchemaError(path + ".label", "expected a string or null");
      node.label = it->get<std::string>();
    }
    if ((node.kind == kind::kIdentifier || node.kind == kind::kLiteral) &&
        (!node.label || node.label->empty())) {
      throw SchemaError(path + ".label", node.kind + " nodes need a non-empty label");
    }
    if (auto it = jn.find("span"); it != jn.end() && !it->is_null()) {
      if (!it->is_array() || it->size() != 4 ||
          !std::all_of(it->begin(), it->end(), [](const json& v) { return v.is_number_integer(); })) {
        throw SchemaError(path + ".span", "expected [int,int,int,int] or null");
      }
      node.span = Span{(*it)[0].get<int>(), (*it)[1].get<int>(), (*it)[2].get<int>(),
                       (*it)[3].get<int>()};
    }
    slots[id] = std::move(node);
  }

  std::vector<AstNode> nodes;
  nodes.reserve(n);
  for (auto& s : slots) nodes.push_back(std::move(*s));

  std::vector<std::vector<NodeId>> children(n);
  auto ch_it = doc.find("children");
  if (ch_it != doc.end() && !ch_it->is_null()) {
    if (!ch_it->is_object()) throw SchemaError(where + ".children", "expected an object");
    for (const auto& [key, list] : ch_it->items()) {
      const std::string path = where + ".children." + key;
      long long parent = -1;
      auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), parent);
      if (ec != std::errc() || ptr != key.data() + key.size() || parent < 0 ||
          static_cast<std::size_t>(parent) >= n) {
        throw SchemaError(path, "key is not a known node id");
      }
      if (!list.is_array()) throw SchemaError(path, "expected an array of ids");
      for (std::size_t k = 0; k < list.size(); ++k) {
        if (!list[k].is_number_integer()) {
          throw SchemaError(path + "[" + std::to_string(k) + "]", "expected an integer");
        }
        const auto c = list[k].get<long long>();
        if (c < 0 || static_cast<std::size_t>(c) >= n) {
          throw SchemaError(path + "[" + std::to_string(k) + "]",
                            "unknown child id " + std::to_string(c));
        }
        children[parent].push_back(static_cast<NodeId>(c));
      }
    }
  }
  return Ast(std::move(file_path), std::move(nodes), std::move(children));
}

}  // namespace detail

Ast ingest_ast_json(std::string_view doc) {
  json parsed;
  try {
    parsed = json::parse(doc);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", e.what());
  }
  return detail::ast_from_json(parsed, "$");
}

std::string export_ast_json(const Ast& ast, int indent) {
  // Emit with numeric key order: serialize through ordered_json.
  nlohmann::ordered_json out;
  out["file_path"] = ast.file_path();
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const AstNode& nd : ast.nodes()) {
    nlohmann::ordered_json jn;
    jn["id"] = nd.id;
    jn["kind"] = nd.kind;
    jn["label"] = nd.label ? nlohmann::ordered_json(*nd.label) : nlohmann::ordered_json(nullptr);
    jn["span"] = nd.span ? nlohmann::ordered_json::array({nd.span->start_line, nd.span->start_col,
                                                          nd.span->end_line, nd.span->end_col})
                         : nlohmann::ordered_json(nullptr);
    nodes.push_back(std::move(jn));
  }
  out["nodes"] = std::move(nodes);
  nlohmann::ordered_json children = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < ast.size(); ++i) {
    children[std::to_string(i)] = ast.children()[i];
  }
  out["children"] = std::move(children);
  return out.dump(indent);
}

}  // namespace fixgraph
