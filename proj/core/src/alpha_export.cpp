#include "fixgraph/alpha_export.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

namespace fixgraph {

namespace {

const char* DotColor(Annotation a) {
  switch (a) {
    case Annotation::Added:
      return "green";
    case Annotation::Deleted:
      return "red";
    case Annotation::Unchanged:
      break;
  }
  return "gray";
}

std::string DotEscape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

}  // namespace

std::string alpha_ast_to_json(const AlphaAst& graph, int indent) {
  nlohmann::ordered_json out;
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const AlphaNode& n : graph.nodes) {
    nlohmann::ordered_json jn;
    jn["id"] = n.id;
    jn["kind"] = n.kind;
    jn["label"] = n.label ? nlohmann::ordered_json(*n.label) : nlohmann::ordered_json(nullptr);
    jn["ann"] = std::string(1, annotation_code(n.annotation));
    nodes.push_back(std::move(jn));
  }
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const AlphaEdge& e : graph.edges) {
    edges.push_back(nlohmann::ordered_json::array(
        {e.src, e.dst, std::string(1, annotation_code(e.annotation))}));
  }
  out["nodes"] = std::move(nodes);
  out["edges"] = std::move(edges);
  out["changed_loc"] = graph.changed_loc;
  return out.dump(indent);
}

std::string alpha_ast_to_dot(const AlphaAst& graph) {
  std::ostringstream os;
  os << "// colors: added=green deleted=red unchanged=gray\n";
  os << "digraph alpha_ast {\n";
  os << "  node [shape=box, style=rounded, fontname=\"Helvetica\"];\n";
  for (const AlphaNode& n : graph.nodes) {
    std::string text = display_name(n.kind, n.label);
    if (n.label && text == n.kind) text += "\n" + *n.label;
    os << "  n" << n.id << " [label=\"" << DotEscape(text) << "\", color=\""
       << DotColor(n.annotation) << "\", fontcolor=\"" << DotColor(n.annotation) << "\"];\n";
  }
  for (const AlphaEdge& e : graph.edges) {
    os << "  n" << e.src << " -> n" << e.dst << " [color=\"" << DotColor(e.annotation)
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace fixgraph
