#include "fixgraph/tokens.hpp"

#include <cctype>

#include "fixgraph/alpha_ast.hpp"

namespace fixgraph {

namespace {

bool Upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool Lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool Digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

void SplitCamel(std::string_view seg, std::vector<std::string>& out) {
  std::string cur;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    const char c = seg[i];
    if (i > 0 && Upper(c) && !cur.empty()) {
      const char prev = seg[i - 1];
      const bool after_lower = Lower(prev) || Digit(prev);
      const bool acronym_end = Upper(prev) && i + 1 < seg.size() && Lower(seg[i + 1]);
      if (after_lower || acronym_end) {
        out.push_back(std::move(cur));
        cur.clear();
      }
    }
    cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (!cur.empty()) out.push_back(std::move(cur));
}

}  // namespace

std::vector<std::string> split_subtokens(std::string_view label) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= label.size()) {
    std::size_t end = label.find('_', start);
    if (end == std::string_view::npos) end = label.size();
    SplitCamel(label.substr(start, end - start), out);
    start = end + 1;
  }
  return out;
}

std::vector<std::string> node_tokens(std::string_view kind, const std::optional<std::string>& label) {
  std::vector<std::string> out{std::string(kind)};
  if (label) {
    for (auto& t : split_subtokens(*label)) out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::string> node_tokens(const AlphaNode& node) {
  return node_tokens(node.kind, node.label);
}

}  // namespace fixgraph
