#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fixgraph {

struct AlphaNode;

/// Splits on underscores and lower/upper camelCase boundaries, lowercased.
/// "maxRetryCount" -> {"max","retry","count"}, "BUF_SIZE" -> {"buf","size"}.
std::vector<std::string> split_subtokens(std::string_view label);

/// [kind] for unlabeled nodes, [kind, subtokens...] otherwise.
std::vector<std::string> node_tokens(std::string_view kind, const std::optional<std::string>& label);
std::vector<std::string> node_tokens(const AlphaNode& node);

}  // namespace fixgraph
