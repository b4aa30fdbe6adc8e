#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace fixgraph {

/// Splits on '\n'; a trailing newline does not start an extra line.
std::vector<std::string_view> split_lines(std::string_view text);

/// Longest common subsequence length of two line sequences.
std::size_t lcs_length(const std::vector<std::string_view>& a,
                       const std::vector<std::string_view>& b);

/// Lines only in `new_text` plus lines only in `old_text`.
std::size_t changed_line_count(std::string_view old_text, std::string_view new_text);

}  // namespace fixgraph
