#include "fixgraph/errors.hpp"

namespace fixgraph {

namespace {

std::string FormatSyntaxError(int line, int col, const std::vector<std::string>& expected,
                              const std::string& found) {
  std::string msg = std::to_string(line) + ":" + std::to_string(col) +
                    ": syntax error: unexpected " + found;
  if (!expected.empty()) {
    msg += ", expected one of {";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += ", ";
      msg += expected[i];
    }
    msg += "}";
  }
  return msg;
}

}  // namespace

SyntaxError::SyntaxError(int line, int col, std::vector<std::string> expected,
                         const std::string& found)
    : Error(ErrorCategory::Input, FormatSyntaxError(line, col, expected, found)),
      line_(line),
      col_(col),
      expected_(std::move(expected)) {}

}  // namespace fixgraph
