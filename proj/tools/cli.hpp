#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fixgraph::cli {

/// Runs one command line (without the program name). Returns the process exit
/// code: 0 success, 2 input or parse error, 3 unusable data, 4 incompatible
/// model files, 1 internal error. Diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fixgraph::cli
