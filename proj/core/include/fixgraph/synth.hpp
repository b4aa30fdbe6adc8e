#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "fixgraph/dataset.hpp"

namespace fixgraph {

enum class FixSignal { BoundsCheck, OffByOne, Mixed };

/// "bounds-check" | "off-by-one" | "mixed"; throws BadConfig otherwise.
FixSignal fix_signal_from_string(const std::string& name);
std::string to_string(FixSignal signal);

/// Generates n paired old/new C sources. Fixing samples apply one local fix
/// template (a guard around an indexed store, or a loop bound tightened from
/// <= to <); non-fixing samples apply refactoring edits (renames, logging
/// calls, constant tweaks, new helper functions) and never introduce an if
/// statement. Labels are balanced (floor(n/2) fixing) and spread over
/// max(2, round(n/10)) projects. Deterministic per seed. Throws BadConfig for
/// n < 2.
Dataset synthesize(std::size_t n, FixSignal signal, std::uint64_t seed);

}  // namespace fixgraph
