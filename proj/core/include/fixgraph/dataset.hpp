#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fixgraph/ast.hpp"

namespace fixgraph {

enum class SplitTag { None, Train, Test };

std::string to_string(SplitTag tag);

/// One side of a changed file: absent (file created or deleted), raw source
/// text, or an already-parsed tree.
using FileVersion = std::variant<std::monostate, std::string, Ast>;

struct ChangedFile {
  std::string path;
  FileVersion old_version;
  FileVersion new_version;
};

struct CommitSample {
  std::string id;
  std::string project;
  int label = 0;  // 1 = fixing
  std::vector<ChangedFile> files;
  SplitTag split = SplitTag::None;
  /// Precomputed changed LOC, when the line carried one.
  std::optional<std::size_t> changed_loc;
};

struct Dataset {
  std::vector<CommitSample> samples;
  SplitTag split_tag = SplitTag::None;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  std::size_t count_label(int label) const;
  std::set<std::string> projects() const;
  /// Samples carrying the given split tag.
  Dataset with_split(SplitTag tag) const;
  /// True when at least one sample carries a split tag.
  bool has_split_tags() const;
};

/// JSONL, one sample per line:
///   {"id": str, "project": str, "label": 0|1,
///    "files": [{"path": str, "old": str|{"ast": ...}|null, "new": ...}],
///    "split": "train"|"test" (optional), "changed_loc": int (optional)}
/// Blank lines are skipped. Throws ParseError with the 1-based line number,
/// or DuplicateId.
Dataset read_dataset(std::istream& is);
Dataset load_dataset(const std::string& path);

void write_dataset(std::ostream& os, const Dataset& ds);
void save_dataset(const std::string& path, const Dataset& ds);

/// Project-granular split: sorted project names are shuffled with the seed,
/// the first ceil(fraction * P) (clamped to [1, P-1]) go to train. Sample
/// order is preserved on both sides. Throws TooFewProjects, or BadConfig
/// when fraction is outside (0, 1).
std::pair<Dataset, Dataset> cross_project_split(const Dataset& ds, double train_fraction,
                                                std::uint64_t seed);

}  // namespace fixgraph
