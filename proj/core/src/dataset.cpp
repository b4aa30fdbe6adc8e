#include "fixgraph/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "fixgraph/ast_json.hpp"
#include "fixgraph/errors.hpp"
#include "fixgraph/random.hpp"
#include "json_detail.hpp"

namespace fixgraph {

using nlohmann::json;

std::string to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::Train:
      return "train";
    case SplitTag::Test:
      return "test";
    case SplitTag::None:
      break;
  }
  return "none";
}

std::size_t Dataset::count_label(int label) const {
  std::size_t n = 0;
  for (const auto& s : samples) n += s.label == label ? 1 : 0;
  return n;
}

std::set<std::string> Dataset::projects() const {
  std::set<std::string> out;
  for (const auto& s : samples) out.insert(s.project);
  return out;
}

Dataset Dataset::with_split(SplitTag tag) const {
  Dataset out;
  out.split_tag = tag;
  for (const auto& s : samples) {
    if (s.split == tag) out.samples.push_back(s);
  }
  return out;
}

bool Dataset::has_split_tags() const {
  for (const auto& s : samples) {
    if (s.split != SplitTag::None) return true;
  }
  return false;
}

namespace {

FileVersion VersionFromJson(const json& j, const std::string& where) {
  if (j.is_null()) return std::monostate{};
  if (j.is_string()) return j.get<std::string>();
  if (j.is_object() && j.size() == 1 && j.contains("ast")) {
    return detail::ast_from_json(j.at("ast"), where + ".ast");
  }
  throw SchemaError(where, "expected a string, {\"ast\": ...} or null");
}

json VersionToJson(const FileVersion& v) {
  if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
  if (std::holds_alternative<Ast>(v)) {
    return json{{"ast", json::parse(export_ast_json(std::get<Ast>(v)))}};
  }
  return nullptr;
}

const json& Field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(std::string("$.") + key, "missing field");
  return *it;
}

CommitSample SampleFromJson(const json& j) {
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  CommitSample s;
  const json& id = Field(j, "id");
  if (!id.is_string() || id.get<std::string>().empty()) {
    throw SchemaError("$.id", "expected a non-empty string");
  }
  s.id = id.get<std::string>();
  const json& project = Field(j, "project");
  if (!project.is_string()) throw SchemaError("$.project", "expected a string");
  s.project = project.get<std::string>();
  const json& label = Field(j, "label");
  if (!label.is_number_integer() || (label.get<long long>() != 0 && label.get<long long>() != 1)) {
    throw SchemaError("$.label", "expected 0 or 1");
  }
  s.label = static_cast<int>(label.get<long long>());

  const json& files = Field(j, "files");
  if (!files.is_array() || files.empty()) {
    throw SchemaError("$.files", "expected a non-empty array");
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string where = "$.files[" + std::to_string(i) + "]";
    const json& f = files[i];
    if (!f.is_object()) throw SchemaError(where, "expected an object");
    ChangedFile cf;
    auto path = f.find("path");
    if (path == f.end() || !path->is_string()) throw SchemaError(where + ".path", "expected a string");
    cf.path = path->get<std::string>();
    cf.old_version = VersionFromJson(f.value("old", json(nullptr)), where + ".old");
    cf.new_version = VersionFromJson(f.value("new", json(nullptr)), where + ".new");
    if (std::holds_alternative<std::monostate>(cf.old_version) &&
        std::holds_alternative<std::monostate>(cf.new_version)) {
      throw SchemaError(where, "both sides are null");
    }
    s.files.push_back(std::move(cf));
  }

  if (auto it = j.find("split"); it != j.end() && !it->is_null()) {
    const std::string tag = it->is_string() ? it->get<std::string>() : "";
    if (tag == "train") {
      s.split = SplitTag::Train;
    } else if (tag == "test") {
      s.split = SplitTag::Test;
    } else {
      throw SchemaError("$.split", "expected \"train\" or \"test\"");
    }
  }
  if (auto it = j.find("changed_loc"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<long long>() < 0) {
      throw SchemaError("$.changed_loc", "expected a non-negative integer");
    }
    s.changed_loc = static_cast<std::size_t>(it->get<long long>());
  }
  return s;
}

}  // namespace

Dataset read_dataset(std::istream& is) {
  Dataset ds;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    CommitSample s;
    try {
      s = SampleFromJson(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
    } catch (const SchemaError& e) {
      throw ParseError(line_no, e.what());
    } catch (const CycleError& e) {
      throw ParseError(line_no, e.what());
    }
    if (!seen.insert(s.id).second) throw DuplicateId(s.id);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  return read_dataset(in);
}

void write_dataset(std::ostream& os, const Dataset& ds) {
  for (const auto& s : ds.samples) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["project"] = s.project;
    j["label"] = s.label;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& f : s.files) {
      nlohmann::ordered_json fj;
      fj["path"] = f.path;
      fj["old"] = VersionToJson(f.old_version);
      fj["new"] = VersionToJson(f.new_version);
      files.push_back(std::move(fj));
    }
    j["files"] = std::move(files);
    if (s.split != SplitTag::None) j["split"] = to_string(s.split);
    if (s.changed_loc) j["changed_loc"] = *s.changed_loc;
    os << j.dump() << '\n';
  }
}

void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset '" + path + "'");
  write_dataset(out, ds);
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::pair<Dataset, Dataset> cross_project_split(const Dataset& ds, double train_fraction,
                                                std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw BadConfig("train fraction must lie in (0, 1)");
  }
  const std::set<std::string> sorted = ds.projects();
  if (sorted.size() < 2) throw TooFewProjects(sorted.size());
  std::vector<std::string> projects(sorted.begin(), sorted.end());
  Rng rng(seed);
  shuffle(projects, rng);

  const long p = static_cast<long>(projects.size());
  long cut = static_cast<long>(std::ceil(train_fraction * static_cast<double>(p) - 1e-9));
  cut = std::clamp(cut, 1L, p - 1);
  const std::set<std::string> train_projects(projects.begin(), projects.begin() + cut);

  Dataset train, test;
  train.split_tag = SplitTag::Train;
  test.split_tag = SplitTag::Test;
  for (const auto& s : ds.samples) {
    CommitSample copy = s;
    if (train_projects.count(s.project)) {
      copy.split = SplitTag::Train;
      train.samples.push_back(std::move(copy));
    } else {
      copy.split = SplitTag::Test;
      test.samples.push_back(std::move(copy));
    }
  }
  return {std::move(train), std::move(test)};
}

}  // namespace fixgraph
