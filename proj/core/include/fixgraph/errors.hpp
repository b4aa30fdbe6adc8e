#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixgraph {

/// Broad failure classes. The command-line tool maps these onto its exit codes.
enum class ErrorCategory {
  Input,            // unreadable or malformed input (exit 2)
  Data,             // well-formed input that cannot be used (exit 3)
  VersionMismatch,  // incompatible checkpoint / embedding files (exit 4)
  Logic,            // caller violated a precondition
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int col, std::vector<std::string> expected,
              const std::string& found);
  int line() const noexcept { return line_; }
  int col() const noexcept { return col_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  int line_;
  int col_;
  std::vector<std::string> expected_;
};

class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& detail)
      : Error(ErrorCategory::Input, "schema error at " + path + ": " + detail),
        path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class CycleError : public Error {
 public:
  explicit CycleError(const std::string& detail)
      : Error(ErrorCategory::Input, "children relation is not a tree: " + detail) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& detail) : Error(ErrorCategory::Input, detail) {}
};

/// Malformed dataset line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& detail)
      : Error(ErrorCategory::Input,
              "line " + std::to_string(line) + ": " + detail),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& detail) : Error(ErrorCategory::Data, detail) {}
};

class DuplicateId : public DataError {
 public:
  explicit DuplicateId(const std::string& id)
      : DataError("duplicate sample id '" + id + "'"), id_(id) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class EmptyCommit : public DataError {
 public:
  EmptyCommit() : DataError("commit has no changed files") {}
};
class EmptyCorpus : public DataError {
 public:
  EmptyCorpus() : DataError("token vocabulary is empty") {}
};
class DegenerateCorpus : public DataError {
 public:
  explicit DegenerateCorpus(const std::string& detail) : DataError(detail) {}
};
class TooFewProjects : public DataError {
 public:
  explicit TooFewProjects(std::size_t n)
      : DataError("cross-project split needs at least 2 projects, got " +
                  std::to_string(n)) {}
};
class SingleClassDataset : public DataError {
 public:
  SingleClassDataset() : DataError("training data must contain both labels") {}
};
class SingleClass : public DataError {
 public:
  SingleClass() : DataError("AUC needs at least one positive and one negative") {}
};
class NoFixingCommits : public DataError {
 public:
  NoFixingCommits() : DataError("no fixing commits in the evaluated set") {}
};
class EmptySet : public DataError {
 public:
  EmptySet() : DataError("metric undefined on an empty set") {}
};

class VersionMismatch : public Error {
 public:
  explicit VersionMismatch(const std::string& detail)
      : Error(ErrorCategory::VersionMismatch, detail) {}
};

class LogicError : public Error {
 public:
  explicit LogicError(const std::string& detail) : Error(ErrorCategory::Logic, detail) {}
};

class UnknownNode : public LogicError {
 public:
  explicit UnknownNode(long id) : LogicError("unknown node id " + std::to_string(id)) {}
};
class InvalidMapping : public LogicError {
 public:
  explicit InvalidMapping(const std::string& detail)
      : LogicError("invalid node mapping: " + detail) {}
};
class ShapeMismatch : public LogicError {
 public:
  explicit ShapeMismatch(const std::string& detail)
      : LogicError("shape mismatch: " + detail) {}
};
class EmptyGraph : public LogicError {
 public:
  EmptyGraph() : LogicError("graph has no nodes") {}
};
class EmptyBatch : public LogicError {
 public:
  EmptyBatch() : LogicError("batch is empty") {}
};

class BadConfig : public Error {
 public:
  explicit BadConfig(const std::string& detail)
      : Error(ErrorCategory::Input, "bad configuration: " + detail) {}
};

}  // namespace fixgraph
