#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fixgraph {

struct ScoredCommit {
  std::string id;
  double score = 0.0;  // predicted probability of being a fixing commit
  int label = 0;       // 1 = fixing
  std::size_t changed_loc = 0;
};

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// A commit is predicted fixing iff score >= threshold.
Confusion confusion(const std::vector<ScoredCommit>& scored, double threshold);
/// 0/0 cases evaluate to 0.
PrecisionRecallF1 prf1(const Confusion& c);
/// Throws EmptySet.
double accuracy(const Confusion& c);
/// Probability that a random fixing commit outscores a random non-fixing one,
/// ties counting one half. Throws SingleClass.
double auc(const std::vector<ScoredCommit>& scored);
/// Reviews commits by descending score (ties by ascending id), taking each
/// while the cumulative changed LOC stays within effort_percent% of the total,
/// and returns the fraction of all fixing commits found. Throws
/// NoFixingCommits, or LogicError when effort_percent is outside (0, 100].
double cost_effort_at(const std::vector<ScoredCommit>& scored, double effort_percent);

struct MetricsReport {
  Confusion counts;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::optional<double> auc;  // absent for single-class inputs
  std::map<double, double> cost_effort;  // effort % -> CE
  std::size_t samples = 0;
};

/// AUC is omitted when the scores hold a single class; CE entries are
/// omitted when no commit is fixing.
MetricsReport evaluate(const std::vector<ScoredCommit>& scored, double threshold,
                       const std::vector<double>& effort_percents);

std::string report_to_json(const MetricsReport& report, int indent = 2);
std::string report_to_table(const MetricsReport& report);

/// CSV with header id,score,label,changed_loc.
void write_scores_csv(std::ostream& os, const std::vector<ScoredCommit>& scored);
/// Throws ParseError with the offending line number.
std::vector<ScoredCommit> read_scores_csv(std::istream& is);

}  // namespace fixgraph
