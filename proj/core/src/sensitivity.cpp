#include "fixgraph/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "fixgraph/errors.hpp"
#include "fixgraph/pipeline.hpp"
#include "fixgraph/random.hpp"

namespace fixgraph {

namespace {

void CheckEdges(const std::vector<std::size_t>& edges) {
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] <= edges[i - 1]) throw BadConfig("bin edges must be strictly increasing");
  }
}

std::size_t BinOf(std::size_t loc, const std::vector<std::size_t>& edges) {
  return static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), loc) - edges.begin());
}

std::vector<double> AverageRanks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

nlohmann::ordered_json ReportJson(const MetricsReport& r) {
  return nlohmann::ordered_json::parse(report_to_json(r, -1));
}

}  // namespace

std::vector<Dataset> sensitivity_folds(const Dataset& train, int k, std::uint64_t seed) {
  if (k < 2) throw BadConfig("sensitivity needs k >= 2 folds");
  const std::size_t n = train.samples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(order, rng);
  std::vector<std::size_t> fold_of(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    fold_of[order[pos]] = pos * static_cast<std::size_t>(k) / std::max<std::size_t>(n, 1);
  }
  std::vector<Dataset> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    Dataset& d = out[static_cast<std::size_t>(i)];
    d.split_tag = train.split_tag;
    for (std::size_t s = 0; s < n; ++s) {
      if (fold_of[s] <= static_cast<std::size_t>(i)) d.samples.push_back(train.samples[s]);
    }
  }
  return out;
}

std::vector<Dataset> change_size_bins(const Dataset& ds, const std::vector<std::size_t>& edges) {
  CheckEdges(edges);
  std::vector<Dataset> bins(edges.size() + 1);
  for (auto& b : bins) b.split_tag = ds.split_tag;
  for (const auto& s : ds.samples) {
    const std::size_t loc = s.changed_loc ? *s.changed_loc : commit_graph(s).changed_loc;
    bins[BinOf(loc, edges)].samples.push_back(s);
  }
  return bins;
}

std::vector<std::vector<ScoredCommit>> change_size_bins(const std::vector<ScoredCommit>& scored,
                                                        const std::vector<std::size_t>& edges) {
  CheckEdges(edges);
  std::vector<std::vector<ScoredCommit>> bins(edges.size() + 1);
  for (const auto& s : scored) bins[BinOf(s.changed_loc, edges)].push_back(s);
  return bins;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeMismatch("spearman inputs differ in length");
  if (x.size() < 2) return 0.0;
  const auto rx = AverageRanks(x);
  const auto ry = AverageRanks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

SensitivityReport run_sensitivity(const Dataset& train, const Dataset& test,
                                  const SensitivityConfig& config) {
  const auto folds = sensitivity_folds(train, config.folds, config.system.train.seed);
  const auto test_commits = prepare_commits(test, config.jobs);
  const double threshold = config.system.train.threshold;

  SensitivityReport report;
  std::vector<double> index, f1;
  std::vector<ScoredCommit> last_scores;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    const auto commits = prepare_commits(folds[i], config.jobs);
    const TrainedSystem sys = train_system(commits, config.system);
    last_scores = score_commits(sys.result.model, sys.embeddings, test_commits, config.jobs);
    FoldResult fr;
    fr.train_size = folds[i].size();
    fr.metrics = evaluate(last_scores, threshold, config.effort_percents);
    index.push_back(static_cast<double>(i + 1));
    f1.push_back(fr.metrics.f1);
    report.folds.push_back(std::move(fr));
  }
  report.f1_trend = spearman(index, f1);

  const auto bins = change_size_bins(last_scores, config.bin_edges);
  for (std::size_t b = 0; b < bins.size(); ++b) {
    BinResult br;
    br.lower = b == 0 ? 0 : config.bin_edges[b - 1];
    if (b < config.bin_edges.size()) br.upper = config.bin_edges[b];
    br.metrics = evaluate(bins[b], threshold, config.effort_percents);
    report.bins.push_back(std::move(br));
  }
  return report;
}

std::string sensitivity_to_json(const SensitivityReport& report, int indent) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json folds = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.folds.size(); ++i) {
    nlohmann::ordered_json f;
    f["fold"] = i + 1;
    f["train_size"] = report.folds[i].train_size;
    f["metrics"] = ReportJson(report.folds[i].metrics);
    folds.push_back(std::move(f));
  }
  j["folds"] = std::move(folds);
  j["f1_spearman"] = report.f1_trend;
  nlohmann::ordered_json bins = nlohmann::ordered_json::array();
  for (const auto& b : report.bins) {
    nlohmann::ordered_json e;
    e["lower"] = b.lower;
    e["upper"] = b.upper ? nlohmann::ordered_json(*b.upper) : nlohmann::ordered_json(nullptr);
    e["metrics"] = ReportJson(b.metrics);
    bins.push_back(std::move(e));
  }
  j["change_size_bins"] = std::move(bins);
  return j.dump(indent);
}

}  // namespace fixgraph
