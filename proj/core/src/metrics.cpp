#include "fixgraph/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fixgraph/errors.hpp"

namespace fixgraph {

namespace {

double Ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Confusion confusion(const std::vector<ScoredCommit>& scored, double threshold) {
  Confusion c;
  for (const auto& s : scored) {
    const bool predicted = s.score >= threshold;
    if (predicted) {
      ++(s.label == 1 ? c.tp : c.fp);
    } else {
      ++(s.label == 1 ? c.fn : c.tn);
    }
  }
  return c;
}

PrecisionRecallF1 prf1(const Confusion& c) {
  PrecisionRecallF1 r;
  r.precision = Ratio(c.tp, c.tp + c.fp);
  r.recall = Ratio(c.tp, c.tp + c.fn);
  const double denom = r.precision + r.recall;
  r.f1 = denom == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / denom;
  return r;
}

double accuracy(const Confusion& c) {
  if (c.total() == 0) throw EmptySet();
  return Ratio(c.tp + c.tn, c.total());
}

double auc(const std::vector<ScoredCommit>& scored) {
  std::vector<std::pair<double, int>> items;
  items.reserve(scored.size());
  std::size_t pos = 0;
  for (const auto& s : scored) {
    items.emplace_back(s.score, s.label);
    if (s.label == 1) ++pos;
  }
  const std::size_t neg = scored.size() - pos;
  if (pos == 0 || neg == 0) throw SingleClass();
  std::sort(items.begin(), items.end());

  // Twice the Mann-Whitney count, kept integral: 2 per won pair, 1 per tie.
  unsigned long long doubled = 0;
  std::size_t neg_below = 0;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i;
    std::size_t group_pos = 0, group_neg = 0;
    while (j < items.size() && items[j].first == items[i].first) {
      ++(items[j].second == 1 ? group_pos : group_neg);
      ++j;
    }
    doubled += 2ULL * group_pos * neg_below + static_cast<unsigned long long>(group_pos) * group_neg;
    neg_below += group_neg;
    i = j;
  }
  return static_cast<double>(doubled) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

double cost_effort_at(const std::vector<ScoredCommit>& scored, double effort_percent) {
  if (!(effort_percent > 0.0 && effort_percent <= 100.0)) {
    throw LogicError("effort percent must lie in (0, 100]");
  }
  std::size_t fixing_total = 0;
  std::size_t loc_total = 0;
  for (const auto& s : scored) {
    if (s.label == 1) ++fixing_total;
    loc_total += s.changed_loc;
  }
  if (fixing_total == 0) throw NoFixingCommits();

  std::vector<const ScoredCommit*> order;
  order.reserve(scored.size());
  for (const auto& s : scored) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(), [](const ScoredCommit* a, const ScoredCommit* b) {
    if (a->score != b->score) return a->score > b->score;
    return a->id < b->id;
  });

  const double budget = effort_percent * static_cast<double>(loc_total);
  std::size_t cumulative = 0;
  std::size_t found = 0;
  for (const ScoredCommit* s : order) {
    const std::size_t next = cumulative + s->changed_loc;
    if (static_cast<double>(next) * 100.0 > budget) break;
    cumulative = next;
    if (s->label == 1) ++found;
  }
  return Ratio(found, fixing_total);
}

MetricsReport evaluate(const std::vector<ScoredCommit>& scored, double threshold,
                       const std::vector<double>& effort_percents) {
  MetricsReport r;
  r.samples = scored.size();
  r.counts = confusion(scored, threshold);
  const auto p = prf1(r.counts);
  r.precision = p.precision;
  r.recall = p.recall;
  r.f1 = p.f1;
  r.accuracy = r.counts.total() == 0 ? 0.0 : accuracy(r.counts);
  const bool has_pos = r.counts.tp + r.counts.fn > 0;
  const bool has_neg = r.counts.fp + r.counts.tn > 0;
  if (has_pos && has_neg) r.auc = auc(scored);
  if (has_pos) {
    for (double l : effort_percents) r.cost_effort[l] = cost_effort_at(scored, l);
  }
  return r;
}

std::string report_to_json(const MetricsReport& r, int indent) {
  nlohmann::ordered_json j;
  j["samples"] = r.samples;
  j["tp"] = r.counts.tp;
  j["fp"] = r.counts.fp;
  j["tn"] = r.counts.tn;
  j["fn"] = r.counts.fn;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["accuracy"] = r.accuracy;
  j["auc"] = r.auc ? nlohmann::ordered_json(*r.auc) : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json ce = nlohmann::ordered_json::object();
  for (const auto& [l, v] : r.cost_effort) {
    std::ostringstream key;
    key << l;
    ce[key.str()] = v;
  }
  j["ce_at"] = std::move(ce);
  return j.dump(indent);
}

std::string report_to_table(const MetricsReport& r) {
  std::ostringstream os;
  auto row = [&](const std::string& name, const std::string& value) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-12s %12s\n", name.c_str(), value.c_str());
    os << buf;
  };
  auto fixed = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  row("samples", std::to_string(r.samples));
  row("tp", std::to_string(r.counts.tp));
  row("fp", std::to_string(r.counts.fp));
  row("tn", std::to_string(r.counts.tn));
  row("fn", std::to_string(r.counts.fn));
  row("precision", fixed(r.precision));
  row("recall", fixed(r.recall));
  row("f1", fixed(r.f1));
  row("accuracy", fixed(r.accuracy));
  row("auc", r.auc ? fixed(*r.auc) : "n/a");
  for (const auto& [l, v] : r.cost_effort) {
    std::ostringstream name;
    name << "CE@" << l << "%";
    row(name.str(), fixed(v));
  }
  return os.str();
}

void write_scores_csv(std::ostream& os, const std::vector<ScoredCommit>& scored) {
  os << "id,score,label,changed_loc\n";
  for (const auto& s : scored) {
    os << s.id << ',' << FormatDouble(s.score) << ',' << s.label << ',' << s.changed_loc << '\n';
  }
}

std::vector<ScoredCommit> read_scores_csv(std::istream& is) {
  std::vector<ScoredCommit> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("id,", 0) == 0) continue;
    // The id may itself contain commas; the last three fields are numeric.
    std::vector<std::size_t> commas;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == ',') commas.push_back(i);
    }
    if (commas.size() < 3) throw ParseError(line_no, "expected id,score,label,changed_loc");
    const std::size_t c3 = commas[commas.size() - 1];
    const std::size_t c2 = commas[commas.size() - 2];
    const std::size_t c1 = commas[commas.size() - 3];
    ScoredCommit s;
    s.id = line.substr(0, c1);
    try {
      std::size_t used = 0;
      const std::string score = line.substr(c1 + 1, c2 - c1 - 1);
      s.score = std::stod(score, &used);
      if (used != score.size()) throw std::invalid_argument("score");
      const std::string label = line.substr(c2 + 1, c3 - c2 - 1);
      if (label != "0" && label != "1") throw std::invalid_argument("label");
      s.label = label == "1" ? 1 : 0;
      const std::string loc = line.substr(c3 + 1);
      const long long v = std::stoll(loc, &used);
      if (used != loc.size() || v < 0) throw std::invalid_argument("changed_loc");
      s.changed_loc = static_cast<std::size_t>(v);
    } catch (const std::exception& e) {
      throw ParseError(line_no, std::string("bad field: ") + e.what());
    }
    if (!(s.score >= 0.0 && s.score <= 1.0)) throw ParseError(line_no, "score outside [0, 1]");
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace fixgraph
