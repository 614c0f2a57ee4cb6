#include "upliftfs/evaluation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "upliftfs/error.h"

namespace upliftfs {

double RmseIte(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size()) throw Error("rmse: length mismatch");
  if (predicted.empty()) throw Error("rmse: empty input");
  double ss = 0.0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - truth[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(predicted.size()));
}

RecallResult FeatureRecallTopK(const FeatureRanking& ranking,
                               std::span<const FeatureRole> roles,
                               std::span<const std::optional<TransformKind>> patterns,
                               size_t k) {
  const size_t m = ranking.order.size();
  if (roles.size() != m || patterns.size() != m) {
    throw Error("recall: role/pattern labels do not match the ranking");
  }
  if (k > m) throw Error("recall: k exceeds the number of features");
  std::vector<bool> top(m, false);
  for (size_t j = 0; j < k; ++j) top[ranking.order[j]] = true;

  size_t uplift = 0, hits = 0;
  std::map<std::string, std::pair<size_t, size_t>> per_pattern;
  for (size_t j = 0; j < m; ++j) {
    if (roles[j] != FeatureRole::kUplift) continue;
    ++uplift;
    hits += top[j];
    auto& [total, found] = per_pattern[PatternName(patterns[j])];
    ++total;
    found += top[j];
  }
  if (uplift == 0) throw Error("recall: no uplift features present");
  RecallResult out;
  out.overall = static_cast<double>(hits) / static_cast<double>(uplift);
  for (const auto& [name, tally] : per_pattern) {
    out.by_pattern[name] =
        static_cast<double>(tally.second) / static_cast<double>(tally.first);
  }
  return out;
}

double Auuc(std::span<const double> scores, std::span<const int> treatment,
            std::span<const int> outcome) {
  const size_t n = scores.size();
  if (treatment.size() != n || outcome.size() != n) {
    throw Error("auuc: length mismatch");
  }
  if (n < 2) throw Error("auuc: need at least two rows");
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  double nt = 0.0, nc = 0.0, yt = 0.0, yc = 0.0, area = 0.0;
  for (size_t k = 0; k < n; ++k) {
    const size_t i = order[k];
    if (treatment[i] == 1) {
      nt += 1.0;
      yt += outcome[i];
    } else {
      nc += 1.0;
      yc += outcome[i];
    }
    if (nt > 0.0 && nc > 0.0) {
      area += (yt / nt - yc / nc) * static_cast<double>(k + 1);
    }
  }
  if (nt == 0.0 || nc == 0.0) throw Error("auuc: an arm is missing");
  return area / (static_cast<double>(n) * static_cast<double>(n));
}

const MetricSummary* ReportCell::Find(const std::string& metric) const {
  for (const auto& s : metrics) {
    if (s.metric == metric) return &s;
  }
  return nullptr;
}

const ReportCell* ExperimentReport::Find(const std::string& method,
                                         const std::string& model,
                                         size_t m_star) const {
  for (const auto& c : cells) {
    if (c.method == method && c.model == model && c.m_star == m_star) return &c;
  }
  return nullptr;
}

MetricSummary Summarize(const std::string& metric, std::span<const double> values) {
  if (values.empty()) throw Error("cannot summarize an empty sample");
  MetricSummary s;
  s.metric = metric;
  s.trials = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    s.se = sd / std::sqrt(static_cast<double>(values.size()));
  }
  s.lo = s.mean - 1.96 * s.se;
  s.hi = s.mean + 1.96 * s.se;
  return s;
}

ExperimentReport Aggregate(std::span<const TrialResult> trials) {
  if (trials.empty()) throw Error("aggregate: no trials");
  using Key = std::tuple<std::string, std::string, size_t>;
  std::vector<Key> keys;
  std::map<Key, std::vector<const TrialResult*>> groups;
  for (const auto& t : trials) {
    Key key{t.method, t.model, t.m_star};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(&t);
  }

  ExperimentReport report;
  for (const Key& key : keys) {
    ReportCell cell{std::get<0>(key), std::get<1>(key), std::get<2>(key), {}, 0};
    std::vector<double> rmse, recall, auuc;
    std::map<std::string, std::vector<double>> by_pattern;
    for (const TrialResult* t : groups[key]) {
      if (!t->error.empty()) {
        ++cell.failed_trials;
        continue;
      }
      rmse.push_back(t->rmse);
      if (t->has_recall) {
        recall.push_back(t->recall_overall);
        for (const auto& [name, v] : t->recall_by_pattern) {
          by_pattern[name].push_back(v);
        }
      }
      if (t->auuc) auuc.push_back(*t->auuc);
    }
    if (!rmse.empty()) {
      cell.metrics.push_back(Summarize("rmse", rmse));
      if (!recall.empty()) {
        cell.metrics.push_back(Summarize("recall_overall", recall));
      }
      for (const auto& [name, values] : by_pattern) {
        cell.metrics.push_back(Summarize("recall_" + name, values));
      }
      if (!auuc.empty()) cell.metrics.push_back(Summarize("auuc", auuc));
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

double PairedTStatistic(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw Error("paired t: need two equal-length samples of size >= 2");
  }
  std::vector<double> d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const MetricSummary s = Summarize("diff", d);
  if (s.se == 0.0) {
    return s.mean > 0.0 ? INFINITY : (s.mean < 0.0 ? -INFINITY : 0.0);
  }
  return s.mean / s.se;
}

}  // namespace upliftfs
