#ifndef UPLIFTFS_EVALUATION_H_
#define UPLIFTFS_EVALUATION_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "upliftfs/dataset.h"
#include "upliftfs/synthetic.h"

namespace upliftfs {

// sqrt(mean((predicted - truth)^2)).
double RmseIte(std::span<const double> predicted, std::span<const double> truth);

struct RecallResult {
  // Share of uplift features inside the top k.
  double overall = 0.0;
  // Per transform pattern of the uplift features: share of that pattern's
  // features inside the top k (a 0/1 indicator with one feature per pattern).
  std::map<std::string, double> by_pattern;
};

RecallResult FeatureRecallTopK(const FeatureRanking& ranking,
                               std::span<const FeatureRole> roles,
                               std::span<const std::optional<TransformKind>> patterns,
                               size_t k);

// Area under the uplift curve. Rows are sorted by descending score (ties by
// row index); each prefix k holding both arms contributes
// (mean_y_treat(k) - mean_y_control(k)) * k, and the sum is divided by n^2.
double Auuc(std::span<const double> scores, std::span<const int> treatment,
            std::span<const int> outcome);

struct TrialResult {
  int trial_id = 0;
  std::string method;
  std::string model;
  size_t m_star = 0;
  double rmse = 0.0;
  // False for cells without a ranking (the all-features baseline).
  bool has_recall = true;
  double recall_overall = 0.0;
  std::map<std::string, double> recall_by_pattern;
  std::optional<double> auuc;
  std::vector<std::string> selected_features;
  // Non-empty when the cell failed; the metric fields are then meaningless.
  std::string error;
};

struct MetricSummary {
  std::string metric;
  double mean = 0.0;
  double se = 0.0;  // sample sd / sqrt(t); 0 for a single trial
  double lo = 0.0;  // mean - 1.96 se
  double hi = 0.0;  // mean + 1.96 se
  size_t trials = 0;
};

struct ReportCell {
  std::string method;
  std::string model;
  size_t m_star = 0;
  std::vector<MetricSummary> metrics;
  size_t failed_trials = 0;

  const MetricSummary* Find(const std::string& metric) const;
};

struct ExperimentReport {
  std::vector<ReportCell> cells;  // first-seen order over the trial list

  const ReportCell* Find(const std::string& method, const std::string& model,
                         size_t m_star) const;
};

MetricSummary Summarize(const std::string& metric, std::span<const double> values);

// Per (method, model, m_star) cell: rmse, recall_overall, recall_<pattern>
// and auuc when present. Failed trials are counted but not averaged.
ExperimentReport Aggregate(std::span<const TrialResult> trials);

// One-sample t statistic of paired differences a[i] - b[i].
double PairedTStatistic(std::span<const double> a, std::span<const double> b);

}  // namespace upliftfs

#endif  // UPLIFTFS_EVALUATION_H_
