#include "upliftfs/meta_learners.h"

#include <algorithm>

#include "upliftfs/error.h"
#include "upliftfs/random.h"

namespace upliftfs {
namespace {

void Normalize(std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x;
  if (total > 0.0) {
    for (double& x : v) x /= total;
  }
}

}  // namespace

double TwoModelLearner::PredictIte(std::span<const double> x) const {
  return model_treat.PredictProba(x)[1] - model_control.PredictProba(x)[1];
}

std::vector<double> TwoModelLearner::PredictIte(const Dataset& data) const {
  std::vector<double> out(data.num_rows());
  for (size_t i = 0; i < data.num_rows(); ++i) out[i] = PredictIte(data.Row(i));
  return out;
}

TwoModelLearner FitTwoModel(const Dataset& data, const ForestConfig& config) {
  if (!data.HasBothArms()) throw Error("two-model learner needs both arms");
  ForestConfig treat_cfg = config;
  treat_cfg.seed = DeriveSeed(config.seed, "treatment");
  ForestConfig control_cfg = config;
  control_cfg.seed = DeriveSeed(config.seed, "control");
  return TwoModelLearner{FitForest(data.ArmRows(1), treat_cfg),
                         FitForest(data.ArmRows(0), control_cfg)};
}

std::vector<double> TwoModelEmbeddedImportance(const TwoModelLearner& learner) {
  std::vector<double> sum = learner.model_treat.MdiImportance();
  const std::vector<double> control = learner.model_control.MdiImportance();
  for (size_t j = 0; j < sum.size(); ++j) sum[j] += control[j];
  Normalize(sum);
  return sum;
}

std::vector<double> OutcomeEmbeddedImportance(const Dataset& data,
                                              const ForestConfig& config,
                                              bool include_treatment) {
  if (!include_treatment) return FitForest(data, config).MdiImportance();

  std::vector<std::string> names = data.feature_names();
  std::vector<std::vector<double>> columns;
  for (size_t j = 0; j < data.num_features(); ++j) {
    const auto col = data.feature(j);
    columns.emplace_back(col.begin(), col.end());
  }
  std::string flag = "__treatment__";
  while (std::find(names.begin(), names.end(), flag) != names.end()) flag += "_";
  names.push_back(flag);
  columns.emplace_back(data.treatment().begin(), data.treatment().end());
  const Dataset augmented(std::move(names), std::move(columns),
                          {data.treatment().begin(), data.treatment().end()},
                          {data.outcome().begin(), data.outcome().end()},
                          data.num_classes());
  std::vector<double> importance = FitForest(augmented, config).MdiImportance();
  importance.pop_back();
  Normalize(importance);
  return importance;
}

}  // namespace upliftfs
