#ifndef UPLIFTFS_MODEL_IO_H_
#define UPLIFTFS_MODEL_IO_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "upliftfs/dataset.h"
#include "upliftfs/forest.h"
#include "upliftfs/meta_learners.h"
#include "upliftfs/synthetic.h"
#include "upliftfs/uplift_forest.h"

namespace upliftfs {

// Bumped on any incompatible change to the model documents below.
inline constexpr int kModelFormatVersion = 1;

nlohmann::json ForestConfigToJson(const ForestConfig& config);
ForestConfig ForestConfigFromJson(const nlohmann::json& j,
                                  const ForestConfig& defaults = {});

nlohmann::json ForestToJson(const StandardForest& forest);
StandardForest ForestFromJson(const nlohmann::json& j);

nlohmann::json UpliftForestToJson(const UpliftForest& forest);
UpliftForest UpliftForestFromJson(const nlohmann::json& j);

// A fitted ITE model of either family, as written by `train`.
struct UpliftModel {
  std::string kind;  // "two-model" or "uplift-forest"
  std::optional<TwoModelLearner> two_model;
  std::optional<UpliftForest> uplift_forest;

  const std::vector<std::string>& feature_names() const;
  // Looks the model's features up by name in `data`.
  std::vector<double> PredictIte(const Dataset& data) const;
};

nlohmann::json ModelToJson(const UpliftModel& model);
UpliftModel ModelFromJson(const nlohmann::json& j);
void SaveModel(const UpliftModel& model, const std::string& path);
UpliftModel LoadModel(const std::string& path);

nlohmann::json DgpConfigToJson(const DgpConfig& config);
DgpConfig DgpConfigFromJson(const nlohmann::json& j,
                            const DgpConfig& defaults = {});

// Ground truth that accompanies a generated CSV.
struct SyntheticSidecar {
  std::vector<std::string> feature_names;
  std::vector<FeatureRole> roles;
  std::vector<std::optional<TransformKind>> patterns;
  std::vector<double> true_ite;
  DgpConfig config;
};

nlohmann::json SidecarToJson(const SyntheticDataset& data);
SyntheticSidecar SidecarFromJson(const nlohmann::json& j);

nlohmann::json ReadJsonFile(const std::string& path);
// Writes to a temporary file and renames it into place.
void WriteTextFile(const std::string& path, const std::string& contents);

}  // namespace upliftfs

#endif  // UPLIFTFS_MODEL_IO_H_
