#ifndef UPLIFTFS_UPLIFT_FOREST_H_
#define UPLIFTFS_UPLIFT_FOREST_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "upliftfs/dataset.h"
#include "upliftfs/divergence.h"
#include "upliftfs/forest.h"

namespace upliftfs {

struct UpliftForestConfig {
  DivergenceKind kind = DivergenceKind::kKL;
  // min_samples_leaf applies to each arm inside each child.
  ForestConfig forest;
  // Thresholds tried per feature and node: every boundary between distinct
  // values when there are at most this many, otherwise a quantile grid of
  // this size.
  int max_threshold_candidates = 20;
  // Weight each split's gain by its node's share of the root sample in the
  // embedded importance. Off by default (plain sum of gains).
  bool size_weighted_importance = false;

  void Validate() const;
};

// Gain in treatment/control divergence of a binary split:
//   D(P_left:Q_left) + D(P_right:Q_right) - D(P:Q).
// The child terms are not weighted by size.
double SplitGain(DivergenceKind kind, std::span<const double> parent_p,
                 std::span<const double> parent_q, std::span<const double> left_p,
                 std::span<const double> left_q, std::span<const double> right_p,
                 std::span<const double> right_q);

struct UpliftNode {
  int feature = -1;
  double threshold = 0.0;  // x <= threshold goes left
  int left = -1;
  int right = -1;
  double gain = 0.0;
  size_t n_treat = 0;
  size_t n_control = 0;
  std::vector<double> p_treat;    // smoothed class proportions
  std::vector<double> q_control;  // smoothed class proportions
  double uplift = 0.0;            // p_treat[1] - q_control[1]

  bool is_leaf() const { return feature < 0; }
};

struct UpliftTree {
  std::vector<UpliftNode> nodes;

  const UpliftNode& Leaf(std::span<const double> x) const;
  int Depth() const;
};

struct UpliftForest {
  UpliftForestConfig config;
  std::vector<std::string> feature_names;
  int num_classes = 2;
  std::vector<UpliftTree> trees;

  size_t num_features() const { return feature_names.size(); }

  // Mean leaf uplift over trees, in [-1, 1].
  double PredictUplift(std::span<const double> x) const;
  std::vector<double> PredictUplift(const Dataset& data) const;
  // Per-feature sum of split gains over all trees, scaled to sum 1.
  std::vector<double> EmbeddedImportance() const;
};

// Uplift tree per bootstrap sample (resampled within each arm). A split is
// kept only when its gain exceeds D(P:Q) of the node, i.e. the children are
// more divergent in total than two copies of the parent.
UpliftForest FitUpliftForest(const Dataset& data, const UpliftForestConfig& config);

// Leaf statistics from raw per-arm class counts.
UpliftNode MakeUpliftLeaf(std::span<const double> treat_counts,
                          std::span<const double> control_counts);

}  // namespace upliftfs

#endif  // UPLIFTFS_UPLIFT_FOREST_H_
