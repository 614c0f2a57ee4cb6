#ifndef UPLIFTFS_FOREST_H_
#define UPLIFTFS_FOREST_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "upliftfs/dataset.h"
#include "upliftfs/random.h"

namespace upliftfs {

struct ForestConfig {
  int n_trees = 10;
  int max_depth = 10;
  // A split is kept only if both children hold at least this many rows.
  int min_samples_leaf = 100;
  int max_features_per_split = 3;
  uint64_t seed = 0;
  bool bootstrap = true;

  // Throws on invalid values. max_features_per_split is checked against m
  // after Resolve().
  void Validate() const;
  // Copy whose max_features_per_split is capped at the feature count.
  ForestConfig Resolve(size_t num_features) const;
};

// 1 - sum p_i^2.
double Gini(std::span<const double> proportions);

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;  // rows with x <= threshold go left
  int left = -1;
  int right = -1;
  size_t n_samples = 0;
  // Weighted Gini decrease of the split:
  //   n_node * gini(node) - n_left * gini(left) - n_right * gini(right),
  // divided by the tree's root size.
  double impurity_decrease = 0.0;
  std::vector<double> value;  // class proportions of the node's rows

  bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& Leaf(std::span<const double> x) const;
  int Depth() const;
};

struct StandardForest {
  ForestConfig config;
  std::vector<std::string> feature_names;
  int num_classes = 2;
  std::vector<DecisionTree> trees;

  size_t num_features() const { return feature_names.size(); }

  // Mean of the trees' leaf class proportions.
  std::vector<double> PredictProba(std::span<const double> x) const;
  // Mean decrease in impurity per feature, averaged over trees and scaled to
  // sum 1. All zeros when no tree has a split.
  std::vector<double> MdiImportance() const;
};

// CART classifier forest on the dataset's features with the outcome as the
// label. The treatment column is not used.
StandardForest FitForest(const Dataset& data, const ForestConfig& config);

namespace internal {

// k distinct indices from 0..m-1, ascending.
std::vector<size_t> SampleFeatures(size_t m, size_t k, RandomEngine& rng);

}  // namespace internal

}  // namespace upliftfs

#endif  // UPLIFTFS_FOREST_H_
