#include "upliftfs/forest.h"

#include <algorithm>
#include <numeric>

#include "upliftfs/error.h"

namespace upliftfs {

void ForestConfig::Validate() const {
  if (n_trees < 1) throw Error("n_trees must be >= 1");
  if (max_depth < 1) throw Error("max_depth must be >= 1");
  if (min_samples_leaf < 1) throw Error("min_samples_leaf must be >= 1");
  if (max_features_per_split < 1) {
    throw Error("max_features_per_split must be >= 1");
  }
}

ForestConfig ForestConfig::Resolve(size_t num_features) const {
  ForestConfig out = *this;
  out.max_features_per_split = static_cast<int>(
      std::min<size_t>(static_cast<size_t>(max_features_per_split), num_features));
  return out;
}

double Gini(std::span<const double> proportions) {
  double s = 0.0;
  for (double p : proportions) s += p * p;
  return 1.0 - s;
}

const TreeNode& DecisionTree::Leaf(std::span<const double> x) const {
  const TreeNode* node = &nodes[0];
  while (!node->is_leaf()) {
    node = &nodes[x[node->feature] <= node->threshold ? node->left : node->right];
  }
  return *node;
}

int DecisionTree::Depth() const {
  std::vector<int> depth(nodes.size(), 0);
  int max_depth = 0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    max_depth = std::max(max_depth, depth[i]);
    if (!nodes[i].is_leaf()) {
      depth[nodes[i].left] = depth[i] + 1;
      depth[nodes[i].right] = depth[i] + 1;
    }
  }
  return max_depth;
}

std::vector<double> StandardForest::PredictProba(
    std::span<const double> x) const {
  if (x.size() != num_features()) {
    throw Error("prediction input has " + std::to_string(x.size()) +
                " features, model expects " + std::to_string(num_features()));
  }
  std::vector<double> out(num_classes, 0.0);
  for (const auto& tree : trees) {
    const auto& value = tree.Leaf(x).value;
    for (int c = 0; c < num_classes; ++c) out[c] += value[c];
  }
  for (double& v : out) v /= static_cast<double>(trees.size());
  return out;
}

std::vector<double> StandardForest::MdiImportance() const {
  std::vector<double> importance(num_features(), 0.0);
  for (const auto& tree : trees) {
    for (const auto& node : tree.nodes) {
      if (!node.is_leaf()) importance[node.feature] += node.impurity_decrease;
    }
  }
  double total = 0.0;
  for (double& v : importance) {
    v /= static_cast<double>(trees.size());
    total += v;
  }
  if (total > 0.0) {
    for (double& v : importance) v /= total;
  }
  return importance;
}

namespace internal {

std::vector<size_t> SampleFeatures(size_t m, size_t k, RandomEngine& rng) {
  std::vector<size_t> pool(m);
  std::iota(pool.begin(), pool.end(), 0);
  k = std::min(k, m);
  for (size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<size_t> pick(i, m - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace internal

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const ForestConfig& config, RandomEngine& rng)
      : data_(data), config_(config), rng_(rng), classes_(data.num_classes()) {}

  DecisionTree Build(std::vector<size_t> rows) {
    root_size_ = static_cast<double>(rows.size());
    Grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;  // unweighted Gini decrease at the node
  };

  std::vector<double> ClassCounts(const std::vector<size_t>& rows) const {
    std::vector<double> counts(classes_, 0.0);
    for (size_t r : rows) counts[data_.outcome()[r]] += 1.0;
    return counts;
  }

  static double GiniOfCounts(const std::vector<double>& counts, double total) {
    double s = 0.0;
    for (double c : counts) s += (c / total) * (c / total);
    return 1.0 - s;
  }

  Split FindSplit(const std::vector<size_t>& rows,
                  const std::vector<double>& counts, double parent_gini) {
    Split best;
    const size_t n = rows.size();
    const size_t min_leaf = static_cast<size_t>(config_.min_samples_leaf);
    const auto features = internal::SampleFeatures(
        data_.num_features(), static_cast<size_t>(config_.max_features_per_split),
        rng_);
    std::vector<std::pair<double, int>> pairs(n);
    std::vector<double> left(classes_);
    for (size_t f : features) {
      const auto x = data_.feature(f);
      for (size_t i = 0; i < n; ++i) {
        pairs[i] = {x[rows[i]], data_.outcome()[rows[i]]};
      }
      std::sort(pairs.begin(), pairs.end());
      std::fill(left.begin(), left.end(), 0.0);
      for (size_t i = 0; i + 1 < n; ++i) {
        left[pairs[i].second] += 1.0;
        const size_t n_left = i + 1;
        if (pairs[i].first == pairs[i + 1].first) continue;
        if (n_left < min_leaf || n - n_left < min_leaf) continue;
        const double nl = static_cast<double>(n_left);
        const double nr = static_cast<double>(n - n_left);
        double sl = 0.0, sr = 0.0;
        for (int c = 0; c < classes_; ++c) {
          const double r = counts[c] - left[c];
          sl += (left[c] / nl) * (left[c] / nl);
          sr += (r / nr) * (r / nr);
        }
        const double child =
            (nl * (1.0 - sl) + nr * (1.0 - sr)) / static_cast<double>(n);
        const double decrease = parent_gini - child;
        if (decrease > best.decrease + 1e-12) {
          double threshold = 0.5 * (pairs[i].first + pairs[i + 1].first);
          if (!(threshold < pairs[i + 1].first)) threshold = pairs[i].first;
          best = {static_cast<int>(f), threshold, decrease};
        }
      }
    }
    return best;
  }

  int Grow(std::vector<size_t> rows, int depth) {
    const int index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const std::vector<double> counts = ClassCounts(rows);
    const double n = static_cast<double>(rows.size());
    {
      TreeNode& node = tree_.nodes[index];
      node.n_samples = rows.size();
      node.value.resize(classes_);
      for (int c = 0; c < classes_; ++c) node.value[c] = counts[c] / n;
    }
    const double gini = GiniOfCounts(counts, n);
    if (depth >= config_.max_depth || gini <= 0.0 ||
        rows.size() < 2 * static_cast<size_t>(config_.min_samples_leaf)) {
      return index;
    }
    const Split split = FindSplit(rows, counts, gini);
    if (split.feature < 0) return index;

    std::vector<size_t> left_rows, right_rows;
    const auto x = data_.feature(split.feature);
    for (size_t r : rows) {
      (x[r] <= split.threshold ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    tree_.nodes[index].feature = split.feature;
    tree_.nodes[index].threshold = split.threshold;
    tree_.nodes[index].impurity_decrease = n * split.decrease / root_size_;
    const int left = Grow(std::move(left_rows), depth + 1);
    const int right = Grow(std::move(right_rows), depth + 1);
    tree_.nodes[index].left = left;
    tree_.nodes[index].right = right;
    return index;
  }

  const Dataset& data_;
  const ForestConfig& config_;
  RandomEngine& rng_;
  const int classes_;
  double root_size_ = 1.0;
  DecisionTree tree_;
};

}  // namespace

StandardForest FitForest(const Dataset& data, const ForestConfig& config) {
  config.Validate();
  const ForestConfig resolved = config.Resolve(data.num_features());
  StandardForest forest;
  forest.config = resolved;
  forest.feature_names = data.feature_names();
  forest.num_classes = data.num_classes();
  const size_t n = data.num_rows();
  for (int t = 0; t < resolved.n_trees; ++t) {
    RandomEngine rng(DeriveSeed(resolved.seed, static_cast<uint64_t>(t)));
    std::vector<size_t> rows(n);
    if (resolved.bootstrap) {
      std::uniform_int_distribution<size_t> pick(0, n - 1);
      for (size_t& r : rows) r = pick(rng);
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    forest.trees.push_back(TreeBuilder(data, resolved, rng).Build(std::move(rows)));
  }
  return forest;
}

}  // namespace upliftfs
