#include "upliftfs/uplift_forest.h"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "upliftfs/error.h"
#include "upliftfs/random.h"

namespace upliftfs {

void UpliftForestConfig::Validate() const {
  forest.Validate();
  if (max_threshold_candidates < 1) {
    throw Error("max_threshold_candidates must be >= 1");
  }
}

double SplitGain(DivergenceKind kind, std::span<const double> parent_p,
                 std::span<const double> parent_q, std::span<const double> left_p,
                 std::span<const double> left_q, std::span<const double> right_p,
                 std::span<const double> right_q) {
  return Divergence(kind, left_p, left_q) + Divergence(kind, right_p, right_q) -
         Divergence(kind, parent_p, parent_q);
}

UpliftNode MakeUpliftLeaf(std::span<const double> treat_counts,
                          std::span<const double> control_counts) {
  UpliftNode node;
  double nt = 0.0, nc = 0.0;
  for (double c : treat_counts) nt += c;
  for (double c : control_counts) nc += c;
  node.n_treat = static_cast<size_t>(nt);
  node.n_control = static_cast<size_t>(nc);
  node.p_treat = SmoothedProportions(treat_counts);
  node.q_control = SmoothedProportions(control_counts);
  node.uplift = node.p_treat[1] - node.q_control[1];
  return node;
}

const UpliftNode& UpliftTree::Leaf(std::span<const double> x) const {
  const UpliftNode* node = &nodes[0];
  while (!node->is_leaf()) {
    node = &nodes[x[node->feature] <= node->threshold ? node->left : node->right];
  }
  return *node;
}

int UpliftTree::Depth() const {
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

double UpliftForest::PredictUplift(std::span<const double> x) const {
  if (x.size() != num_features()) {
    throw Error("prediction input has " + std::to_string(x.size()) +
                " features, model expects " + std::to_string(num_features()));
  }
  double sum = 0.0;
  for (const auto& tree : trees) sum += tree.Leaf(x).uplift;
  return sum / static_cast<double>(trees.size());
}

std::vector<double> UpliftForest::PredictUplift(const Dataset& data) const {
  std::vector<double> out(data.num_rows());
  for (size_t i = 0; i < data.num_rows(); ++i) {
    out[i] = PredictUplift(data.Row(i));
  }
  return out;
}

std::vector<double> UpliftForest::EmbeddedImportance() const {
  std::vector<double> importance(num_features(), 0.0);
  for (const auto& tree : trees) {
    const double root = static_cast<double>(tree.nodes[0].n_treat +
                                            tree.nodes[0].n_control);
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) continue;
      double g = node.gain;
      if (config.size_weighted_importance) {
        g *= static_cast<double>(node.n_treat + node.n_control) / root;
      }
      importance[node.feature] += g;
    }
  }
  double total = 0.0;
  for (double v : importance) total += v;
  if (total > 0.0) {
    for (double& v : importance) v /= total;
  }
  return importance;
}

namespace {

class UpliftTreeBuilder {
 public:
  UpliftTreeBuilder(const Dataset& data, const UpliftForestConfig& config,
                    RandomEngine& rng)
      : data_(data),
        config_(config),
        rng_(rng),
        classes_(data.num_classes()),
        min_leaf_(static_cast<size_t>(config.forest.min_samples_leaf)) {}

  UpliftTree Build(std::vector<size_t> rows) {
    Grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  struct Counts {
    std::vector<double> treat, control;
    double n_treat = 0.0, n_control = 0.0;
  };

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  struct Entry {
    double x;
    int arm;
    int label;
    bool operator<(const Entry& o) const {
      return std::tie(x, arm, label) < std::tie(o.x, o.arm, o.label);
    }
  };

  Counts Count(const std::vector<size_t>& rows) const {
    Counts c{std::vector<double>(classes_, 0.0),
             std::vector<double>(classes_, 0.0)};
    for (size_t r : rows) {
      if (data_.treatment()[r] == 1) {
        c.treat[data_.outcome()[r]] += 1.0;
        c.n_treat += 1.0;
      } else {
        c.control[data_.outcome()[r]] += 1.0;
        c.n_control += 1.0;
      }
    }
    return c;
  }

  // Left-child sizes (number of sorted rows) at which to evaluate a split.
  std::vector<size_t> Candidates(const std::vector<Entry>& sorted) const {
    std::vector<size_t> boundaries;
    for (size_t i = 0; i + 1 < sorted.size(); ++i) {
      if (sorted[i].x < sorted[i + 1].x) boundaries.push_back(i + 1);
    }
    const size_t grid = static_cast<size_t>(config_.max_threshold_candidates);
    if (boundaries.size() <= grid) return boundaries;
    std::vector<size_t> picked;
    const size_t n = sorted.size();
    for (size_t j = 1; j <= grid; ++j) {
      const size_t target = std::max<size_t>(1, j * n / (grid + 1));
      auto it = std::lower_bound(boundaries.begin(), boundaries.end(), target);
      if (it == boundaries.end()) break;
      if (picked.empty() || *it > picked.back()) picked.push_back(*it);
    }
    return picked;
  }

  Split FindSplit(const std::vector<size_t>& rows, const Counts& parent,
                  double parent_divergence) {
    const DivergenceKind kind = config_.kind;
    const auto parent_p = SmoothedProportions(parent.treat);
    const auto parent_q = SmoothedProportions(parent.control);
    const auto features = internal::SampleFeatures(
        data_.num_features(),
        static_cast<size_t>(config_.forest.max_features_per_split), rng_);

    Split best;
    best.gain = parent_divergence + 1e-12;  // acceptance floor
    std::vector<Entry> sorted(rows.size());
    std::vector<double> lt(classes_), lc(classes_), rt(classes_), rc(classes_);
    for (size_t f : features) {
      const auto x = data_.feature(f);
      for (size_t i = 0; i < rows.size(); ++i) {
        sorted[i] = {x[rows[i]], data_.treatment()[rows[i]],
                     data_.outcome()[rows[i]]};
      }
      std::sort(sorted.begin(), sorted.end());
      const std::vector<size_t> candidates = Candidates(sorted);
      std::fill(lt.begin(), lt.end(), 0.0);
      std::fill(lc.begin(), lc.end(), 0.0);
      double nlt = 0.0, nlc = 0.0;
      size_t consumed = 0;
      for (size_t left_size : candidates) {
        for (; consumed < left_size; ++consumed) {
          const Entry& e = sorted[consumed];
          if (e.arm == 1) {
            lt[e.label] += 1.0;
            nlt += 1.0;
          } else {
            lc[e.label] += 1.0;
            nlc += 1.0;
          }
        }
        const double min_leaf = static_cast<double>(min_leaf_);
        if (nlt < min_leaf || nlc < min_leaf ||
            parent.n_treat - nlt < min_leaf ||
            parent.n_control - nlc < min_leaf) {
          continue;
        }
        for (int c = 0; c < classes_; ++c) {
          rt[c] = parent.treat[c] - lt[c];
          rc[c] = parent.control[c] - lc[c];
        }
        const double gain =
            SplitGain(kind, parent_p, parent_q, SmoothedProportions(lt),
                      SmoothedProportions(lc), SmoothedProportions(rt),
                      SmoothedProportions(rc));
        if (gain > best.gain) {
          double threshold =
              0.5 * (sorted[left_size - 1].x + sorted[left_size].x);
          if (!(threshold < sorted[left_size].x)) {
            threshold = sorted[left_size - 1].x;
          }
          best = {static_cast<int>(f), threshold, gain};
        }
      }
    }
    return best;
  }

  int Grow(std::vector<size_t> rows, int depth) {
    const int index = static_cast<int>(tree_.nodes.size());
    const Counts counts = Count(rows);
    tree_.nodes.push_back(MakeUpliftLeaf(counts.treat, counts.control));
    const double min_leaf = static_cast<double>(min_leaf_);
    if (depth >= config_.forest.max_depth ||
        counts.n_treat < 2.0 * min_leaf || counts.n_control < 2.0 * min_leaf) {
      return index;
    }
    const double parent_divergence =
        Divergence(config_.kind, tree_.nodes[index].p_treat,
                   tree_.nodes[index].q_control);
    const Split split = FindSplit(rows, counts, parent_divergence);
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
    tree_.nodes[index].gain = split.gain;
    const int left = Grow(std::move(left_rows), depth + 1);
    const int right = Grow(std::move(right_rows), depth + 1);
    tree_.nodes[index].left = left;
    tree_.nodes[index].right = right;
    return index;
  }

  const Dataset& data_;
  const UpliftForestConfig& config_;
  RandomEngine& rng_;
  const int classes_;
  const size_t min_leaf_;
  UpliftTree tree_;
};

}  // namespace

UpliftForest FitUpliftForest(const Dataset& data,
                             const UpliftForestConfig& config) {
  config.Validate();
  data.RequireBothArms();
  UpliftForestConfig resolved = config;
  resolved.forest = config.forest.Resolve(data.num_features());

  std::vector<size_t> treated, control;
  for (size_t i = 0; i < data.num_rows(); ++i) {
    (data.treatment()[i] == 1 ? treated : control).push_back(i);
  }

  UpliftForest forest;
  forest.config = resolved;
  forest.feature_names = data.feature_names();
  forest.num_classes = data.num_classes();
  for (int t = 0; t < resolved.forest.n_trees; ++t) {
    RandomEngine rng(DeriveSeed(resolved.forest.seed, static_cast<uint64_t>(t)));
    std::vector<size_t> rows;
    if (resolved.forest.bootstrap) {
      rows.reserve(data.num_rows());
      for (const auto* arm : {&treated, &control}) {
        std::uniform_int_distribution<size_t> pick(0, arm->size() - 1);
        for (size_t k = 0; k < arm->size(); ++k) rows.push_back((*arm)[pick(rng)]);
      }
      std::sort(rows.begin(), rows.end());
    } else {
      rows.resize(data.num_rows());
      std::iota(rows.begin(), rows.end(), 0);
    }
    forest.trees.push_back(
        UpliftTreeBuilder(data, resolved, rng).Build(std::move(rows)));
  }
  return forest;
}

}  // namespace upliftfs
