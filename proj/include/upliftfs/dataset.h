#ifndef UPLIFTFS_DATASET_H_
#define UPLIFTFS_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace upliftfs {

// Randomized-experiment data: a column-major feature matrix, a binary
// treatment indicator (1 = treatment, 0 = control) and a class-coded outcome
// in 0..num_classes-1. Immutable after construction.
class Dataset {
 public:
  // Validates every invariant and throws upliftfs::Error on violation.
  // `num_classes` of 0 means max(2, max outcome + 1).
  Dataset(std::vector<std::string> feature_names,
          std::vector<std::vector<double>> columns, std::vector<int> treatment,
          std::vector<int> outcome, int num_classes = 0);

  size_t num_rows() const { return treatment_.size(); }
  size_t num_features() const { return columns_.size(); }
  int num_classes() const { return num_classes_; }

  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  std::span<const double> feature(size_t j) const { return columns_[j]; }
  double value(size_t row, size_t j) const { return columns_[j][row]; }
  std::span<const int> treatment() const { return treatment_; }
  std::span<const int> outcome() const { return outcome_; }

  std::vector<double> Row(size_t row) const;

  size_t num_treated() const { return num_treated_; }
  size_t num_control() const { return num_rows() - num_treated_; }
  bool HasBothArms() const { return num_treated_ > 0 && num_control() > 0; }
  // Throws unless both arms are present; scoring and uplift fitting need it.
  void RequireBothArms() const;

  // Row subset in the given order. Keeps num_classes.
  Dataset SelectRows(std::span<const size_t> rows) const;
  // Column subset in the given order.
  Dataset SelectFeatures(std::span<const size_t> features) const;
  // Rows of one arm, in file order.
  Dataset ArmRows(int arm) const;

  // Index of a feature by name, or throws.
  size_t FeatureIndex(const std::string& name) const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<std::vector<double>> columns_;
  std::vector<int> treatment_;
  std::vector<int> outcome_;
  int num_classes_ = 2;
  size_t num_treated_ = 0;
};

struct SplitPair {
  Dataset train;
  Dataset test;
  uint64_t seed = 0;
  std::vector<size_t> train_rows;
  std::vector<size_t> test_rows;
  // Non-fatal findings, e.g. a half that lacks one treatment arm.
  std::vector<std::string> warnings;
};

// Reads a comma-separated file with one header row. Every column other than
// the treatment and outcome columns becomes a feature, in file order.
Dataset LoadCsv(const std::string& path, const std::string& treatment_col,
                const std::string& outcome_col);

// Writes features followed by the treatment and outcome columns. Reals are
// printed with 17 significant digits so a reload is exact.
void WriteCsv(const Dataset& data, const std::string& path,
              const std::string& treatment_col = "w",
              const std::string& outcome_col = "y");

// Uniformly random row partition. The test half has round(n * fraction) rows
// clamped to [1, n - 1]; both halves keep the original row order.
SplitPair TrainTestSplit(const Dataset& data, double test_fraction,
                         uint64_t seed);

// Per-feature scores with a total order: descending score, ties broken by
// ascending feature index.
struct FeatureRanking {
  std::vector<double> scores;
  std::vector<size_t> order;
  std::string method_name;
  std::vector<std::string> diagnostics;

  static FeatureRanking FromScores(std::vector<double> scores,
                                   std::string method_name);

  // First k entries of `order` (all of them if k exceeds m).
  std::vector<size_t> Top(size_t k) const;
  // 1-based rank of each feature.
  std::vector<size_t> Ranks() const;
};

}  // namespace upliftfs

#endif  // UPLIFTFS_DATASET_H_
