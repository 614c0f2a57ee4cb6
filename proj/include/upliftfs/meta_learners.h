#ifndef UPLIFTFS_META_LEARNERS_H_
#define UPLIFTFS_META_LEARNERS_H_

#include <span>
#include <vector>

#include "upliftfs/dataset.h"
#include "upliftfs/forest.h"

namespace upliftfs {

// T-learner: one outcome classifier per arm; the ITE estimate is the
// difference of their positive-class probabilities.
struct TwoModelLearner {
  StandardForest model_treat;
  StandardForest model_control;

  size_t num_features() const { return model_treat.num_features(); }
  double PredictIte(std::span<const double> x) const;
  std::vector<double> PredictIte(const Dataset& data) const;
};

// Each arm's forest is seeded from (config.seed, arm tag).
TwoModelLearner FitTwoModel(const Dataset& data, const ForestConfig& config);

// Sum of the two sub-models' MDI vectors, rescaled to sum 1.
std::vector<double> TwoModelEmbeddedImportance(const TwoModelLearner& learner);

// MDI of a single outcome forest on all rows. With include_treatment the
// treatment flag is offered to the forest as an extra feature and its share is
// dropped before rescaling.
std::vector<double> OutcomeEmbeddedImportance(const Dataset& data,
                                              const ForestConfig& config,
                                              bool include_treatment = false);

}  // namespace upliftfs

#endif  // UPLIFTFS_META_LEARNERS_H_
