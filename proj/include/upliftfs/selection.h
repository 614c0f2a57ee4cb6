#ifndef UPLIFTFS_SELECTION_H_
#define UPLIFTFS_SELECTION_H_

#include <string>
#include <vector>

#include "upliftfs/dataset.h"
#include "upliftfs/divergence.h"
#include "upliftfs/filters.h"
#include "upliftfs/forest.h"

namespace upliftfs {

// Every feature ranking method: the five filters, the two uplift embedded
// methods and the outcome-forest benchmark.
enum class SelectionMethod {
  kF,
  kLR,
  kKL,
  kED,
  kChi,
  kUpliftForest,  // uplift random forest split gains
  kTwoModel,      // summed MDI of the two T-learner forests
  kOutcome,       // MDI of a plain outcome classifier
};

// "f", "lr", "kl", "ed", "chi", "uplift-forest", "two-model", "outcome".
std::string SelectionName(SelectionMethod method);
SelectionMethod ParseSelection(const std::string& name);
const std::vector<SelectionMethod>& AllSelectionMethods();
bool IsBinMethod(SelectionMethod method);

struct SelectionOptions {
  int num_bins = kDefaultBins;
  ForestConfig forest;
  DivergenceKind uplift_kind = DivergenceKind::kKL;
  bool outcome_include_treatment = false;
};

FeatureRanking RankFeatures(const Dataset& data, SelectionMethod method,
                            const SelectionOptions& options = {});

}  // namespace upliftfs

#endif  // UPLIFTFS_SELECTION_H_
