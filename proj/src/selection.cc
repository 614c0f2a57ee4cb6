#include "upliftfs/selection.h"

#include "upliftfs/error.h"
#include "upliftfs/meta_learners.h"
#include "upliftfs/uplift_forest.h"

namespace upliftfs {

std::string SelectionName(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::kF:
      return "f";
    case SelectionMethod::kLR:
      return "lr";
    case SelectionMethod::kKL:
      return "kl";
    case SelectionMethod::kED:
      return "ed";
    case SelectionMethod::kChi:
      return "chi";
    case SelectionMethod::kUpliftForest:
      return "uplift-forest";
    case SelectionMethod::kTwoModel:
      return "two-model";
    case SelectionMethod::kOutcome:
      return "outcome";
  }
  return "f";
}

SelectionMethod ParseSelection(const std::string& name) {
  for (SelectionMethod m : AllSelectionMethods()) {
    if (SelectionName(m) == name) return m;
  }
  throw Error("unknown selection method '" + name + "'");
}

const std::vector<SelectionMethod>& AllSelectionMethods() {
  static const std::vector<SelectionMethod> all = {
      SelectionMethod::kF,           SelectionMethod::kLR,
      SelectionMethod::kKL,          SelectionMethod::kED,
      SelectionMethod::kChi,         SelectionMethod::kUpliftForest,
      SelectionMethod::kTwoModel,    SelectionMethod::kOutcome};
  return all;
}

bool IsBinMethod(SelectionMethod method) {
  return method == SelectionMethod::kKL || method == SelectionMethod::kED ||
         method == SelectionMethod::kChi;
}

FeatureRanking RankFeatures(const Dataset& data, SelectionMethod method,
                            const SelectionOptions& options) {
  std::vector<double> scores;
  switch (method) {
    case SelectionMethod::kF:
      return RankAll(data, FilterMethod::kF, options.num_bins);
    case SelectionMethod::kLR:
      return RankAll(data, FilterMethod::kLR, options.num_bins);
    case SelectionMethod::kKL:
      return RankAll(data, FilterMethod::kKL, options.num_bins);
    case SelectionMethod::kED:
      return RankAll(data, FilterMethod::kED, options.num_bins);
    case SelectionMethod::kChi:
      return RankAll(data, FilterMethod::kChi, options.num_bins);
    case SelectionMethod::kUpliftForest: {
      UpliftForestConfig cfg;
      cfg.kind = options.uplift_kind;
      cfg.forest = options.forest;
      scores = FitUpliftForest(data, cfg).EmbeddedImportance();
      break;
    }
    case SelectionMethod::kTwoModel:
      scores = TwoModelEmbeddedImportance(FitTwoModel(data, options.forest));
      break;
    case SelectionMethod::kOutcome:
      scores = OutcomeEmbeddedImportance(data, options.forest,
                                         options.outcome_include_treatment);
      break;
  }
  return FeatureRanking::FromScores(std::move(scores), SelectionName(method));
}

}  // namespace upliftfs
