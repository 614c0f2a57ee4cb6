#include "upliftfs/filters.h"

#include <cmath>

#include "upliftfs/binning.h"
#include "upliftfs/error.h"
#include "upliftfs/regression.h"

namespace upliftfs {
namespace {

// Columns 1, w, x and (optionally) w*x.
Eigen::MatrixXd InteractionDesign(const Dataset& data, size_t feature,
                                  bool with_interaction) {
  const long n = static_cast<long>(data.num_rows());
  Eigen::MatrixXd design(n, with_interaction ? 4 : 3);
  const auto x = data.feature(feature);
  const auto w = data.treatment();
  for (long i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = w[i];
    design(i, 2) = x[i];
    if (with_interaction) design(i, 3) = w[i] * x[i];
  }
  return design;
}

Eigen::VectorXd OutcomeVector(const Dataset& data) {
  Eigen::VectorXd y(static_cast<long>(data.num_rows()));
  const auto out = data.outcome();
  for (long i = 0; i < y.size(); ++i) y[i] = out[i];
  return y;
}

void Note(std::vector<std::string>* diagnostics, const Dataset& data,
          size_t feature, const std::string& message) {
  if (diagnostics != nullptr) {
    diagnostics->push_back(data.feature_names()[feature] + ": " + message);
  }
}

}  // namespace

std::string FilterName(FilterMethod method) {
  switch (method) {
    case FilterMethod::kF:
      return "f";
    case FilterMethod::kLR:
      return "lr";
    case FilterMethod::kKL:
      return "kl";
    case FilterMethod::kED:
      return "ed";
    case FilterMethod::kChi:
      return "chi";
  }
  return "f";
}

FilterMethod ParseFilter(const std::string& name) {
  if (name == "f") return FilterMethod::kF;
  if (name == "lr") return FilterMethod::kLR;
  if (name == "kl") return FilterMethod::kKL;
  if (name == "ed") return FilterMethod::kED;
  if (name == "chi") return FilterMethod::kChi;
  throw Error("unknown filter method '" + name + "'");
}

bool IsBinFilter(FilterMethod method) {
  return method == FilterMethod::kKL || method == FilterMethod::kED ||
         method == FilterMethod::kChi;
}

DivergenceKind FilterDivergence(FilterMethod method) {
  switch (method) {
    case FilterMethod::kED:
      return DivergenceKind::kED;
    case FilterMethod::kChi:
      return DivergenceKind::kChi;
    default:
      return DivergenceKind::kKL;
  }
}

double BinFilterScore(const Dataset& data, size_t feature, DivergenceKind kind,
                      int num_bins, std::vector<std::string>* diagnostics) {
  const BinTable table = BinFeature(data, feature, num_bins);
  std::vector<std::string> local;
  const double score = ScoreBinTable(table, kind, &local);
  for (const auto& d : local) Note(diagnostics, data, feature, d);
  return score;
}

double FFilterScore(const Dataset& data, size_t feature,
                    std::vector<std::string>* diagnostics) {
  if (feature >= data.num_features()) throw Error("feature index out of range");
  if (data.num_rows() < 5) throw Error("F filter needs at least 5 rows");
  const OlsFit fit = FitOls(InteractionDesign(data, feature, true),
                            OutcomeVector(data));
  if (!fit.full_rank) {
    Note(diagnostics, data, feature, "rank-deficient design, F score set to 0");
    return 0.0;
  }
  const double beta = fit.coef[3];
  const double sigma2 = fit.rss / static_cast<double>(fit.df_resid);
  if (sigma2 < 1e-12) {
    if (std::abs(beta) > 1e-8) {
      Note(diagnostics, data, feature, "perfect fit, F score is infinite");
      return kPerfectFitScore;
    }
    return 0.0;
  }
  const double se2 = sigma2 * fit.xtx_inverse(3, 3);
  return beta * beta / se2;
}

double LrFilterScore(const Dataset& data, size_t feature,
                     std::vector<std::string>* diagnostics) {
  if (feature >= data.num_features()) throw Error("feature index out of range");
  if (data.num_rows() < 5) throw Error("LR filter needs at least 5 rows");
  const auto y_raw = data.outcome();
  size_t positives = 0;
  for (int v : y_raw) positives += v == 1;
  if (positives == 0 || positives == data.num_rows()) {
    throw Error("LR filter needs both outcome classes");
  }
  const Eigen::MatrixXd full = InteractionDesign(data, feature, true);
  if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(full).rank() < 4) {
    Note(diagnostics, data, feature, "rank-deficient design, LR score set to 0");
    return 0.0;
  }
  const Eigen::VectorXd y = OutcomeVector(data);
  const LogisticFit fit_full = FitLogistic(full, y);
  const LogisticFit fit_reduced =
      FitLogistic(InteractionDesign(data, feature, false), y);
  if (fit_full.clamped || fit_reduced.clamped) {
    Note(diagnostics, data, feature,
         "logistic fit did not converge; statistic taken at clamped coefficients");
  }
  const double statistic =
      2.0 * (fit_full.log_likelihood - fit_reduced.log_likelihood);
  return statistic > 0.0 ? statistic : 0.0;
}

double FilterScore(const Dataset& data, size_t feature, FilterMethod method,
                   int num_bins, std::vector<std::string>* diagnostics) {
  switch (method) {
    case FilterMethod::kF:
      return FFilterScore(data, feature, diagnostics);
    case FilterMethod::kLR:
      return LrFilterScore(data, feature, diagnostics);
    default:
      return BinFilterScore(data, feature, FilterDivergence(method), num_bins,
                            diagnostics);
  }
}

FeatureRanking RankAll(const Dataset& data, FilterMethod method, int num_bins) {
  std::vector<double> scores(data.num_features(), 0.0);
  std::vector<std::string> diagnostics;
  for (size_t j = 0; j < data.num_features(); ++j) {
    try {
      scores[j] = FilterScore(data, j, method, num_bins, &diagnostics);
    } catch (const Error& e) {
      scores[j] = 0.0;
      diagnostics.push_back(data.feature_names()[j] + ": " + e.what());
    }
  }
  FeatureRanking ranking = FeatureRanking::FromScores(std::move(scores),
                                                      FilterName(method));
  ranking.diagnostics = std::move(diagnostics);
  return ranking;
}

}  // namespace upliftfs
