#ifndef UPLIFTFS_FILTERS_H_
#define UPLIFTFS_FILTERS_H_

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "upliftfs/dataset.h"
#include "upliftfs/divergence.h"

namespace upliftfs {

// Filter scorers: each looks at one feature at a time and measures how
// strongly it is associated with a heterogeneous treatment effect.
enum class FilterMethod { kF, kLR, kKL, kED, kChi };

std::string FilterName(FilterMethod method);
FilterMethod ParseFilter(const std::string& name);
bool IsBinFilter(FilterMethod method);
DivergenceKind FilterDivergence(FilterMethod method);

inline constexpr int kDefaultBins = 10;

// Stand-in for an infinite F statistic (perfect interaction fit). Finite so
// rankings stay totally ordered.
inline constexpr double kPerfectFitScore = std::numeric_limits<double>::max();

// Divergence of the outcome distribution between arms, averaged over quantile
// bins of the feature with bin-size weights.
double BinFilterScore(const Dataset& data, size_t feature, DivergenceKind kind,
                      int num_bins = kDefaultBins,
                      std::vector<std::string>* diagnostics = nullptr);

// F statistic of the w*x coefficient in the OLS fit y ~ 1 + w + x + w*x.
double FFilterScore(const Dataset& data, size_t feature,
                    std::vector<std::string>* diagnostics = nullptr);

// Likelihood-ratio statistic 2 (l_full - l_reduced) for the w*x term of a
// logistic regression, full y ~ 1 + w + x + w*x against y ~ 1 + w + x.
double LrFilterScore(const Dataset& data, size_t feature,
                     std::vector<std::string>* diagnostics = nullptr);

double FilterScore(const Dataset& data, size_t feature, FilterMethod method,
                   int num_bins = kDefaultBins,
                   std::vector<std::string>* diagnostics = nullptr);

// Scores every feature. A feature whose scorer fails gets score 0 and a
// diagnostic; the ranking itself never aborts.
FeatureRanking RankAll(const Dataset& data, FilterMethod method,
                       int num_bins = kDefaultBins);

}  // namespace upliftfs

#endif  // UPLIFTFS_FILTERS_H_
