#ifndef UPLIFTFS_BINNING_H_
#define UPLIFTFS_BINNING_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "upliftfs/dataset.h"
#include "upliftfs/divergence.h"

namespace upliftfs {

struct Bin {
  // Half-open interval [lower, upper); the outer bounds are infinite.
  double lower = 0.0;
  double upper = 0.0;
  size_t n_total = 0;
  size_t n_treat = 0;
  size_t n_control = 0;
  std::vector<double> treat_counts;    // per class
  std::vector<double> control_counts;  // per class
  std::vector<double> p_treat;    // smoothed proportions, treatment arm
  std::vector<double> q_control;  // smoothed proportions, control arm

  bool has_both_arms() const { return n_treat > 0 && n_control > 0; }
};

struct BinTable {
  std::vector<double> edges;  // distinct inner edges, ascending
  std::vector<Bin> bins;      // non-empty bins only
  size_t n = 0;
  int num_classes = 2;

  size_t effective_bins() const { return bins.size(); }
};

// Linear-interpolation quantile of an ascending sample (q in [0, 1]).
double SortedQuantile(std::span<const double> sorted, double q);

// Pooled-sample quantile bins with edges at the j/K quantiles, j = 1..K-1.
// Duplicate edges collapse and empty bins are removed, so the table may have
// fewer than K bins (one for a constant feature).
BinTable BinFeature(const Dataset& data, size_t feature, int num_bins);

// sum_k (N_k / N) D(P_k : Q_k) over bins holding both arms; N counts only
// those bins. Dropped bins are reported through `diagnostics`.
double ScoreBinTable(const BinTable& table, DivergenceKind kind,
                     std::vector<std::string>* diagnostics = nullptr);

}  // namespace upliftfs

#endif  // UPLIFTFS_BINNING_H_
