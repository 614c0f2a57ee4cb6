#include "upliftfs/binning.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "upliftfs/error.h"

namespace upliftfs {

double SortedQuantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error("quantile of an empty sample");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

BinTable BinFeature(const Dataset& data, size_t feature, int num_bins) {
  const size_t n = data.num_rows();
  if (feature >= data.num_features()) throw Error("feature index out of range");
  if (num_bins < 2 || static_cast<size_t>(num_bins) > n) {
    throw Error("bin count must lie in [2, n]");
  }
  data.RequireBothArms();

  const auto x = data.feature(feature);
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  for (int j = 1; j < num_bins; ++j) {
    const double e = SortedQuantile(sorted, static_cast<double>(j) / num_bins);
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }

  const int classes = data.num_classes();
  const size_t slots = edges.size() + 1;
  std::vector<Bin> all(slots);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (size_t b = 0; b < slots; ++b) {
    all[b].lower = b == 0 ? -kInf : edges[b - 1];
    all[b].upper = b == edges.size() ? kInf : edges[b];
    all[b].treat_counts.assign(classes, 0.0);
    all[b].control_counts.assign(classes, 0.0);
  }
  const auto w = data.treatment();
  const auto y = data.outcome();
  for (size_t i = 0; i < n; ++i) {
    const size_t b = static_cast<size_t>(
        std::upper_bound(edges.begin(), edges.end(), x[i]) - edges.begin());
    Bin& bin = all[b];
    ++bin.n_total;
    if (w[i] == 1) {
      ++bin.n_treat;
      bin.treat_counts[y[i]] += 1.0;
    } else {
      ++bin.n_control;
      bin.control_counts[y[i]] += 1.0;
    }
  }

  BinTable table;
  table.edges = std::move(edges);
  table.n = n;
  table.num_classes = classes;
  for (Bin& bin : all) {
    if (bin.n_total == 0) continue;
    if (bin.n_treat > 0) bin.p_treat = SmoothedProportions(bin.treat_counts);
    if (bin.n_control > 0) {
      bin.q_control = SmoothedProportions(bin.control_counts);
    }
    table.bins.push_back(std::move(bin));
  }
  return table;
}

double ScoreBinTable(const BinTable& table, DivergenceKind kind,
                     std::vector<std::string>* diagnostics) {
  size_t kept_rows = 0;
  size_t dropped = 0;
  for (const Bin& bin : table.bins) {
    if (bin.has_both_arms()) {
      kept_rows += bin.n_total;
    } else {
      ++dropped;
    }
  }
  if (dropped > 0 && diagnostics != nullptr) {
    diagnostics->push_back(std::to_string(dropped) +
                           " bin(s) missing an arm were dropped");
  }
  if (table.bins.size() == 1 && diagnostics != nullptr) {
    diagnostics->push_back(
        "single effective bin; score is the marginal arm divergence");
  }
  if (kept_rows == 0) return 0.0;
  double score = 0.0;
  for (const Bin& bin : table.bins) {
    if (!bin.has_both_arms()) continue;
    score += static_cast<double>(bin.n_total) / static_cast<double>(kept_rows) *
             Divergence(kind, bin.p_treat, bin.q_control);
  }
  return score;
}

}  // namespace upliftfs
