#include <chrono>

#include "upliftfs/error.h"
#include "upliftfs/experiment.h"
#include "upliftfs/filters.h"

namespace upliftfs {
namespace {

double SecondsToRank(const Dataset& data, FilterMethod method, int num_bins,
                     int repeats) {
  double best = 0.0;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    const FeatureRanking ranking = RankAll(data, method, num_bins);
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    if (ranking.scores.size() != data.num_features()) throw Error("bench: bad ranking");
    if (r == 0 || elapsed.count() < best) best = elapsed.count();
  }
  return best;
}

}  // namespace

std::vector<BenchRow> BenchFilters(const DgpConfig& dgp, int num_bins, int repeats) {
  if (repeats < 1) throw Error("bench: repeats must be >= 1");
  DgpConfig doubled = dgp;
  doubled.n = 2 * dgp.n;
  const SyntheticDataset small = Generate(dgp);
  const SyntheticDataset large = Generate(doubled);
  std::vector<BenchRow> rows;
  for (FilterMethod method : {FilterMethod::kF, FilterMethod::kLR, FilterMethod::kKL,
                              FilterMethod::kED, FilterMethod::kChi}) {
    BenchRow row;
    row.method = FilterName(method);
    row.n = dgp.n;
    row.seconds_n = SecondsToRank(small.data, method, num_bins, repeats);
    row.seconds_2n = SecondsToRank(large.data, method, num_bins, repeats);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace upliftfs
