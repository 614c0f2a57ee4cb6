#ifndef UPLIFTFS_EXPERIMENT_H_
#define UPLIFTFS_EXPERIMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "upliftfs/divergence.h"
#include "upliftfs/evaluation.h"
#include "upliftfs/forest.h"
#include "upliftfs/synthetic.h"

namespace upliftfs {

inline constexpr const char* kSoftwareVersion = "0.1.0";

// Synthetic-data protocol: per trial, generate, split, rank features on the
// training half with every method, refit every model on the top m* features
// and score it on the test half.
struct ExperimentConfig {
  DgpConfig dgp;
  // When set, dgp.a1/a2 are replaced by CalibrateIntercepts(targets).
  bool calibrate = true;
  double target_control_rate = 0.2;
  double target_ate = 0.1;

  int trials = 20;
  double test_fraction = 0.5;
  std::vector<std::string> methods = {"f",   "lr",           "kl",
                                      "ed",  "chi",          "uplift-forest",
                                      "two-model", "outcome"};
  std::vector<std::string> models = {"two-model", "uplift-forest"};
  std::vector<size_t> m_star = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  // Bin counts for the kl/ed/chi filters. With more than one value each
  // filter is reported once per count as "<method>@<bins>".
  std::vector<int> bins = {10};
  // Adds an "all" method whose single m* is the full feature count.
  bool baseline = true;
  bool compute_auuc = true;
  // Top-k size for feature recall; 0 means the number of uplift features.
  size_t recall_k = 0;

  ForestConfig forest;
  DivergenceKind uplift_kind = DivergenceKind::kKL;
  bool outcome_include_treatment = false;

  uint64_t seed = 2020;
  std::string output_dir;
  // 0: hardware concurrency. UPLIFTFS_THREADS caps either value.
  int threads = 0;

  void Validate() const;
  // Method labels in report order, including bin variants and "all".
  std::vector<std::string> MethodLabels() const;
};

nlohmann::json ExperimentConfigToJson(const ExperimentConfig& config);
// Keys absent from `j` keep the values of `defaults`.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j,
                                          const ExperimentConfig& defaults = {});
// FNV-1a of the canonical JSON, hex encoded; output_dir and threads excluded.
std::string ConfigHash(const ExperimentConfig& config);

// Copy with calibrated intercepts written into dgp when `calibrate` is set.
ExperimentConfig ResolveIntercepts(const ExperimentConfig& config);

// Seed of trial `trial_index`, derived from the master seed.
uint64_t TrialSeed(const ExperimentConfig& config, int trial_index);

// One result per (method label, model, m*) cell, in that nesting order.
// Expects resolved intercepts. Cell failures are recorded in
// TrialResult::error without stopping the trial.
std::vector<TrialResult> RunTrial(const ExperimentConfig& config, int trial_index);

struct ExperimentOutput {
  ExperimentConfig resolved;
  std::vector<std::vector<TrialResult>> trials;  // by trial index
  ExperimentReport report;
  size_t resumed_trials = 0;
};

// Runs every trial (in parallel), aggregates, and, when output_dir is set,
// writes manifest.json, trials/trial_NNNNN.json as each trial completes,
// report.csv and report.json. Existing trial files with a matching manifest
// are reused instead of recomputed.
ExperimentOutput RunExperiment(const ExperimentConfig& config);

// Long format: method,model,m_star,metric,mean,se,lo,hi.
std::string ReportToCsv(const ExperimentReport& report);
nlohmann::json ReportToJson(const ExperimentReport& report,
                            const ExperimentConfig& resolved);

nlohmann::json TrialResultToJson(const TrialResult& result);
TrialResult TrialResultFromJson(const nlohmann::json& j);

// Worker count after applying UPLIFTFS_THREADS.
int EffectiveThreads(int requested);

// Timing of the five filters at n and 2n rows (fastest of `repeats` runs).
struct BenchRow {
  std::string method;
  size_t n = 0;
  double seconds_n = 0.0;
  double seconds_2n = 0.0;
  double ratio() const { return seconds_2n / seconds_n; }
};

std::vector<BenchRow> BenchFilters(const DgpConfig& dgp, int num_bins = 10,
                                   int repeats = 3);

}  // namespace upliftfs

#endif  // UPLIFTFS_EXPERIMENT_H_
