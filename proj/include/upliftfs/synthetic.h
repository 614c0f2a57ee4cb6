#ifndef UPLIFTFS_SYNTHETIC_H_
#define UPLIFTFS_SYNTHETIC_H_

#include <cstdint>
#include <optional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "upliftfs/dataset.h"

namespace upliftfs {

enum class TransformKind { kLinear, kQuadratic, kCubic, kRelu, kSin, kCos };
inline constexpr int kNumTransformKinds = 6;

enum class FeatureRole { kClassification, kUplift, kIrrelevant };

std::string TransformName(TransformKind kind);
// "none" for an empty optional.
std::string PatternName(const std::optional<TransformKind>& pattern);
std::optional<TransformKind> ParsePattern(const std::string& name);
std::string RoleName(FeatureRole role);
FeatureRole ParseRole(const std::string& name);

// Data-generating process for a binary-conversion randomized experiment with
// m1 classification features, m2 uplift features and m3 irrelevant features.
struct DgpConfig {
  size_t n = 10000;
  size_t m1 = 10;
  size_t m2 = 6;
  size_t m3 = 20;
  double a1 = 0.0;  // control-arm intercept
  double a2 = 0.0;  // treatment-effect intercept
  double noise_sd = 0.3;
  // sin/cos are evaluated at periodic_frequency * x. With x ~ N(0,1), pi
  // keeps them nearly uncorrelated with x; frequency 1 makes sin almost linear.
  double periodic_frequency = std::numbers::pi;
  uint64_t seed = 0;

  size_t num_features() const { return m1 + m2 + m3; }
  void Validate() const;
};

struct SyntheticDataset {
  Dataset data;
  std::vector<double> true_ite;
  std::vector<double> p_treat;
  std::vector<double> p_control;
  std::vector<FeatureRole> roles;
  std::vector<std::optional<TransformKind>> patterns;
  DgpConfig config;
};

double ApplyTransform(double x, TransformKind kind,
                      double periodic_frequency = 1.0);

// f(x) followed by standardization with the sample mean and the sample
// (n - 1) standard deviation. Throws when the transformed column is constant.
std::vector<double> TransformFeature(std::span<const double> x,
                                     TransformKind kind,
                                     double periodic_frequency = 1.0);

double Logistic(double z);

// Deterministic in cfg.seed. Features are raw N(0, 1) draws; only the
// transformed, standardized copies enter the conversion model
//   logit Pr(Y=1) = a1 + sum_cls z*beta + w * (a2 + sum_uplift z*beta) + e
// with one e ~ N(0, noise_sd) per row shared by both counterfactuals.
SyntheticDataset Generate(const DgpConfig& cfg);

struct Intercepts {
  double a1 = 0.0;
  double a2 = 0.0;
};

struct CalibrationOptions {
  size_t sample_size = 200000;
  uint64_t seed = 0x5eedca11b7a7e5ULL;
  int max_iterations = 100;
  double tolerance = 0.005;
};

// Monte-Carlo bisection for (a1, a2) so that the mean control conversion
// probability hits `target_control_rate` and the mean true ITE hits
// `target_ate` on a fixed calibration sample. cfg.n, cfg.seed, cfg.a1 and
// cfg.a2 are ignored.
Intercepts CalibrateIntercepts(double target_control_rate, double target_ate,
                               const DgpConfig& cfg,
                               const CalibrationOptions& options = {});

}  // namespace upliftfs

#endif  // UPLIFTFS_SYNTHETIC_H_
