#include "upliftfs/synthetic.h"

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "upliftfs/error.h"
#include "upliftfs/random.h"

namespace upliftfs {
namespace {

constexpr std::array<const char*, kNumTransformKinds> kTransformNames = {
    "linear", "quadratic", "cubic", "relu", "sin", "cos"};

// Everything in the conversion model except the intercepts.
struct LatentParts {
  std::vector<std::vector<double>> columns;
  std::vector<std::optional<TransformKind>> patterns;
  std::vector<FeatureRole> roles;
  std::vector<double> base;  // sum_cls z*beta + e
  std::vector<double> lift;  // sum_uplift z*beta
};

// Natural order for the first six features of a role, uniform afterwards.
TransformKind PickPattern(size_t index_in_role, RandomEngine& rng) {
  if (index_in_role < kNumTransformKinds) {
    return static_cast<TransformKind>(index_in_role);
  }
  std::uniform_int_distribution<int> pick(0, kNumTransformKinds - 1);
  return static_cast<TransformKind>(pick(rng));
}

LatentParts SimulateLatent(const DgpConfig& cfg, RandomEngine& rng) {
  const size_t n = cfg.n;
  const size_t m = cfg.num_features();
  LatentParts parts;
  std::normal_distribution<double> standard_normal(0.0, 1.0);

  parts.columns.assign(m, std::vector<double>(n));
  for (auto& col : parts.columns) {
    for (double& v : col) v = standard_normal(rng);
  }

  parts.patterns.resize(m);
  parts.roles.resize(m, FeatureRole::kIrrelevant);
  for (size_t j = 0; j < cfg.m1; ++j) {
    parts.roles[j] = FeatureRole::kClassification;
    parts.patterns[j] = PickPattern(j, rng);
  }
  for (size_t j = 0; j < cfg.m2; ++j) {
    parts.roles[cfg.m1 + j] = FeatureRole::kUplift;
    parts.patterns[cfg.m1 + j] = PickPattern(j, rng);
  }

  std::vector<double> beta(m, 0.0);
  for (size_t j = 0; j < cfg.m1; ++j) {
    beta[j] = standard_normal(rng) / static_cast<double>(cfg.m1);
  }
  for (size_t j = cfg.m1; j < cfg.m1 + cfg.m2; ++j) beta[j] = 0.5;

  parts.base.assign(n, 0.0);
  parts.lift.assign(n, 0.0);
  for (size_t j = 0; j < cfg.m1 + cfg.m2; ++j) {
    const std::vector<double> z =
        TransformFeature(parts.columns[j], *parts.patterns[j],
                         cfg.periodic_frequency);
    auto& target = j < cfg.m1 ? parts.base : parts.lift;
    for (size_t i = 0; i < n; ++i) target[i] += z[i] * beta[j];
  }
  if (cfg.noise_sd > 0.0) {
    std::normal_distribution<double> noise(0.0, cfg.noise_sd);
    for (double& b : parts.base) b += noise(rng);
  }
  return parts;
}

double MeanOf(const std::vector<double>& v, const std::function<double(size_t)>& f) {
  double s = 0.0;
  for (size_t i = 0; i < v.size(); ++i) s += f(i);
  return s / static_cast<double>(v.size());
}

// Root of an increasing function by bisection on [-40, 40].
double Bisect(const std::function<double(double)>& f, int max_iterations,
              double tolerance, const char* what) {
  double lo = -40.0, hi = 40.0;
  double mid = 0.0, value = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    mid = 0.5 * (lo + hi);
    value = f(mid);
    if (std::abs(value) < 1e-12) break;
    (value < 0.0 ? lo : hi) = mid;
  }
  if (!(std::abs(value) < tolerance)) {
    throw Error(std::string("intercept calibration did not converge for ") + what);
  }
  return mid;
}

}  // namespace

std::string TransformName(TransformKind kind) {
  return kTransformNames[static_cast<int>(kind)];
}

std::string PatternName(const std::optional<TransformKind>& pattern) {
  return pattern ? TransformName(*pattern) : "none";
}

std::optional<TransformKind> ParsePattern(const std::string& name) {
  for (int k = 0; k < kNumTransformKinds; ++k) {
    if (name == kTransformNames[k]) return static_cast<TransformKind>(k);
  }
  if (name == "none") return std::nullopt;
  throw Error("unknown pattern '" + name + "'");
}

std::string RoleName(FeatureRole role) {
  switch (role) {
    case FeatureRole::kClassification:
      return "classification";
    case FeatureRole::kUplift:
      return "uplift";
    case FeatureRole::kIrrelevant:
      return "irrelevant";
  }
  return "irrelevant";
}

FeatureRole ParseRole(const std::string& name) {
  if (name == "classification") return FeatureRole::kClassification;
  if (name == "uplift") return FeatureRole::kUplift;
  if (name == "irrelevant") return FeatureRole::kIrrelevant;
  throw Error("unknown feature role '" + name + "'");
}

void DgpConfig::Validate() const {
  if (num_features() < 1) throw Error("DGP needs at least one feature");
  if (n < 2) throw Error("DGP needs at least two rows");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
    throw Error("noise_sd must be a finite non-negative number");
  }
  if (!std::isfinite(a1) || !std::isfinite(a2) ||
      !std::isfinite(periodic_frequency)) {
    throw Error("DGP intercepts and frequency must be finite");
  }
}

double ApplyTransform(double x, TransformKind kind, double periodic_frequency) {
  switch (kind) {
    case TransformKind::kLinear:
      return x;
    case TransformKind::kQuadratic:
      return x * x;
    case TransformKind::kCubic:
      return x * x * x;
    case TransformKind::kRelu:
      return x > 0.0 ? x : 0.0;
    case TransformKind::kSin:
      return std::sin(periodic_frequency * x);
    case TransformKind::kCos:
      return std::cos(periodic_frequency * x);
  }
  return x;
}

std::vector<double> TransformFeature(std::span<const double> x,
                                     TransformKind kind,
                                     double periodic_frequency) {
  const size_t n = x.size();
  if (n < 2) throw Error("transform needs at least two values");
  std::vector<double> out(n);
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) {
    out[i] = ApplyTransform(x[i], kind, periodic_frequency);
    mean += out[i];
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : out) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
    throw Error("transformed feature has zero variance");
  }
  for (double& v : out) v = (v - mean) / sd;
  return out;
}

double Logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

SyntheticDataset Generate(const DgpConfig& cfg) {
  cfg.Validate();
  RandomEngine rng(cfg.seed);
  LatentParts parts = SimulateLatent(cfg, rng);

  const size_t n = cfg.n;
  std::vector<double> p_treat(n), p_control(n), ite(n);
  std::vector<int> w(n), y(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (size_t i = 0; i < n; ++i) {
    const double control_logit = cfg.a1 + parts.base[i];
    p_control[i] = Logistic(control_logit);
    p_treat[i] = Logistic(control_logit + cfg.a2 + parts.lift[i]);
    ite[i] = p_treat[i] - p_control[i];
  }
  for (size_t i = 0; i < n; ++i) w[i] = unit(rng) < 0.5 ? 1 : 0;
  for (size_t i = 0; i < n; ++i) {
    y[i] = unit(rng) < (w[i] ? p_treat[i] : p_control[i]) ? 1 : 0;
  }

  std::vector<std::string> names;
  for (size_t j = 0; j < cfg.num_features(); ++j) {
    names.push_back("x" + std::to_string(j + 1));
  }
  return SyntheticDataset{
      Dataset(std::move(names), std::move(parts.columns), std::move(w),
              std::move(y), 2),
      std::move(ite),
      std::move(p_treat),
      std::move(p_control),
      std::move(parts.roles),
      std::move(parts.patterns),
      cfg};
}

Intercepts CalibrateIntercepts(double target_control_rate, double target_ate,
                               const DgpConfig& cfg,
                               const CalibrationOptions& options) {
  if (!(target_control_rate > 0.0 && target_control_rate < 1.0)) {
    throw Error("target control rate must lie in (0, 1)");
  }
  const double treated_rate = target_control_rate + target_ate;
  if (!(treated_rate > 0.0 && treated_rate < 1.0)) {
    throw Error("target control rate + target ATE must lie in (0, 1)");
  }
  DgpConfig sample_cfg = cfg;
  sample_cfg.n = options.sample_size;
  sample_cfg.seed = options.seed;
  sample_cfg.Validate();
  RandomEngine rng(options.seed);
  const LatentParts parts = SimulateLatent(sample_cfg, rng);

  Intercepts out;
  out.a1 = Bisect(
      [&](double a1) {
        return MeanOf(parts.base,
                      [&](size_t i) { return Logistic(a1 + parts.base[i]); }) -
               target_control_rate;
      },
      options.max_iterations, options.tolerance, "a1");
  std::vector<double> p_control(parts.base.size());
  for (size_t i = 0; i < p_control.size(); ++i) {
    p_control[i] = Logistic(out.a1 + parts.base[i]);
  }
  out.a2 = Bisect(
      [&](double a2) {
        return MeanOf(parts.base,
                      [&](size_t i) {
                        return Logistic(out.a1 + parts.base[i] + a2 +
                                        parts.lift[i]) -
                               p_control[i];
                      }) -
               target_ate;
      },
      options.max_iterations, options.tolerance, "a2");
  return out;
}

}  // namespace upliftfs
