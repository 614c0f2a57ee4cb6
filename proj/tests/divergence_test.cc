#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.h"
#include "upliftfs/binning.h"
#include "upliftfs/divergence.h"
#include "upliftfs/error.h"
#include "upliftfs/filters.h"

namespace upliftfs {
namespace {

using V = std::vector<double>;

TEST(DivergenceTest, HandComputedValues) {
  const V p = {0.5, 0.5}, q = {0.25, 0.75};
  EXPECT_NEAR(Divergence(DivergenceKind::kKL, p, q),
              0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(Divergence(DivergenceKind::kKL, p, q), 0.14384, 1e-5);
  EXPECT_NEAR(Divergence(DivergenceKind::kED, p, q), 0.125, 1e-12);
  EXPECT_NEAR(Divergence(DivergenceKind::kChi, p, q), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(Divergence(DivergenceKind::kKL, p, p), 0.0);
}

TEST(DivergenceTest, ZeroOnEqualNonNegativeOtherwise) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const int c = 2 + rep % 4;
    V p(c), q(c);
    double sp = 0, sq = 0;
    for (int i = 0; i < c; ++i) sp += p[i] = u(rng), sq += q[i] = u(rng);
    for (int i = 0; i < c; ++i) p[i] /= sp, q[i] /= sq;
    for (auto kind : {DivergenceKind::kKL, DivergenceKind::kED, DivergenceKind::kChi}) {
      EXPECT_NEAR(Divergence(kind, p, p), 0.0, 1e-15);
      EXPECT_GE(Divergence(kind, p, q), 0.0);
    }
  }
}

TEST(DivergenceTest, Preconditions) {
  EXPECT_THROW(Divergence(DivergenceKind::kED, V{0.5, 0.5}, V{1.0}), Error);
  EXPECT_THROW(Divergence(DivergenceKind::kED, V{1.0}, V{1.0}), Error);
  // An unsmoothed zero reaching KL/Chi is a programming error.
  EXPECT_THROW(Divergence(DivergenceKind::kKL, V{0.5, 0.5}, V{0.0, 1.0}),
               std::logic_error);
  EXPECT_THROW(Divergence(DivergenceKind::kChi, V{0.5, 0.5}, V{0.0, 1.0}),
               std::logic_error);
  EXPECT_NO_THROW(Divergence(DivergenceKind::kED, V{0.5, 0.5}, V{0.0, 1.0}));
}

TEST(DivergenceTest, NamesRoundTrip) {
  for (auto kind : {DivergenceKind::kKL, DivergenceKind::kED, DivergenceKind::kChi}) {
    EXPECT_EQ(ParseDivergence(DivergenceName(kind)), kind);
  }
  EXPECT_THROW(ParseDivergence("js"), Error);
}

TEST(SmoothingTest, OnlyWhenDegenerate) {
  EXPECT_EQ(SmoothedProportions(V{1, 3}), (V{0.25, 0.75}));
  // (0 + 0.5) / (4 + 1), (4 + 0.5) / (4 + 1)
  const V s = SmoothedProportions(V{0, 4});
  EXPECT_DOUBLE_EQ(s[0], 0.1);
  EXPECT_DOUBLE_EQ(s[1], 0.9);
  const V t = SmoothedProportions(V{0, 2, 3});
  EXPECT_NEAR(t[0] + t[1] + t[2], 1.0, 1e-15);
  EXPECT_GT(t[0], 0.0);
}

TEST(QuantileTest, LinearInterpolation) {
  const V s = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_DOUBLE_EQ(SortedQuantile(s, 0.2), 2.8);
  EXPECT_DOUBLE_EQ(SortedQuantile(s, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(SortedQuantile(s, 1.0), 10.0);
  EXPECT_DOUBLE_EQ(SortedQuantile(s, 0.5), 5.5);
}

Dataset Alternating(V x) {
  std::vector<int> w(x.size()), y(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    w[i] = static_cast<int>(i % 2);
    y[i] = static_cast<int>((i / 2) % 2);
  }
  return testing::OneFeature(std::move(x), w, y);
}

TEST(BinFeatureTest, EvenlySpacedValues) {
  const BinTable t = BinFeature(Alternating({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), 0, 5);
  ASSERT_EQ(t.effective_bins(), 5u);
  for (const Bin& b : t.bins) EXPECT_EQ(b.n_total, 2u);
  EXPECT_EQ(t.n, 10u);
}

TEST(BinFeatureTest, ConstantFeatureCollapses) {
  const BinTable t = BinFeature(Alternating(V(20, 3.0)), 0, 10);
  EXPECT_EQ(t.effective_bins(), 1u);
  EXPECT_EQ(t.bins[0].n_total, 20u);
}

TEST(BinFeatureTest, DuplicateEdgesMerge) {
  const BinTable t = BinFeature(Alternating({1, 1, 1, 1, 1, 1, 1, 1, 9, 10}), 0, 5);
  EXPECT_LT(t.effective_bins(), 5u);
  size_t total = 0;
  for (const Bin& b : t.bins) total += b.n_total;
  EXPECT_EQ(total, 10u);
  EXPECT_EQ(t.bins.front().n_total, 8u);
}

TEST(BinFeatureTest, InvariantsOnRandomData) {
  std::mt19937_64 rng(2);
  for (int k : {2, 3, 10, 50}) {
    const Dataset d = testing::RandomData(
        300, 1, 40 + k, [](const V& row, int w, std::mt19937_64& r) {
          return std::bernoulli_distribution(row[0] > 0 && w ? 0.9 : 0.3)(r);
        });
    const BinTable t = BinFeature(d, 0, k);
    size_t total = 0;
    for (const Bin& b : t.bins) {
      total += b.n_total;
      EXPECT_EQ(b.n_total, b.n_treat + b.n_control);
      EXPECT_GT(b.n_total, 0u);
      // A bin missing an arm carries no proportions for it.
      EXPECT_EQ(b.p_treat.size(), b.n_treat > 0 ? 2u : 0u);
      EXPECT_EQ(b.q_control.size(), b.n_control > 0 ? 2u : 0u);
      if (b.n_treat > 0) EXPECT_NEAR(b.p_treat[0] + b.p_treat[1], 1.0, 1e-12);
      if (b.n_control > 0) EXPECT_NEAR(b.q_control[0] + b.q_control[1], 1.0, 1e-12);
      for (double v : b.p_treat) EXPECT_TRUE(v > 0 && v < 1);
      for (double v : b.q_control) EXPECT_TRUE(v > 0 && v < 1);
    }
    EXPECT_EQ(total, d.num_rows());
    EXPECT_LE(t.effective_bins(), static_cast<size_t>(k));
  }
}

TEST(BinFeatureTest, Preconditions) {
  const Dataset d = Alternating({1, 2, 3, 4});
  EXPECT_THROW(BinFeature(d, 0, 1), Error);
  EXPECT_THROW(BinFeature(d, 0, 5), Error);
  EXPECT_THROW(BinFeature(testing::OneFeature({1, 2}, {1, 1}, {0, 1}), 0, 2), Error);
}

// Bin 1 (x=0): both arms (0.5, 0.5). Bin 2 (x=1): treatment (0.5, 0.5),
// control (0.25, 0.75). Equal bin sizes.
Dataset TwoBinFixture() {
  V x;
  std::vector<int> w, y;
  auto add = [&](double xv, int wv, std::vector<int> ys) {
    for (int yv : ys) x.push_back(xv), w.push_back(wv), y.push_back(yv);
  };
  add(0, 1, {0, 0, 1, 1});
  add(0, 0, {0, 0, 1, 1});
  add(1, 1, {0, 0, 1, 1});
  add(1, 0, {0, 1, 1, 1});
  return testing::OneFeature(x, w, y);
}

TEST(BinScoreTest, WeightedComposition) {
  const Dataset d = TwoBinFixture();
  EXPECT_NEAR(BinFilterScore(d, 0, DivergenceKind::kKL, 2), 0.07192, 1e-5);
  EXPECT_NEAR(BinFilterScore(d, 0, DivergenceKind::kKL, 2),
              0.5 * (0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)), 1e-15);
  EXPECT_NEAR(BinFilterScore(d, 0, DivergenceKind::kED, 2), 0.0625, 1e-12);
  EXPECT_NEAR(BinFilterScore(d, 0, DivergenceKind::kChi, 2), 1.0 / 6.0, 1e-12);
}

TEST(BinScoreTest, BinMissingAnArmIsDroppedAndRenormalized) {
  // x=0: treatment only; x=1: both arms with (0.5,0.5) vs (0.25,0.75).
  V x;
  std::vector<int> w, y;
  auto add = [&](double xv, int wv, std::vector<int> ys) {
    for (int yv : ys) x.push_back(xv), w.push_back(wv), y.push_back(yv);
  };
  add(0, 1, {0, 1, 1, 1, 1, 1, 1, 1});
  add(1, 1, {0, 0, 1, 1});
  add(1, 0, {0, 1, 1, 1});
  const Dataset d = testing::OneFeature(x, w, y);
  std::vector<std::string> diag;
  const double s = BinFilterScore(d, 0, DivergenceKind::kED, 2, &diag);
  EXPECT_NEAR(s, 0.125, 1e-12);
  EXPECT_FALSE(diag.empty());
}

TEST(BinScoreTest, ConstantFeatureScoresMarginalDivergence) {
  const Dataset balanced = Alternating(V(40, 1.0));
  std::vector<std::string> diag;
  EXPECT_NEAR(BinFilterScore(balanced, 0, DivergenceKind::kKL, 10, &diag), 0.0, 1e-15);
  EXPECT_FALSE(diag.empty());

  V x(8, 2.0);
  const Dataset skew = testing::OneFeature(x, {1, 1, 1, 1, 0, 0, 0, 0},
                                           {0, 0, 1, 1, 0, 1, 1, 1});
  EXPECT_NEAR(BinFilterScore(skew, 0, DivergenceKind::kKL, 4),
              Divergence(DivergenceKind::kKL, V{0.5, 0.5}, V{0.25, 0.75}), 1e-15);
}

TEST(BinScoreTest, IndependentFeatureScoresNearZero) {
  const Dataset d = testing::RandomData(
      100000, 1, 77, [](const V&, int w, std::mt19937_64& r) {
        return std::bernoulli_distribution(w ? 0.3 : 0.3)(r);
      });
  for (auto kind : {DivergenceKind::kKL, DivergenceKind::kED, DivergenceKind::kChi}) {
    EXPECT_LT(BinFilterScore(d, 0, kind, 10), 0.01);
  }
}

Dataset HeterogeneousData(size_t n, uint64_t seed) {
  return testing::RandomData(n, 3, seed, [](const V& row, int w, std::mt19937_64& r) {
    const double p = 0.3 + (w ? 0.3 * std::tanh(row[0]) + 0.1 * row[1] * row[1] : 0.0);
    return std::bernoulli_distribution(std::clamp(p, 0.01, 0.99))(r);
  });
}

TEST(BinScoreTest, RowPermutationInvariance) {
  const Dataset d = HeterogeneousData(600, 5);
  std::vector<size_t> perm(d.num_rows());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(6));
  const Dataset p = d.SelectRows(perm);
  for (auto m : {FilterMethod::kKL, FilterMethod::kED, FilterMethod::kChi,
                 FilterMethod::kF, FilterMethod::kLR}) {
    for (size_t j = 0; j < 3; ++j) {
      const double a = FilterScore(d, j, m), b = FilterScore(p, j, m);
      EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, std::abs(a))) << FilterName(m);
    }
  }
}

TEST(BinScoreTest, MonotoneTransformInvariance) {
  const Dataset d = HeterogeneousData(600, 9);
  V raw(d.feature(0).begin(), d.feature(0).end());
  V mapped = raw;
  for (double& v : mapped) v = std::exp(3 * v) + 7;  // strictly increasing
  std::vector<int> w(d.treatment().begin(), d.treatment().end());
  std::vector<int> y(d.outcome().begin(), d.outcome().end());
  const Dataset a = testing::OneFeature(raw, w, y);
  const Dataset b = testing::OneFeature(mapped, w, y);
  for (auto kind : {DivergenceKind::kKL, DivergenceKind::kED, DivergenceKind::kChi}) {
    for (int k : {2, 5, 10, 20}) {
      EXPECT_DOUBLE_EQ(BinFilterScore(a, 0, kind, k), BinFilterScore(b, 0, kind, k));
    }
  }
}

TEST(BinScoreTest, EdIsSymmetricInArms) {
  const Dataset d = HeterogeneousData(800, 12);
  std::vector<int> flipped(d.treatment().begin(), d.treatment().end());
  for (int& v : flipped) v = 1 - v;
  std::vector<std::vector<double>> cols;
  for (size_t j = 0; j < d.num_features(); ++j) {
    cols.emplace_back(d.feature(j).begin(), d.feature(j).end());
  }
  const Dataset f(d.feature_names(), cols, flipped,
                  std::vector<int>(d.outcome().begin(), d.outcome().end()));
  for (size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR(BinFilterScore(d, j, DivergenceKind::kED, 10),
                BinFilterScore(f, j, DivergenceKind::kED, 10), 1e-15);
  }
}

}  // namespace
}  // namespace upliftfs
