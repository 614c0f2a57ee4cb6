#ifndef UPLIFTFS_TESTS_ORACLES_H_
#define UPLIFTFS_TESTS_ORACLES_H_

// Brute-force reference computations shared by the unit tests and the
// acceptance binary. Deliberately naive: everything is recomputed from raw
// rows, in long double where it matters.

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "upliftfs/dataset.h"
#include "upliftfs/divergence.h"
#include "upliftfs/forest.h"

namespace upliftfs::oracle {

using V = std::vector<double>;
using LD = long double;
using I = std::vector<int>;

// ---- F and LR filter statistics -------------------------------------------

// Inverse of a small dense matrix by Gauss-Jordan elimination with partial
// pivoting, in long double.
template <size_t K>
std::array<std::array<LD, K>, K> Invert(std::array<std::array<LD, K>, K> a) {
  std::array<std::array<LD, K>, K> inv{};
  for (size_t i = 0; i < K; ++i) inv[i][i] = 1;
  for (size_t c = 0; c < K; ++c) {
    size_t p = c;
    for (size_t r = c + 1; r < K; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[p][c])) p = r;
    }
    std::swap(a[c], a[p]);
    std::swap(inv[c], inv[p]);
    const LD d = a[c][c];
    for (size_t k = 0; k < K; ++k) a[c][k] /= d, inv[c][k] /= d;
    for (size_t r = 0; r < K; ++r) {
      if (r == c) continue;
      const LD f = a[r][c];
      for (size_t k = 0; k < K; ++k) a[r][k] -= f * a[c][k], inv[r][k] -= f * inv[c][k];
    }
  }
  return inv;
}

inline std::array<LD, 4> DesignRow(double x, int w) { return {1, LD(w), x, LD(w) * x}; }

// t² of the interaction coefficient from the normal equations.
inline double FOracle(const V& x, const I& w, const I& y) {
  const size_t n = x.size();
  std::array<std::array<LD, 4>, 4> xtx{};
  std::array<LD, 4> xty{};
  for (size_t i = 0; i < n; ++i) {
    const auto r = DesignRow(x[i], w[i]);
    for (int a = 0; a < 4; ++a) {
      xty[a] += r[a] * y[i];
      for (int b = 0; b < 4; ++b) xtx[a][b] += r[a] * r[b];
    }
  }
  const auto inv = Invert(xtx);
  std::array<LD, 4> beta{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) beta[a] += inv[a][b] * xty[b];
  LD rss = 0;
  for (size_t i = 0; i < n; ++i) {
    const auto r = DesignRow(x[i], w[i]);
    LD fit = 0;
    for (int a = 0; a < 4; ++a) fit += r[a] * beta[a];
    rss += (y[i] - fit) * (y[i] - fit);
  }
  const LD sigma2 = rss / LD(n - 4);
  return static_cast<double>(beta[3] * beta[3] / (sigma2 * inv[3][3]));
}

// Maximum log-likelihood of a logistic model on the first K design columns,
// by damped Newton from several starting points.
template <size_t K>
LD LogisticMaxLogLik(const V& x, const I& w, const I& y) {
  auto loglik = [&](const std::array<LD, K>& b) {
    LD ll = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      const auto r = DesignRow(x[i], w[i]);
      LD eta = 0;
      for (size_t a = 0; a < K; ++a) eta += r[a] * b[a];
      ll += y[i] * eta - std::log1p(std::exp(eta));
    }
    return ll;
  };
  LD best = -INFINITY;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> start(-2, 2);
  for (int s = 0; s < 8; ++s) {
    std::array<LD, K> b{};
    if (s > 0) for (auto& v : b) v = start(rng);
    LD ll = loglik(b);
    for (int it = 0; it < 500; ++it) {
      std::array<LD, K> g{};
      std::array<std::array<LD, K>, K> h{};
      for (size_t i = 0; i < x.size(); ++i) {
        const auto r = DesignRow(x[i], w[i]);
        LD eta = 0;
        for (size_t a = 0; a < K; ++a) eta += r[a] * b[a];
        const LD p = 1 / (1 + std::exp(-eta));
        for (size_t a = 0; a < K; ++a) {
          g[a] += (y[i] - p) * r[a];
          for (size_t c = 0; c < K; ++c) h[a][c] += p * (1 - p) * r[a] * r[c];
        }
      }
      const auto hinv = Invert(h);
      std::array<LD, K> step{};
      for (size_t a = 0; a < K; ++a)
        for (size_t c = 0; c < K; ++c) step[a] += hinv[a][c] * g[c];
      LD scale = 1;
      bool moved = false;
      for (int half = 0; half < 60; ++half, scale /= 2) {
        std::array<LD, K> cand = b;
        for (size_t a = 0; a < K; ++a) cand[a] += scale * step[a];
        const LD cl = loglik(cand);
        if (cl >= ll) {
          moved = cl > ll;
          b = cand;
          ll = cl;
          break;
        }
      }
      if (!moved) break;
    }
    best = std::max(best, ll);
  }
  return best;
}

inline double LrOracle(const V& x, const I& w, const I& y) {
  return static_cast<double>(2 * (LogisticMaxLogLik<4>(x, w, y) -
                                  LogisticMaxLogLik<3>(x, w, y)));
}

// ---- Fixtures -------------------------------------------------------------

inline const V kFx = {-1.3, 0.2, 0.9, 2.1, -0.4, 1.6, -2.2, 0.5};
inline const I kFw = {0, 0, 0, 0, 1, 1, 1, 1};
inline const I kFy = {0, 1, 0, 1, 0, 1, 0, 1};

inline const V kLx = {-1.5, -0.7, 0.1, 0.8, 1.4, 2.0, -1.9, -0.3, 0.4, 1.1, 1.7, -1.0};
inline const I kLw = {0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
inline const I kLy = {1, 0, 1, 0, 0, 1, 0, 0, 1, 0, 1, 1};

// ---- Uplift split ----------------------------------------------------------

inline V OracleSmooth(const V& counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  bool degenerate = false;
  for (double c : counts) degenerate |= c == 0 || c == total;
  V p(counts.size());
  for (size_t i = 0; i < counts.size(); ++i) {
    p[i] = degenerate ? (counts[i] + 0.5) / (total + 0.5 * counts.size())
                      : counts[i] / total;
  }
  return p;
}

inline double OracleDivergence(DivergenceKind kind, const V& p, const V& q) {
  double s = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    switch (kind) {
      case DivergenceKind::kKL:
        s += p[i] * std::log(p[i] / q[i]);
        break;
      case DivergenceKind::kED:
        s += (p[i] - q[i]) * (p[i] - q[i]);
        break;
      case DivergenceKind::kChi:
        s += (p[i] - q[i]) * (p[i] - q[i]) / q[i];
        break;
    }
  }
  return s;
}

struct OracleSplit {
  int feature = -1;
  double threshold = 0;
  double gain = 0;
};

// Every feature, every threshold between consecutive distinct values, counts
// recomputed from the raw rows on each side.
inline OracleSplit BruteForceRootSplit(const Dataset& d, DivergenceKind kind,
                                       size_t min_leaf) {
  auto counts = [&](const std::function<bool(size_t)>& in) {
    V t(2, 0), c(2, 0);
    for (size_t i = 0; i < d.num_rows(); ++i) {
      if (!in(i)) continue;
      (d.treatment()[i] ? t : c)[d.outcome()[i]] += 1;
    }
    return std::make_pair(t, c);
  };
  const auto [pt, pc] = counts([](size_t) { return true; });
  const double parent = OracleDivergence(kind, OracleSmooth(pt), OracleSmooth(pc));
  OracleSplit best;
  best.gain = parent + 1e-12;
  for (size_t f = 0; f < d.num_features(); ++f) {
    std::set<double> values(d.feature(f).begin(), d.feature(f).end());
    for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
      const double t = 0.5 * (*it + *std::next(it));
      const auto [lt, lc] = counts([&](size_t i) { return d.value(i, f) <= t; });
      const auto [rt, rc] = counts([&](size_t i) { return d.value(i, f) > t; });
      auto size = [](const V& v) { return static_cast<size_t>(v[0] + v[1]); };
      if (size(lt) < min_leaf || size(lc) < min_leaf || size(rt) < min_leaf ||
          size(rc) < min_leaf) {
        continue;
      }
      const double gain =
          OracleDivergence(kind, OracleSmooth(lt), OracleSmooth(lc)) +
          OracleDivergence(kind, OracleSmooth(rt), OracleSmooth(rc)) - parent;
      if (gain > best.gain) best = {static_cast<int>(f), t, gain};
    }
  }
  if (best.feature < 0) best.gain = 0;
  return best;
}

// ---- Greedy CART oracle ---------------------------------------------------
//
// Straight from the definition: for every feature and every midpoint between
// consecutive distinct values, count rows on each side and evaluate the
// weighted child Gini. First strictly better split wins (feature-major,
// threshold ascending).

struct OracleNode {
  int feature = -1;
  double threshold = 0;
  V value;
  std::unique_ptr<OracleNode> left, right;
};

inline double GiniRows(const Dataset& d, const std::vector<size_t>& rows) {
  double ones = 0;
  for (size_t r : rows) ones += d.outcome()[r];
  const double p = ones / rows.size();
  return 1 - p * p - (1 - p) * (1 - p);
}

inline std::unique_ptr<OracleNode> Cart(const Dataset& d,
                                        const std::vector<size_t>& rows, int depth,
                                        int max_depth, size_t min_leaf) {
  auto node = std::make_unique<OracleNode>();
  double ones = 0;
  for (size_t r : rows) ones += d.outcome()[r];
  node->value = {1 - ones / rows.size(), ones / rows.size()};
  const double g = GiniRows(d, rows);
  if (depth >= max_depth || g <= 0 || rows.size() < 2 * min_leaf) return node;

  double best = 0;
  for (size_t f = 0; f < d.num_features(); ++f) {
    std::set<double> values;
    for (size_t r : rows) values.insert(d.value(r, f));
    for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
      const double t = 0.5 * (*it + *std::next(it));
      std::vector<size_t> l, rr;
      for (size_t r : rows) (d.value(r, f) <= t ? l : rr).push_back(r);
      if (l.size() < min_leaf || rr.size() < min_leaf) continue;
      const double child =
          (l.size() * GiniRows(d, l) + rr.size() * GiniRows(d, rr)) / rows.size();
      if (g - child > best + 1e-12) {
        best = g - child;
        node->feature = static_cast<int>(f);
        node->threshold = t;
      }
    }
  }
  if (node->feature < 0) return node;
  std::vector<size_t> l, rr;
  for (size_t r : rows) (d.value(r, node->feature) <= node->threshold ? l : rr).push_back(r);
  node->left = Cart(d, l, depth + 1, max_depth, min_leaf);
  node->right = Cart(d, rr, depth + 1, max_depth, min_leaf);
  return node;
}

// Same splits, thresholds and leaf values, node by node.
inline bool SameTree(const DecisionTree& tree, int index, const OracleNode& oracle) {
  const TreeNode& node = tree.nodes[index];
  if (node.feature != oracle.feature) return false;
  if (std::fabs(node.value[1] - oracle.value[1]) > 1e-12) return false;
  if (oracle.feature < 0) return true;
  return node.threshold == oracle.threshold &&
         SameTree(tree, node.left, *oracle.left) &&
         SameTree(tree, node.right, *oracle.right);
}

// ---- AUUC ------------------------------------------------------------------

// Enumerates prefixes directly: for each k, gathers the k highest-scored rows
// (ties by index) from scratch and recomputes both arm means.
inline double AuucOracle(const V& s, const I& w, const I& y) {
  const size_t n = s.size();
  long double area = 0;
  for (size_t k = 1; k <= n; ++k) {
    std::vector<bool> taken(n, false);
    for (size_t step = 0; step < k; ++step) {
      size_t best = n;
      for (size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        if (best == n || s[i] > s[best]) best = i;
      }
      taken[best] = true;
    }
    long double yt = 0, nt = 0, yc = 0, nc = 0;
    for (size_t i = 0; i < n; ++i) {
      if (!taken[i]) continue;
      (w[i] ? yt : yc) += y[i];
      (w[i] ? nt : nc) += 1;
    }
    if (nt > 0 && nc > 0) area += (yt / nt - yc / nc) * k;
  }
  return static_cast<double>(area / (n * n));
}

}  // namespace upliftfs::oracle

#endif  // UPLIFTFS_TESTS_ORACLES_H_
