#include "upliftfs/divergence.h"

#include <cmath>
#include <stdexcept>

#include "upliftfs/error.h"

namespace upliftfs {

std::string DivergenceName(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::kKL:
      return "kl";
    case DivergenceKind::kED:
      return "ed";
    case DivergenceKind::kChi:
      return "chi";
  }
  return "kl";
}

DivergenceKind ParseDivergence(const std::string& name) {
  if (name == "kl" || name == "KL") return DivergenceKind::kKL;
  if (name == "ed" || name == "ED") return DivergenceKind::kED;
  if (name == "chi" || name == "Chi" || name == "CHI") return DivergenceKind::kChi;
  throw Error("unknown divergence '" + name + "'");
}

double Divergence(DivergenceKind kind, std::span<const double> p,
                  std::span<const double> q) {
  if (p.size() != q.size()) throw Error("divergence: length mismatch");
  if (p.size() < 2) throw Error("divergence: need at least two classes");
  double d = 0.0;
  switch (kind) {
    case DivergenceKind::kKL:
      for (size_t i = 0; i < p.size(); ++i) {
        if (q[i] <= 0.0) throw std::logic_error("KL: unsmoothed zero q");
        if (p[i] > 0.0) d += p[i] * std::log(p[i] / q[i]);
      }
      // Rounding can leave a tiny negative value when P == Q.
      return d > 0.0 ? d : 0.0;
    case DivergenceKind::kED:
      for (size_t i = 0; i < p.size(); ++i) d += (p[i] - q[i]) * (p[i] - q[i]);
      return d;
    case DivergenceKind::kChi:
      for (size_t i = 0; i < p.size(); ++i) {
        if (q[i] <= 0.0) throw std::logic_error("Chi: unsmoothed zero q");
        d += (p[i] - q[i]) * (p[i] - q[i]) / q[i];
      }
      return d;
  }
  return d;
}

std::vector<double> SmoothedProportions(std::span<const double> counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  std::vector<double> out(counts.size());
  bool degenerate = total <= 0.0;
  for (double c : counts) degenerate = degenerate || c <= 0.0 || c >= total;
  if (degenerate) {
    const double denom = total + 0.5 * static_cast<double>(counts.size());
    for (size_t i = 0; i < counts.size(); ++i) out[i] = (counts[i] + 0.5) / denom;
  } else {
    for (size_t i = 0; i < counts.size(); ++i) out[i] = counts[i] / total;
  }
  return out;
}

}  // namespace upliftfs
