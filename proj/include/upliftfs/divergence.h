#ifndef UPLIFTFS_DIVERGENCE_H_
#define UPLIFTFS_DIVERGENCE_H_

#include <span>
#include <string>
#include <vector>

namespace upliftfs {

// Distribution divergences between the treatment-arm (P) and control-arm (Q)
// class distributions.
//   KL  = sum p log(p / q)   (natural log)
//   ED  = sum (p - q)^2
//   Chi = sum (p - q)^2 / q
enum class DivergenceKind { kKL, kED, kChi };

std::string DivergenceName(DivergenceKind kind);
DivergenceKind ParseDivergence(const std::string& name);

// Throws upliftfs::Error on a length mismatch or fewer than two classes and
// std::logic_error if a zero q reaches KL/Chi (callers must smooth first).
double Divergence(DivergenceKind kind, std::span<const double> p,
                  std::span<const double> q);

// Class proportions of one arm from raw class counts. When any raw
// proportion is exactly 0 or 1, every component becomes
// (c + 0.5) / (total + 0.5 * C) so KL and Chi stay finite.
std::vector<double> SmoothedProportions(std::span<const double> counts);

}  // namespace upliftfs

#endif  // UPLIFTFS_DIVERGENCE_H_
