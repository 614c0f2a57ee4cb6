#ifndef UPLIFTFS_RANDOM_H_
#define UPLIFTFS_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace upliftfs {

using RandomEngine = std::mt19937_64;

// Mixes a parent seed with a stream index (splitmix64 finalizer). Used for
// every per-trial, per-tree and per-arm seed so that results never depend on
// the order in which work items are scheduled.
uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

// Same, keyed by a short tag ("treatment", "control", ...).
uint64_t DeriveSeed(uint64_t seed, std::string_view tag);

}  // namespace upliftfs

#endif  // UPLIFTFS_RANDOM_H_
