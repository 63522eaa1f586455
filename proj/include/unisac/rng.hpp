#pragma once

#include <cstdint>
#include <random>

#include "unisac/types.hpp"

namespace unisac {

// Counter-based stream derivation: stream k of master seed s is seeded with
// splitmix64 applied to s xor a fixed odd multiple of k, so trials are
// reproducible and independent of evaluation order or worker count.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  static RngStream derive(std::uint64_t master, std::uint64_t stream_id) {
    return RngStream(splitmix64(master ^ (0xd1342543de82ef95ULL * (stream_id + 1))));
  }

  std::mt19937_64& gen() { return gen_; }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }

  std::uint64_t uniform_index(std::uint64_t count) {
    return std::uniform_int_distribution<std::uint64_t>(0, count - 1)(gen_);
  }

  double gaussian(double stddev = 1.0) {
    return std::normal_distribution<double>(0.0, stddev)(gen_);
  }

  /// Circularly symmetric complex Gaussian with per-entry variance `var`.
  Complex complex_gaussian(double var) {
    const double s = std::sqrt(var / 2.0);
    return {gaussian(s), gaussian(s)};
  }

  bool bit() { return (gen_() & 1u) != 0; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace unisac
