#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace guirec {

// Seedable random stream that reproduces bit-for-bit on every platform.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard distributions are implementation-defined, so every
// derived draw (uniform reals, bounded integers, categorical) is computed here
// from raw 64-bit outputs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform01();

  // Uniform on [0, n); n must be positive. Unbiased (rejection sampling).
  std::size_t uniform_index(std::size_t n);

  // Uniform on the closed interval [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  bool bernoulli(double p) { return uniform01() < p; }

  // Index i with probability weights[i] / sum(weights). Weights must be
  // non-negative with a positive sum.
  std::size_t weighted_index(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

// Derives an independent stream seed from a master seed (splitmix64 of
// master + (stream + 1) * 0x9E3779B97F4A7C15).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace guirec
