#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace m2m {

// PCG32 generator. Used everywhere randomness is needed so that runs are
// reproducible across platforms and the full state serializes as two u64s
// (std::mt19937 + std::*_distribution are implementation-defined and would
// break cross-run checkpoint equivalence).
class Pcg32 {
 public:
  explicit Pcg32(uint64_t seed = 0x853c49e6748fea9bULL, uint64_t stream = 1) {
    state_ = 0;
    inc_ = (stream << 1u) | 1u;
    next_u32();
    state_ += seed;
    next_u32();
  }

  uint32_t next_u32() {
    uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
    uint32_t rot = static_cast<uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
  }

  // Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u32()) * (1.0 / 4294967296.0);
  }

  // Uniform integer in [lo, hi], inclusive. Unbiased via rejection.
  int uniform_int(int lo, int hi) {
    uint32_t range = static_cast<uint32_t>(hi - lo) + 1u;
    if (range == 0) return static_cast<int>(next_u32());  // full 32-bit range
    uint32_t threshold = (-range) % range;
    for (;;) {
      uint32_t r = next_u32();
      if (r >= threshold) return lo + static_cast<int>(r % range);
    }
  }

  double uniform(double a, double b) { return a + (b - a) * next_double(); }

  // Standard normal via Box-Muller (single value per call; no cached spare,
  // so the state is exactly (state, inc)).
  double normal() {
    double u1 = (static_cast<double>(next_u32()) + 1.0) / 4294967297.0;
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  std::pair<uint64_t, uint64_t> state() const { return {state_, inc_}; }
  void restore(uint64_t state, uint64_t inc) {
    state_ = state;
    inc_ = inc;
  }

 private:
  uint64_t state_;
  uint64_t inc_;
};

// Deterministic permutation of [0, n). Pure function of (seed, epoch) so data
// order never depends on mutable state and checkpoint resume can recompute it.
inline std::vector<int> deterministic_permutation(int n, uint64_t seed,
                                                  uint64_t epoch) {
  std::vector<int> idx(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  Pcg32 rng(seed ^ 0x9e3779b97f4a7c15ULL, epoch * 2 + 1);
  for (int i = n - 1; i > 0; --i) {
    int j = rng.uniform_int(0, i);
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  return idx;
}

}  // namespace m2m
