#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace mecsim {

// Mixes a master seed with a stream index into an independent sub-seed.
// Counter-based (SplitMix64 finalizer), so sub-seeds for any index can be
// derived in any order without materializing the ones before it.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Deterministic random source over mt19937_64. The distribution transforms
// are implemented here instead of the std:: distribution adaptors, which are
// not specified bit-for-bit; every stream drawn through this class is
// identical across standard libraries and platforms.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Gaussian via Box-Muller; consumes exactly two uniforms per call.
  double normal(double mean, double stddev);

  // Exponential with the given mean via inverse CDF; consumes one uniform.
  double exponential(double mean);

  // Unbiased integer in [0, n) by rejection sampling. n must be > 0.
  std::size_t uniform_index(std::size_t n);

private:
  std::mt19937_64 gen_;
};

}  // namespace mecsim
