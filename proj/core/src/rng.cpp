#include "mecsim/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mecsim {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  if (!(lo <= hi)) {
    throw std::invalid_argument("Rng::uniform: lo must not exceed hi");
  }
  return lo + (hi - lo) * uniform();
}

double Rng::normal(double mean, double stddev) {
  const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::exponential(double mean) {
  if (!(mean > 0.0)) {
    throw std::invalid_argument("Rng::exponential: mean must be positive");
  }
  return -mean * std::log(1.0 - uniform());
}

std::size_t Rng::uniform_index(std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("Rng::uniform_index: n must be positive");
  }
  const std::uint64_t range = static_cast<std::uint64_t>(n);
  const std::uint64_t min = (0 - range) % range;  // 2^64 mod n
  std::uint64_t x = next_u64();
  while (x < min) {
    x = next_u64();
  }
  return static_cast<std::size_t>(x % range);
}

}  // namespace mecsim
