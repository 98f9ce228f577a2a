#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "dreject/math.hpp"

namespace dreject {

// splitmix64 finalizer; all derived seeds in the project flow through this.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from (seed, stream). Used to give each
// repetition / purpose its own generator without coordination.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL));
}

// Fixed stream tags so the same base seed never feeds two purposes.
namespace seed_stream {
inline constexpr std::uint64_t sample = 0x01;
inline constexpr std::uint64_t split = 0x02;
inline constexpr std::uint64_t fit = 0x03;
inline constexpr std::uint64_t calibration = 0x04;
inline constexpr std::uint64_t query = 0x05;
inline constexpr std::uint64_t selection = 0x06;
inline constexpr std::uint64_t monte_carlo = 0x07;
}  // namespace seed_stream

// mt19937_64 with explicit value mappings. The engine sequence is fixed by the
// standard, and the mappings below avoid std::*_distribution, whose output is
// implementation-defined; results are therefore reproducible across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1): 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1): never returns an exact endpoint.
  double uniform01_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via inverse-CDF transform; one engine draw per value.
  double normal() { return normal_quantile(uniform01_open()); }

  // Fisher-Yates index shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(engine_() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dreject
