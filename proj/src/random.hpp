#pragma once

// Seeded randomness for everything that must reproduce bit-for-bit. The
// std:: distributions are implementation-defined, so draws go through
// Boost.Random whose algorithms are fixed across platforms.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace camel::detail {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; decorrelates seeds for independent streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  boost::random::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(rng);
}

inline double standard_normal(Rng& rng) {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

// Stream identifiers, one per consumer of a user seed.
inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kPairStream = 2;
inline constexpr std::uint64_t kSplitStream = 3;

}  // namespace camel::detail
