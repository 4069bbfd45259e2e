#pragma once

#include <cstdint>
#include <random>

namespace bookml {

// All randomness goes through mt19937_64 plus the helpers below so results do
// not depend on the standard library's distribution implementations.
using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n), n > 0 (Lemire multiply-shift, no rejection;
// bias is below 2^-40 for every n used here).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t x = rng();
  const std::uint64_t xl = x & 0xffffffffULL, xh = x >> 32;
  const std::uint64_t nl = n & 0xffffffffULL, nh = n >> 32;
  const std::uint64_t mid = xh * nl + ((xl * nl) >> 32);
  const std::uint64_t mid2 = xl * nh + (mid & 0xffffffffULL);
  return xh * nh + (mid >> 32) + (mid2 >> 32);
}

template <typename It>
void shuffle(It first, It last, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = uniform_index(rng, i);
    std::swap(first[i - 1], first[j]);
  }
}

}  // namespace bookml
