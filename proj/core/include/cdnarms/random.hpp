#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cdnarms {

using Rng = std::mt19937_64;

// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hashTag(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Derives an independent child seed; used to give every role (regime draws,
/// noise draws, restart k, ...) its own stream.
constexpr std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t a,
                                   std::uint64_t b = 0) noexcept {
  return mix64(mix64(mix64(seed) ^ a) ^ b);
}

inline Rng makeStream(std::uint64_t seed, std::string_view role,
                      std::uint64_t index = 0) {
  return Rng(deriveSeed(seed, hashTag(role), index));
}

}  // namespace cdnarms
