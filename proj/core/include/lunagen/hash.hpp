// Copyright 2026 The Lunagen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace lunagen {

// Counter-based randomness: every stochastic quantity in the toolkit is a pure
// function of (seed, counters...), so parallel evaluation order never changes
// results. mix64 is the splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed ^ (value + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2)));
}

template <typename... Counters>
constexpr std::uint64_t hash_counters(std::uint64_t seed, Counters... counters) {
  std::uint64_t h = mix64(seed);
  ((h = hash_combine(h, static_cast<std::uint64_t>(counters))), ...);
  return h;
}

constexpr std::uint64_t hash_string(std::uint64_t seed, std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
    h *= 0x100000001b3ull;
  }
  return hash_combine(mix64(seed), h);
}

/// Uniform double in [0, 1) from 53 high bits.
constexpr double to_unit_double(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

constexpr double uniform_double(std::uint64_t seed, std::uint64_t counter) {
  return to_unit_double(hash_counters(seed, counter));
}

/// Sequential stream for algorithms that consume a variable number of draws
/// (Poisson sampling, noise). Still seed-deterministic.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(mix64(seed)) {}
  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }
  double next_double() { return to_unit_double(next_u64()); }

 private:
  std::uint64_t state_;
};

// FNV-1a 64, used for dataset file checksums (corruption detection, not
// security).
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

constexpr std::uint64_t fnv1a64(const unsigned char* data, std::size_t n,
                                std::uint64_t h = kFnvOffset) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<std::uint64_t>(data[i]);
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace lunagen
