#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "fpfs/keys.hpp"

namespace fpfs::test {

// Keys of varying length and content, distinct for distinct indices.
inline auto varied_key(std::uint64_t seed, std::uint64_t i) -> std::string {
  std::mt19937_64 rng(seed * 0x100000001b3ULL + i);
  std::string k = std::to_string(i) + ":";
  const std::size_t extra = rng() % 40;
  for (std::size_t j = 0; j < extra; ++j) {
    k.push_back(static_cast<char>(rng() & 0xFF));
  }
  return k;
}

inline auto binomial_sigma(double n, double p) -> double { return std::sqrt(n * p * (1 - p)); }

inline auto keys_of(const KeySource& src) -> KeyList {
  KeyList out;
  src.for_each([&](std::string_view k) { out.push_back(k); });
  return out;
}

} // namespace fpfs::test
