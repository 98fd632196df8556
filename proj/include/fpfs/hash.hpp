#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <string_view>

namespace fpfs {

struct Seed {
  std::uint64_t value{};
  friend constexpr auto operator==(const Seed&, const Seed&) -> bool = default;
};

// Which table of a filter a seed belongs to. Mixed into derived seeds so that
// every (role, retry) pair gets its own hash functions.
enum class TableRole : std::uint8_t {
  plain = 0,
  naive = 1,
  first = 2,
  second = 3,
  integrated = 4,
};

// 128 bits of keyed hash output split into two independent streams:
//   lo -> the three probe positions
//   hi -> fingerprint (bits 0..31) and subfilter selector (bit 63)
struct KeyDigest {
  std::uint64_t lo{};
  std::uint64_t hi{};
  friend constexpr auto operator==(const KeyDigest&, const KeyDigest&) -> bool = default;
};

struct KeyDigestHash {
  auto operator()(const KeyDigest& d) const noexcept -> std::size_t {
    return static_cast<std::size_t>(d.lo ^ std::rotl(d.hi, 17));
  }
};

// MurmurHash3 64-bit finalizer. A bijection on 64-bit words.
[[nodiscard]] constexpr auto mix64(std::uint64_t x) noexcept -> std::uint64_t {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

// Two-lane multiply/rotate hash over the key bytes in 16-byte blocks with a
// mix64 finalizer per lane (MurmurHash3 x64/128 structure, 64-bit seed).
// Output is stable across runs and platforms.
[[nodiscard]] auto digest(std::string_view key, Seed seed) noexcept -> KeyDigest;

[[nodiscard]] auto derive_seed(Seed master, TableRole role, std::uint32_t retry) noexcept -> Seed;

// One cell per segment: p[i] in [i*segment_len, (i+1)*segment_len). Uses only
// d.lo, reduced with multiply-shift (no modulo).
[[nodiscard]] inline auto positions(const KeyDigest& d, std::uint64_t segment_len) noexcept
    -> std::array<std::uint64_t, 3> {
  __extension__ using Wide = unsigned __int128;
  auto reduce = [segment_len](std::uint64_t x) {
    return static_cast<std::uint64_t>((static_cast<Wide>(x) * segment_len) >> 64);
  };
  return {reduce(d.lo), segment_len + reduce(std::rotl(d.lo, 21)),
          2 * segment_len + reduce(std::rotl(d.lo, 42))};
}

// bits in [1, 32]; low bits of d.hi.
[[nodiscard]] constexpr auto fingerprint(const KeyDigest& d, unsigned bits) noexcept -> std::uint32_t {
  return static_cast<std::uint32_t>(d.hi & ((std::uint64_t{1} << bits) - 1));
}

// Returns 1 or 2; top bit of d.hi.
[[nodiscard]] constexpr auto subfilter_select(const KeyDigest& d) noexcept -> unsigned {
  return 1U + static_cast<unsigned>(d.hi >> 63);
}

} // namespace fpfs
