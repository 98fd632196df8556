#pragma once

#include <cstdint>

namespace fpfs {

// Parameter selection for the two-filter and integrated constructions.
// s = |S|, t = |T|, r = requested fingerprint bits. All functions require
// s >= 1 and r >= 2.

// Expected number of T keys that pass a first filter with r+a-1 fingerprint
// bits: t / 2^(r+a-1).
[[nodiscard]] auto expected_residual(std::uint64_t t, unsigned r, unsigned a) -> double;

// Bits added to the first filter of the two-filter construction. Zero while
// t / 2^(r-1) <= 2s (equality included); otherwise the smallest a that brings
// t / 2^(r+a-1) down to at most 2s.
[[nodiscard]] auto compute_a_tf(std::uint64_t s, std::uint64_t t, unsigned r) -> unsigned;

// 1 + ceil(t / (s * 2^(r-1))).
[[nodiscard]] auto compute_c_min(std::uint64_t s, std::uint64_t t, unsigned r) -> unsigned;

struct IfParams {
  unsigned a;
  unsigned c;
  friend auto operator==(const IfParams&, const IfParams&) -> bool = default;
};

// c_min <= 2: (0, max(c_min, 1)). Otherwise add ceil(log2(c_min - 1)) bits to
// r, which brings c_min back to 2.
[[nodiscard]] auto select_if_params(std::uint64_t s, std::uint64_t t, unsigned r) -> IfParams;

// Integrated filter with c = 1: start at a = 0 and keep adding bits while the
// (s + t/2^(r+a-1)) * (r+a) footprint strictly decreases.
[[nodiscard]] auto compute_a_if_c1(std::uint64_t s, std::uint64_t t, unsigned r) -> unsigned;

// The closed-form approximation of the above that treats r+a as r.
[[nodiscard]] auto compute_a_if_c1_closed_form(std::uint64_t s, std::uint64_t t, unsigned r) -> unsigned;

} // namespace fpfs
