#pragma once

#include <cstdint>
#include <vector>

#include "fpfs/filter.hpp"
#include "fpfs/xor_table.hpp"

namespace fpfs {

// Memory models in bits, computed in doubles. They count (1+eps) cells per
// stored key and ignore the fixed per-table slack.

// (s + t)(1 + eps) r
[[nodiscard]] auto m_naive(double s, double t, unsigned r, double epsilon = kDefaultEpsilon) -> double;

struct TfSize {
  double bits;
  unsigned a;
};

// s(1+eps)(r+a) + t/2^(r+a-1) (1+eps), a from compute_a_tf. t = 0 gives
// the plain model.
[[nodiscard]] auto m_tf(std::uint64_t s, std::uint64_t t, unsigned r, double epsilon = kDefaultEpsilon) -> TfSize;

struct IfSize {
  double bits;
  unsigned a;
  unsigned c;
};

// c1: (s + t/2^(r+a-1))(1+eps)(r+a). cmin: s(1+eps)(r+a+c-1).
[[nodiscard]] auto m_if(std::uint64_t s, std::uint64_t t, unsigned r, IfMode mode, double epsilon = kDefaultEpsilon)
    -> IfSize;

// Bits per cell beyond r-1 when a bits move to the filter part:
// a + 1 + ceil(t / (s 2^(r+a-1))).
[[nodiscard]] auto extra_bits_if(double s, double t, unsigned r, unsigned a) -> unsigned;

// 2^-r for plain and naive, 2^-(r+a) otherwise.
[[nodiscard]] auto predicted_fpp(Variant v, unsigned r, unsigned a) -> double;

// Space needed by any structure that accepts all of S, rejects all of T and
// accepts other keys with probability at most fpp:
//   min over p in (0, fpp] of  s log2(1/p) + t p log2(e).
// The objective has derivative -s/(p ln 2) + t/ln 2, zero at p = s/t, and is
// convex in p, so the minimum sits at min(fpp, s/t).
// Throws std::domain_error unless 0 < fpp < 0.5.
[[nodiscard]] auto lower_bound(double s, double t, double fpp) -> double;

struct SizingReport {
  std::uint64_t s{};
  std::uint64_t t{};
  unsigned r{};
  double epsilon{};
  double naive_bits{};
  double tf_bits{};
  double if_c1_bits{};
  double if_cmin_bits{};
  unsigned a_tf{};
  unsigned a_if_c1{};
  unsigned a_if_cmin{};
  unsigned c{};
  double predicted_fpp{};
  double lower_bound_bits{};

  [[nodiscard]] auto per_element(double bits) const -> double { return s == 0 ? 0.0 : bits / static_cast<double>(s); }
};

// One report per t. predicted_fpp and lower_bound_bits use the target
// 2^-(r + a_tf); the bound is 0 when s or t is 0.
[[nodiscard]] auto sweep(std::uint64_t s, unsigned r, double epsilon, const std::vector<std::uint64_t>& t_values)
    -> std::vector<SizingReport>;

// Model prediction for a built filter's parameters, including the fixed
// slack each table carries.
[[nodiscard]] auto predicted_bits(const FpfsFilter& filter, double epsilon = kDefaultEpsilon) -> double;

} // namespace fpfs
