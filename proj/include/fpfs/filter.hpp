#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpfs/hash.hpp"
#include "fpfs/keys.hpp"
#include "fpfs/xor_table.hpp"

namespace fpfs {

// Wire values are part of the filter file format.
enum class Variant : std::uint8_t {
  plain = 0,      // ordinary r-bit xor filter over S; T is ignored
  naive = 1,      // one r-bit table over S and T, T stored with a flipped fingerprint
  two_filter = 2, // (r+a-1)-bit filter over S plus a 1-bit function over S and F
  integrated = 3, // one table, (r+a-1) filter bits and c one-bit subfilter columns per cell
};

[[nodiscard]] auto to_string(Variant v) -> std::string_view;

// How the integrated construction chooses (a, c).
enum class IfMode : std::uint8_t {
  c1,   // c = 1, a minimizes the c = 1 footprint
  cmin, // c = 2 (1 when T is empty), a from the c_min procedure
};

inline constexpr unsigned kMinR = 2;
inline constexpr unsigned kMaxR = 24;

struct BuildConfig {
  unsigned r = 8;
  Variant variant = Variant::two_filter;
  IfMode if_mode = IfMode::cmin;
  double epsilon = kDefaultEpsilon;
  Seed master{0x853c49e6748fea9bULL};
  unsigned max_retries = kDefaultMaxRetries;
  // When false, `a` is used verbatim instead of being selected from (s, t, r).
  bool auto_a = true;
  unsigned a = 0;
};

class DisjointnessViolation : public std::runtime_error {
public:
  DisjointnessViolation(std::vector<std::string> offenders, std::size_t total);
  // At most kMaxListed keys found in both S and T, in T order.
  [[nodiscard]] auto offenders() const noexcept -> const std::vector<std::string>& { return offenders_; }
  [[nodiscard]] auto total() const noexcept -> std::size_t { return total_; }

  static constexpr std::size_t kMaxListed = 1000;

private:
  std::vector<std::string> offenders_;
  std::size_t total_;
};

class DuplicateKey : public std::runtime_error {
public:
  explicit DuplicateKey(std::string_view key);
};

// A static filter that answers true for every key of S, false for every key
// of T, and true with probability about 2^-(r+a) for anything else.
class FpfsFilter {
public:
  FpfsFilter() = default;
  FpfsFilter(Variant variant, unsigned r, unsigned a, unsigned c, std::vector<XorTable> tables, std::uint64_t s,
             std::uint64_t t, std::uint64_t f);

  [[nodiscard]] auto variant() const noexcept -> Variant { return variant_; }
  [[nodiscard]] auto r() const noexcept -> unsigned { return r_; }
  [[nodiscard]] auto a() const noexcept -> unsigned { return a_; }
  [[nodiscard]] auto c() const noexcept -> unsigned { return c_; }
  [[nodiscard]] auto s() const noexcept -> std::uint64_t { return s_; }
  [[nodiscard]] auto t() const noexcept -> std::uint64_t { return t_; }
  [[nodiscard]] auto f() const noexcept -> std::uint64_t { return f_; }
  [[nodiscard]] auto tables() const noexcept -> const std::vector<XorTable>& { return tables_; }
  [[nodiscard]] auto tables() noexcept -> std::vector<XorTable>& { return tables_; }
  // A filter built with an empty T is a plain r-bit filter whatever its variant.
  [[nodiscard]] auto degenerate() const noexcept -> bool {
    return single_ && (variant_ == Variant::two_filter || variant_ == Variant::integrated);
  }

  // Total cell bits over all tables.
  [[nodiscard]] auto memory_bits() const noexcept -> std::uint64_t;
  // Fingerprint bits checked by the first (or only) filter.
  [[nodiscard]] auto first_bits() const noexcept -> unsigned;

  // Retry index of each table's successful attempt; not serialized.
  std::vector<unsigned> retries;
  // Times the integrated table grew because a column held more keys than sized for.
  unsigned resizes = 0;

  [[nodiscard]] auto query(std::string_view key) const noexcept -> bool { return query(key, NullProbe{}); }

  // Probe receives (table index, cell index) for every cell read.
  template <class Probe>
  [[nodiscard]] auto query(std::string_view key, Probe&& probe) const noexcept -> bool {
    const XorTable& t0 = tables_[0];
    const KeyDigest d = t0.key_digest(key);
    const unsigned k = first_bits_;
    if (!single_ && variant_ == Variant::integrated) {
      const std::uint32_t word = t0.eval(d, probe, 0);
      if ((word & first_mask_) != fingerprint(d, k)) {
        return false;
      }
      const unsigned column = c_ == 1 ? 1 : subfilter_select(d);
      return ((word >> (k + column - 1)) & 1U) != 0;
    }
    if (t0.eval(d, probe, 0) != fingerprint(d, k)) {
      return false;
    }
    if (tables_.size() == 1) {
      return true;
    }
    const XorTable& t1 = tables_[1];
    return t1.eval(t1.key_digest(key), probe, 1) == 1;
  }

private:
  Variant variant_{Variant::plain};
  unsigned r_{};
  unsigned a_{};
  unsigned c_{};
  unsigned first_bits_{};
  std::uint32_t first_mask_{};
  // One table holding nothing but r-bit fingerprints.
  bool single_{};
  std::vector<XorTable> tables_;
  std::uint64_t s_{};
  std::uint64_t t_{};
  std::uint64_t f_{};
};

// T keys that pass the first filter stored in the low `fingerprint_bits` bits
// of `first`. Duplicates in T are reported once.
struct ResidualSet {
  KeyList keys;
  [[nodiscard]] auto f() const -> std::size_t { return keys.size(); }
};

[[nodiscard]] auto residual_set(const XorTable& first, unsigned fingerprint_bits, const KeySource& T) -> ResidualSet;

// Checks S for duplicates and S against T for overlap.
void check_disjoint(const KeySource& S, const KeySource& T);

[[nodiscard]] auto build_plain(const KeySource& S, const BuildConfig& cfg) -> FpfsFilter;
[[nodiscard]] auto build_naive(const KeySource& S, const KeySource& T, const BuildConfig& cfg) -> FpfsFilter;
[[nodiscard]] auto build_tf(const KeySource& S, const KeySource& T, const BuildConfig& cfg) -> FpfsFilter;
[[nodiscard]] auto build_if(const KeySource& S, const KeySource& T, const BuildConfig& cfg) -> FpfsFilter;

// Dispatches on cfg.variant.
[[nodiscard]] auto build(const KeySource& S, const KeySource& T, const BuildConfig& cfg) -> FpfsFilter;

} // namespace fpfs
