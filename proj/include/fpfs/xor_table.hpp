#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fpfs/hash.hpp"
#include "fpfs/keys.hpp"

namespace fpfs {

inline constexpr double kDefaultEpsilon = 0.23;
inline constexpr std::uint64_t kTableSlack = 32;
inline constexpr unsigned kDefaultMaxRetries = 100;

// Fixed-width cells packed LSB-first into a byte stream: cell i occupies
// stream bits [i*w, (i+1)*w), stream bit j is bit (j % 8) of byte j / 8.
// This is also the on-disk layout.
class PackedCells {
public:
  PackedCells() = default;
  PackedCells(std::uint64_t count, unsigned width);

  [[nodiscard]] auto get(std::uint64_t i) const noexcept -> std::uint32_t {
    const std::uint64_t bit = i * width_;
    return static_cast<std::uint32_t>((load64(bit >> 3) >> (bit & 7)) & mask_);
  }
  void set(std::uint64_t i, std::uint32_t value) noexcept;

  [[nodiscard]] auto size() const noexcept -> std::uint64_t { return count_; }
  [[nodiscard]] auto width() const noexcept -> unsigned { return width_; }
  [[nodiscard]] auto packed_bytes() const noexcept -> std::size_t { return (count_ * width_ + 7) / 8; }
  // Exactly packed_bytes() bytes.
  [[nodiscard]] auto bytes() const noexcept -> std::span<const std::uint8_t> {
    return {bytes_.data(), packed_bytes()};
  }
  [[nodiscard]] static auto from_bytes(std::uint64_t count, unsigned width, std::span<const std::uint8_t> bytes)
      -> PackedCells;

  friend auto operator==(const PackedCells& a, const PackedCells& b) -> bool {
    return a.count_ == b.count_ && a.width_ == b.width_ && a.bytes_ == b.bytes_;
  }

private:
  [[nodiscard]] auto load64(std::uint64_t byte) const noexcept -> std::uint64_t;

  std::uint64_t count_{};
  unsigned width_{};
  std::uint64_t mask_{};
  // packed_bytes() plus 8 bytes of zero padding for unaligned word access.
  std::vector<std::uint8_t> bytes_;
};

// Discards probe events; the default for lookups.
struct NullProbe {
  constexpr void operator()(unsigned /*table*/, std::uint64_t /*cell*/) const noexcept {}
};

// A w-bit xor-probing static function: 3 segments of segment_len cells; a key
// evaluates to the xor of its three probed cells.
class XorTable {
public:
  XorTable() = default;
  XorTable(unsigned cell_width, std::uint64_t segment_len, Seed seed, TableRole role = TableRole::plain);

  [[nodiscard]] auto cell_width() const noexcept -> unsigned { return cells_.width(); }
  [[nodiscard]] auto segment_len() const noexcept -> std::uint64_t { return segment_len_; }
  [[nodiscard]] auto cell_count() const noexcept -> std::uint64_t { return cells_.size(); }
  [[nodiscard]] auto seed() const noexcept -> Seed { return seed_; }
  [[nodiscard]] auto role() const noexcept -> TableRole { return role_; }
  [[nodiscard]] auto memory_bits() const noexcept -> std::uint64_t { return cell_count() * cell_width(); }

  [[nodiscard]] auto cells() const noexcept -> const PackedCells& { return cells_; }
  [[nodiscard]] auto cells() noexcept -> PackedCells& { return cells_; }

  [[nodiscard]] auto key_digest(std::string_view key) const noexcept -> KeyDigest { return digest(key, seed_); }

  template <class Probe = NullProbe>
  [[nodiscard]] auto eval(const KeyDigest& d, Probe&& probe = {}, unsigned table_index = 0) const noexcept
      -> std::uint32_t {
    const auto p = positions(d, segment_len_);
    probe(table_index, p[0]);
    probe(table_index, p[1]);
    probe(table_index, p[2]);
    return cells_.get(p[0]) ^ cells_.get(p[1]) ^ cells_.get(p[2]);
  }
  [[nodiscard]] auto eval(std::string_view key) const noexcept -> std::uint32_t { return eval(key_digest(key)); }

  static auto from_cells(std::uint64_t segment_len, Seed seed, TableRole role, PackedCells cells) -> XorTable;

  friend auto operator==(const XorTable&, const XorTable&) -> bool = default;

private:
  std::uint64_t segment_len_{};
  Seed seed_{};
  TableRole role_{TableRole::plain};
  PackedCells cells_;
};

// Cells per segment for n keys at the given space overhead (0.23 -> 1.23 n
// cells), plus a fixed slack of 32 cells so tiny sets stay constructible.
[[nodiscard]] auto table_size(std::uint64_t n, double epsilon = kDefaultEpsilon) -> std::uint64_t;

struct PeelStep {
  std::uint64_t cell;
  std::uint32_t key;
  friend auto operator==(const PeelStep&, const PeelStep&) -> bool = default;
};

using PeelOrder = std::vector<PeelStep>;

struct PeelFailure {
  std::size_t unpeeled;
};

// Repeatedly removes a key that is the only remaining key on one of its
// cells. Fails iff a non-empty 2-core remains.
[[nodiscard]] auto peel(std::span<const KeyDigest> keys, std::uint64_t segment_len)
    -> std::variant<PeelOrder, PeelFailure>;

// Back-substitution in reverse peel order: each designated cell becomes
// value ^ (the other two cells). Only the bit field [shift, shift + width) of
// each cell is touched, so several functions can share one table. width = 0
// means the full cell.
void assign(const PeelOrder& order, std::span<const KeyDigest> keys, std::span<const std::uint32_t> values,
            XorTable& table, unsigned shift = 0, unsigned width = 0);

// Fills every cell with pseudo-random bits derived from the table seed.
// Cells not designated by any key then still look random to non-members.
void fill_random(XorTable& table);

class BuildExhausted : public std::runtime_error {
public:
  BuildExhausted(TableRole role, unsigned attempts);
  [[nodiscard]] auto role() const noexcept -> TableRole { return role_; }
  [[nodiscard]] auto attempts() const noexcept -> unsigned { return attempts_; }

private:
  TableRole role_;
  unsigned attempts_;
};

struct TableSpec {
  unsigned cell_width = 8;
  double epsilon = kDefaultEpsilon;
  Seed master{};
  TableRole role = TableRole::plain;
  // The build makes 1 + max_retries attempts.
  unsigned max_retries = kDefaultMaxRetries;
};

struct BuiltTable {
  XorTable table;
  unsigned retries{};
};

// Value for key `index` of the source, computed from its digest under the
// attempt's seed (fingerprints change with the seed).
using ValueFn = std::function<std::uint32_t(const KeyDigest&, std::size_t index)>;

[[nodiscard]] auto build_with_retries(const KeySource& keys, const ValueFn& value, const TableSpec& spec)
    -> BuiltTable;

[[nodiscard]] auto build_with_retries(std::span<const std::pair<std::string, std::uint32_t>> pairs,
                                      const TableSpec& spec) -> BuiltTable;

} // namespace fpfs
