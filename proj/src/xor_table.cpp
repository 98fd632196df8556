#include "fpfs/xor_table.hpp"

#include <cmath>
#include <cstring>
#include <limits>

namespace fpfs {

PackedCells::PackedCells(std::uint64_t count, unsigned width)
    : count_(count), width_(width), mask_((std::uint64_t{1} << width) - 1) {
  if (width < 1 || width > 32) {
    throw std::invalid_argument("cell width must be in [1, 32], got " + std::to_string(width));
  }
  bytes_.assign(packed_bytes() + 8, 0);
}

auto PackedCells::load64(std::uint64_t byte) const noexcept -> std::uint64_t {
  std::uint64_t v;
  std::memcpy(&v, bytes_.data() + byte, sizeof v);
  if constexpr (std::endian::native == std::endian::big) {
    v = __builtin_bswap64(v);
  }
  return v;
}

void PackedCells::set(std::uint64_t i, std::uint32_t value) noexcept {
  const std::uint64_t bit = i * width_;
  const std::uint64_t byte = bit >> 3;
  const unsigned shift = static_cast<unsigned>(bit & 7);
  std::uint64_t word = load64(byte);
  word &= ~(mask_ << shift);
  word |= (static_cast<std::uint64_t>(value) & mask_) << shift;
  if constexpr (std::endian::native == std::endian::big) {
    word = __builtin_bswap64(word);
  }
  std::memcpy(bytes_.data() + byte, &word, sizeof word);
}

auto PackedCells::from_bytes(std::uint64_t count, unsigned width, std::span<const std::uint8_t> bytes)
    -> PackedCells {
  PackedCells cells(count, width);
  if (bytes.size() != cells.packed_bytes()) {
    throw std::invalid_argument("packed cell block has " + std::to_string(bytes.size()) + " bytes, expected " +
                                std::to_string(cells.packed_bytes()));
  }
  std::memcpy(cells.bytes_.data(), bytes.data(), bytes.size());
  // Bits past the last cell must be clear so equal tables compare equal.
  const std::uint64_t used_bits = count * width;
  if (used_bits % 8 != 0) {
    cells.bytes_[used_bits / 8] &= static_cast<std::uint8_t>((1U << (used_bits % 8)) - 1);
  }
  return cells;
}

XorTable::XorTable(unsigned cell_width, std::uint64_t segment_len, Seed seed, TableRole role)
    : segment_len_(segment_len), seed_(seed), role_(role), cells_(3 * segment_len, cell_width) {
  if (segment_len == 0) {
    throw std::invalid_argument("segment_len must be at least 1");
  }
}

auto XorTable::from_cells(std::uint64_t segment_len, Seed seed, TableRole role, PackedCells cells) -> XorTable {
  if (segment_len == 0 || cells.size() != 3 * segment_len) {
    throw std::invalid_argument("cell count does not match 3 * segment_len");
  }
  XorTable t;
  t.segment_len_ = segment_len;
  t.seed_ = seed;
  t.role_ = role;
  t.cells_ = std::move(cells);
  return t;
}

auto table_size(std::uint64_t n, double epsilon) -> std::uint64_t {
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("epsilon must be non-negative");
  }
  // The relative nudge keeps products such as 1.23 * 100000 from rounding up
  // past an exact integer.
  const double scaled = (1.0 + epsilon) * static_cast<double>(n);
  const auto cells = static_cast<std::uint64_t>(std::ceil(scaled - scaled * 1e-12)) + kTableSlack;
  return (cells + 2) / 3;
}

auto peel(std::span<const KeyDigest> keys, std::uint64_t segment_len) -> std::variant<PeelOrder, PeelFailure> {
  if (keys.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::length_error("too many keys for one table");
  }
  const std::uint64_t cells = 3 * segment_len;
  const auto n = static_cast<std::uint32_t>(keys.size());

  // Per cell: number of incident live keys and the xor of their indices.
  // A cell with count 1 names its only key directly.
  std::vector<std::uint32_t> count(cells, 0);
  std::vector<std::uint32_t> key_xor(cells, 0);
  for (std::uint32_t k = 0; k < n; ++k) {
    for (auto p : positions(keys[k], segment_len)) {
      ++count[p];
      key_xor[p] ^= k;
    }
  }

  std::vector<std::uint64_t> queue;
  queue.reserve(cells / 4 + 16);
  for (std::uint64_t c = 0; c < cells; ++c) {
    if (count[c] == 1) {
      queue.push_back(c);
    }
  }

  PeelOrder order;
  order.reserve(n);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint64_t c = queue[head];
    if (count[c] != 1) {
      continue;
    }
    const std::uint32_t k = key_xor[c];
    order.push_back({c, k});
    for (auto p : positions(keys[k], segment_len)) {
      --count[p];
      key_xor[p] ^= k;
      if (count[p] == 1) {
        queue.push_back(p);
      }
    }
  }

  if (order.size() != n) {
    return PeelFailure{n - order.size()};
  }
  return order;
}

void assign(const PeelOrder& order, std::span<const KeyDigest> keys, std::span<const std::uint32_t> values,
            XorTable& table, unsigned shift, unsigned width) {
  if (width == 0) {
    width = table.cell_width() - shift;
  }
  if (shift + width > table.cell_width()) {
    throw std::invalid_argument("bit field exceeds cell width");
  }
  PackedCells& cells = table.cells();
  const std::uint32_t field = static_cast<std::uint32_t>((std::uint64_t{1} << width) - 1);
  const std::uint32_t clear = ~(field << shift);
  const std::uint64_t segment_len = table.segment_len();

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto p = positions(keys[it->key], segment_len);
    std::uint32_t acc = values[it->key] & field;
    for (auto q : p) {
      if (q != it->cell) {
        acc ^= (cells.get(q) >> shift) & field;
      }
    }
    cells.set(it->cell, (cells.get(it->cell) & clear) | (acc << shift));
  }
}

void fill_random(XorTable& table) {
  PackedCells& cells = table.cells();
  const std::uint64_t base = mix64(table.seed().value ^ 0x3c6ef372fe94f82bULL);
  for (std::uint64_t i = 0; i < cells.size(); ++i) {
    cells.set(i, static_cast<std::uint32_t>(mix64(base + i * 0x9e3779b97f4a7c15ULL)));
  }
}

namespace {

auto role_name(TableRole role) -> const char* {
  switch (role) {
  case TableRole::plain:
    return "plain";
  case TableRole::naive:
    return "naive";
  case TableRole::first:
    return "first";
  case TableRole::second:
    return "second";
  case TableRole::integrated:
    return "integrated";
  }
  return "unknown";
}

} // namespace

BuildExhausted::BuildExhausted(TableRole role, unsigned attempts)
    : std::runtime_error(std::string("construction of the ") + role_name(role) + " table failed after " +
                         std::to_string(attempts) + " attempts"),
      role_(role), attempts_(attempts) {}

auto build_with_retries(const KeySource& keys, const ValueFn& value, const TableSpec& spec) -> BuiltTable {
  const std::size_t n = keys.size();
  const std::uint64_t segment_len = table_size(n, spec.epsilon);
  std::vector<KeyDigest> digests;
  digests.reserve(n);
  std::vector<std::uint32_t> values(n);

  for (unsigned retry = 0; retry <= spec.max_retries; ++retry) {
    const Seed seed = derive_seed(spec.master, spec.role, retry);
    digests.clear();
    keys.for_each([&](std::string_view k) { digests.push_back(digest(k, seed)); });

    auto peeled = peel(digests, segment_len);
    if (std::holds_alternative<PeelFailure>(peeled)) {
      continue;
    }
    XorTable table(spec.cell_width, segment_len, seed, spec.role);
    fill_random(table);
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = value(digests[i], i);
    }
    assign(std::get<PeelOrder>(peeled), digests, values, table);
    return {std::move(table), retry};
  }
  throw BuildExhausted(spec.role, spec.max_retries + 1);
}

auto build_with_retries(std::span<const std::pair<std::string, std::uint32_t>> pairs, const TableSpec& spec)
    -> BuiltTable {
  KeyList keys;
  for (const auto& [k, v] : pairs) {
    keys.push_back(k);
  }
  return build_with_retries(
      keys, [&](const KeyDigest&, std::size_t i) { return pairs[i].second; }, spec);
}

} // namespace fpfs
