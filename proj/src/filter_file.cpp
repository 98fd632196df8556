#include "fpfs/filter_file.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace fpfs {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'F', 'P', 'F', 'S'};
constexpr std::size_t kHeaderBytes = 10;
constexpr std::size_t kTrailerBytes = 32;
constexpr std::size_t kBlockHeaderBytes = 18;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

class Reader {
public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  auto u8() -> std::uint8_t { return take(1)[0]; }
  auto u64() -> std::uint64_t {
    const auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
      v = (v << 8) | b[static_cast<std::size_t>(i)];
    }
    return v;
  }
  auto take(std::size_t n) -> std::span<const std::uint8_t> {
    if (n > remaining()) {
      throw FormatError("filter file is truncated");
    }
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  [[nodiscard]] auto remaining() const -> std::size_t { return bytes_.size() - pos_; }

private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

} // namespace

auto fnv1a64(std::span<const std::uint8_t> bytes) noexcept -> std::uint64_t {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

auto serialize(const FpfsFilter& filter) -> std::vector<std::uint8_t> {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  out.push_back(kFormatVersion);
  out.push_back(static_cast<std::uint8_t>(filter.variant()));
  out.push_back(static_cast<std::uint8_t>(filter.r()));
  out.push_back(static_cast<std::uint8_t>(filter.a()));
  out.push_back(static_cast<std::uint8_t>(filter.c()));
  out.push_back(0);
  for (const auto& table : filter.tables()) {
    out.push_back(static_cast<std::uint8_t>(table.role()));
    put_u64(out, table.seed().value);
    put_u64(out, table.segment_len());
    out.push_back(static_cast<std::uint8_t>(table.cell_width()));
    const auto cells = table.cells().bytes();
    out.insert(out.end(), cells.begin(), cells.end());
  }
  put_u64(out, filter.s());
  put_u64(out, filter.t());
  put_u64(out, filter.f());
  put_u64(out, fnv1a64(out));
  return out;
}

auto deserialize(std::span<const std::uint8_t> bytes) -> FpfsFilter {
  if (bytes.size() < kHeaderBytes + kTrailerBytes) {
    throw FormatError("filter file is truncated");
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw FormatError("not a filter file (bad magic)");
  }
  if (bytes[4] != kFormatVersion) {
    throw FormatError("unsupported filter file version " + std::to_string(bytes[4]));
  }
  const auto body = bytes.first(bytes.size() - 8);
  Reader tail(bytes.last(8));
  if (tail.u64() != fnv1a64(body)) {
    throw FormatError("filter file checksum mismatch");
  }

  Reader in(body);
  in.take(5);
  const std::uint8_t variant = in.u8();
  const unsigned r = in.u8();
  const unsigned a = in.u8();
  const unsigned c = in.u8();
  in.u8();
  if (variant > static_cast<std::uint8_t>(Variant::integrated)) {
    throw FormatError("unknown variant " + std::to_string(variant));
  }

  std::vector<XorTable> tables;
  constexpr std::size_t kCounts = kTrailerBytes - 8;
  while (in.remaining() > kCounts) {
    if (in.remaining() < kBlockHeaderBytes + kCounts) {
      throw FormatError("filter file is truncated");
    }
    const std::uint8_t role = in.u8();
    if (role > static_cast<std::uint8_t>(TableRole::integrated)) {
      throw FormatError("unknown table role " + std::to_string(role));
    }
    const Seed seed{in.u64()};
    const std::uint64_t segment_len = in.u64();
    const unsigned width = in.u8();
    if (width < 1 || width > 32 || segment_len == 0 || segment_len > (std::uint64_t{1} << 40)) {
      throw FormatError("invalid table block");
    }
    const std::uint64_t packed = (3 * segment_len * width + 7) / 8;
    if (packed > in.remaining()) {
      throw FormatError("filter file is truncated");
    }
    auto cells = PackedCells::from_bytes(3 * segment_len, width, in.take(packed));
    tables.push_back(XorTable::from_cells(segment_len, seed, static_cast<TableRole>(role), std::move(cells)));
  }
  const std::uint64_t s = in.u64();
  const std::uint64_t t = in.u64();
  const std::uint64_t f = in.u64();
  try {
    return FpfsFilter(static_cast<Variant>(variant), r, a, c, std::move(tables), s, t, f);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

void save_filter(const std::filesystem::path& path, const FpfsFilter& filter) {
  const auto bytes = serialize(filter);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw std::runtime_error("cannot write filter file: " + path.string());
  }
}

auto load_filter(const std::filesystem::path& path) -> FpfsFilter {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open filter file: " + path.string());
  }
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

} // namespace fpfs
