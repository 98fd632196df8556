#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "fpfs/filter.hpp"

namespace fpfs {

// Little-endian layout:
//   "FPFS" | version u8 = 1 | variant u8 | r u8 | a u8 | c u8 | reserved u8 = 0
//   per table: role u8 | seed u64 | segment_len u64 | cell_width u8 | packed cells
//   s u64 | t u64 | f u64 | FNV-1a 64 of every preceding byte
inline constexpr std::uint8_t kFormatVersion = 1;

class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

[[nodiscard]] auto fnv1a64(std::span<const std::uint8_t> bytes) noexcept -> std::uint64_t;

[[nodiscard]] auto serialize(const FpfsFilter& filter) -> std::vector<std::uint8_t>;
// Throws FormatError on a bad magic, version, checksum or layout.
[[nodiscard]] auto deserialize(std::span<const std::uint8_t> bytes) -> FpfsFilter;

void save_filter(const std::filesystem::path& path, const FpfsFilter& filter);
// Throws FormatError, including when the file cannot be read.
[[nodiscard]] auto load_filter(const std::filesystem::path& path) -> FpfsFilter;

} // namespace fpfs
