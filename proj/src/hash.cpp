#include "fpfs/hash.hpp"

#include <cstring>

namespace fpfs {
namespace {

constexpr std::uint64_t kC1 = 0x87c37b91114253d5ULL;
constexpr std::uint64_t kC2 = 0x4cf5ad432745937fULL;
constexpr std::uint64_t kLaneTweak = 0x9e3779b97f4a7c15ULL;

auto load_le64(const char* p) noexcept -> std::uint64_t {
  std::uint64_t v;
  std::memcpy(&v, p, sizeof v);
  if constexpr (std::endian::native == std::endian::big) {
    v = __builtin_bswap64(v);
  }
  return v;
}

auto load_tail(const char* p, std::size_t n) noexcept -> std::uint64_t {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return v;
}

} // namespace

auto digest(std::string_view key, Seed seed) noexcept -> KeyDigest {
  const char* data = key.data();
  const std::size_t len = key.size();
  std::uint64_t h1 = seed.value;
  std::uint64_t h2 = seed.value ^ kLaneTweak;

  std::size_t i = 0;
  for (; i + 16 <= len; i += 16) {
    std::uint64_t k1 = load_le64(data + i);
    std::uint64_t k2 = load_le64(data + i + 8);

    k1 *= kC1;
    k1 = std::rotl(k1, 31);
    k1 *= kC2;
    h1 ^= k1;
    h1 = std::rotl(h1, 27);
    h1 += h2;
    h1 = h1 * 5 + 0x52dce729;

    k2 *= kC2;
    k2 = std::rotl(k2, 33);
    k2 *= kC1;
    h2 ^= k2;
    h2 = std::rotl(h2, 31);
    h2 += h1;
    h2 = h2 * 5 + 0x38495ab5;
  }

  const std::size_t rest = len - i;
  if (rest > 8) {
    std::uint64_t k2 = load_tail(data + i + 8, rest - 8);
    k2 *= kC2;
    k2 = std::rotl(k2, 33);
    k2 *= kC1;
    h2 ^= k2;
  }
  if (rest > 0) {
    std::uint64_t k1 = load_tail(data + i, rest < 8 ? rest : 8);
    k1 *= kC1;
    k1 = std::rotl(k1, 31);
    k1 *= kC2;
    h1 ^= k1;
  }

  h1 ^= len;
  h2 ^= len;
  h1 += h2;
  h2 += h1;
  h1 = mix64(h1);
  h2 = mix64(h2);
  h1 += h2;
  h2 += h1;
  return {h1, h2};
}

auto derive_seed(Seed master, TableRole role, std::uint32_t retry) noexcept -> Seed {
  // (role, retry) packs injectively into one word; mix64 is a bijection, so
  // distinct pairs always yield distinct seeds under the same master.
  const std::uint64_t tag = (static_cast<std::uint64_t>(role) << 32) | retry;
  return Seed{mix64(master.value + kLaneTweak) ^ mix64(tag ^ 0x2545f4914f6cdd1dULL)};
}

} // namespace fpfs
