#include "fpfs/keys.hpp"

#include <algorithm>
#include <fstream>

namespace fpfs {

void KeyList::push_back(std::string_view key) {
  bytes_.append(key);
  offsets_.push_back(bytes_.size());
}

void KeyList::reserve(std::size_t keys, std::size_t bytes) {
  offsets_.reserve(keys + 1);
  bytes_.reserve(bytes);
}

void KeyList::for_each(const std::function<void(std::string_view)>& fn) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    fn((*this)[i]);
  }
}

void hex_token(std::uint64_t v, char out[16]) noexcept {
  static constexpr char kDigits[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    out[i] = kDigits[v & 0xF];
    v >>= 4;
  }
}

auto hex_token(std::uint64_t v) -> std::string {
  std::string s(16, '0');
  hex_token(v, s.data());
  return s;
}

auto generated_token(std::uint64_t seed, std::uint64_t index) noexcept -> std::uint64_t {
  // xor with a constant and mix64 are both bijections.
  return mix64(index ^ mix64(seed ^ 0xbb67ae8584caa73bULL));
}

void GeneratedKeys::for_each(const std::function<void(std::string_view)>& fn) const {
  char buf[16];
  for (std::uint64_t i = 0; i < count_; ++i) {
    hex_token(generated_token(seed_, begin_ + i), buf);
    fn(std::string_view(buf, sizeof buf));
  }
}

namespace {

template <class Fn>
void scan_lines(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DatasetError("cannot open dataset file: " + path.string());
  }
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      throw DatasetError(path.string() + ":" + std::to_string(lineno) + ": empty line");
    }
    fn(std::string_view(line), lineno);
  }
  if (in.bad()) {
    throw DatasetError("read error on " + path.string());
  }
}

} // namespace

auto read_dataset(const std::filesystem::path& path) -> KeyList {
  KeyList keys;
  DigestSet seen;
  scan_lines(path, [&](std::string_view line, std::size_t lineno) {
    if (!seen.insert(line)) {
      throw DatasetError(path.string() + ":" + std::to_string(lineno) + ": duplicate key '" +
                         std::string(line) + "'");
    }
    keys.push_back(line);
  });
  return keys;
}

void write_dataset(const std::filesystem::path& path, const KeySource& keys) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw DatasetError("cannot write dataset file: " + path.string());
  }
  keys.for_each([&](std::string_view k) {
    out.write(k.data(), static_cast<std::streamsize>(k.size()));
    out.put('\n');
  });
  if (!out) {
    throw DatasetError("write error on " + path.string());
  }
}

FileKeySource::FileKeySource(std::filesystem::path path) : path_(std::move(path)) {
  // Sorting 128-bit digests finds duplicates with 16 bytes per key.
  std::vector<KeyDigest> digests;
  scan_lines(path_, [&](std::string_view line, std::size_t) { digests.push_back(DigestSet::of(line)); });
  count_ = digests.size();
  auto less = [](const KeyDigest& x, const KeyDigest& y) { return x.lo != y.lo ? x.lo < y.lo : x.hi < y.hi; };
  std::sort(digests.begin(), digests.end(), less);
  if (std::adjacent_find(digests.begin(), digests.end()) != digests.end()) {
    throw DatasetError(path_.string() + ": duplicate key");
  }
}

void FileKeySource::for_each(const std::function<void(std::string_view)>& fn) const {
  scan_lines(path_, [&](std::string_view line, std::size_t) { fn(line); });
}

} // namespace fpfs
