#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "fpfs/hash.hpp"

namespace fpfs {

// Raised for malformed dataset files (empty lines, duplicates, unreadable).
class DatasetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A re-iterable sequence of keys. Builders walk T once per construction
// attempt, so sources must yield the same keys in the same order every time.
class KeySource {
public:
  virtual ~KeySource() = default;
  [[nodiscard]] virtual auto size() const -> std::size_t = 0;
  virtual void for_each(const std::function<void(std::string_view)>& fn) const = 0;
};

// Owning, contiguous key storage.
class KeyList final : public KeySource {
public:
  KeyList() = default;

  void push_back(std::string_view key);
  void reserve(std::size_t keys, std::size_t bytes);

  [[nodiscard]] auto operator[](std::size_t i) const noexcept -> std::string_view {
    return std::string_view(bytes_).substr(offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  [[nodiscard]] auto size() const -> std::size_t override { return offsets_.size() - 1; }
  [[nodiscard]] auto empty() const -> bool { return size() == 0; }
  void for_each(const std::function<void(std::string_view)>& fn) const override;

private:
  std::string bytes_;
  std::vector<std::size_t> offsets_{0};
};

// Fixed-width hex tokens token(i) for i in [begin, begin + count). The map
// i -> token is injective for a fixed seed, so disjoint index ranges give
// disjoint key sets.
class GeneratedKeys final : public KeySource {
public:
  GeneratedKeys(std::uint64_t seed, std::uint64_t begin, std::uint64_t count)
      : seed_(seed), begin_(begin), count_(count) {}

  [[nodiscard]] auto size() const -> std::size_t override { return count_; }
  void for_each(const std::function<void(std::string_view)>& fn) const override;

private:
  std::uint64_t seed_;
  std::uint64_t begin_;
  std::uint64_t count_;
};

// a followed by b.
class ConcatKeys final : public KeySource {
public:
  ConcatKeys(const KeySource& a, const KeySource& b) : a_(a), b_(b) {}
  [[nodiscard]] auto size() const -> std::size_t override { return a_.size() + b_.size(); }
  void for_each(const std::function<void(std::string_view)>& fn) const override {
    a_.for_each(fn);
    b_.for_each(fn);
  }

private:
  const KeySource& a_;
  const KeySource& b_;
};

// Streams a dataset file from disk on every pass. The constructor validates
// the whole file once (non-empty lines, no duplicates) and counts it.
class FileKeySource final : public KeySource {
public:
  explicit FileKeySource(std::filesystem::path path);
  [[nodiscard]] auto size() const -> std::size_t override { return count_; }
  void for_each(const std::function<void(std::string_view)>& fn) const override;

private:
  std::filesystem::path path_;
  std::size_t count_{};
};

// 16 lowercase hex characters of a 64-bit value.
[[nodiscard]] auto hex_token(std::uint64_t v) -> std::string;
void hex_token(std::uint64_t v, char out[16]) noexcept;

[[nodiscard]] auto generated_token(std::uint64_t seed, std::uint64_t index) noexcept -> std::uint64_t;

// One key per LF-terminated line, verbatim. Empty lines and duplicates are
// rejected with DatasetError.
[[nodiscard]] auto read_dataset(const std::filesystem::path& path) -> KeyList;
void write_dataset(const std::filesystem::path& path, const KeySource& keys);

// Set of 128-bit digests under a fixed seed. Used for disjointness checks and
// for excluding S and T from random probe keys.
class DigestSet {
public:
  static constexpr Seed kSeed{0x6a09e667f3bcc909ULL};

  [[nodiscard]] static auto of(std::string_view key) noexcept -> KeyDigest { return digest(key, kSeed); }

  // Returns false if an equal digest was already present.
  auto insert(std::string_view key) -> bool { return set_.insert(of(key)).second; }
  [[nodiscard]] auto contains(std::string_view key) const -> bool { return set_.contains(of(key)); }
  [[nodiscard]] auto size() const -> std::size_t { return set_.size(); }
  void reserve(std::size_t n) { set_.reserve(n); }

private:
  std::unordered_set<KeyDigest, KeyDigestHash> set_;
};

} // namespace fpfs
