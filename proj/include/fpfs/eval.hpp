#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fpfs/filter.hpp"
#include "fpfs/keys.hpp"

namespace fpfs {

struct DisjointSets {
  KeyList S;
  KeyList T;
};

// S and T of 16-character hex tokens, disjoint by construction and fully
// determined by rng_seed.
[[nodiscard]] auto gen_disjoint_sets(std::uint64_t s, std::uint64_t t, std::uint64_t rng_seed) -> DisjointSets;

// Same keys as gen_disjoint_sets, generated on every pass instead of stored.
struct LazyDisjointSets {
  GeneratedKeys S;
  GeneratedKeys T;
};
[[nodiscard]] auto lazy_disjoint_sets(std::uint64_t s, std::uint64_t t, std::uint64_t rng_seed) -> LazyDisjointSets;

struct VerifyResult {
  static constexpr std::size_t kMaxListed = 1000;

  std::size_t false_negatives{};
  std::size_t t_positives{};
  // First kMaxListed offenders of each kind, in input order.
  std::vector<std::string> false_negative_keys;
  std::vector<std::string> t_positive_keys;

  [[nodiscard]] auto ok() const noexcept -> bool { return false_negatives == 0 && t_positives == 0; }
};

// Queries every key of S (expects true) and of T (expects false).
[[nodiscard]] auto verify(const FpfsFilter& filter, const KeySource& S, const KeySource& T) -> VerifyResult;

struct Proportion {
  std::uint64_t hits{};
  std::uint64_t trials{};
  double fraction{};
  double ci_lo{};
  double ci_hi{};
};

inline constexpr double kZ95 = 1.959964;

// Wilson score interval.
[[nodiscard]] auto wilson(std::uint64_t hits, std::uint64_t trials, double z = kZ95) -> Proportion;

inline constexpr std::uint64_t kMinFppQueries = 100'000;

// Fraction of n_queries random 16-character hex keys that the filter accepts.
// Keys found in `exclude` are skipped and replaced. Throws
// std::invalid_argument when n_queries < kMinFppQueries.
[[nodiscard]] auto measure_fpp(const FpfsFilter& filter, std::uint64_t n_queries, std::uint64_t rng_seed,
                               const DigestSet& exclude) -> Proportion;

[[nodiscard]] auto exclusion_set(const KeySource& S, const KeySource& T) -> DigestSet;

// `n` random hex keys not in `exclude`.
[[nodiscard]] auto random_non_members(std::uint64_t n, std::uint64_t rng_seed, const DigestSet& exclude) -> KeyList;

struct BenchConfig {
  BuildConfig build;
  unsigned runs = 30;
  std::uint64_t negative_queries = 1'000'000;
  std::uint64_t fpp_queries = 1'000'000;
  std::uint64_t rng_seed = 1;
};

struct Timing {
  double build_ns{};
  double pos_ns{};
  double neg_ns{};
};

struct EvalReport {
  std::string variant;
  unsigned r{};
  unsigned a{};
  unsigned c{};
  std::uint64_t s{};
  std::uint64_t t{};
  std::uint64_t f{};
  std::uint64_t memory_bits{};
  double predicted_fpp{};
  Proportion fpp;
  std::size_t false_negatives{};
  std::size_t t_positives{};
  unsigned runs{};
  // Means over runs: build time per filter, lookup time per key.
  Timing timing;
  // A plain r-bit filter over S, timed in the same runs.
  Timing plain;

  [[nodiscard]] auto build_ratio() const -> double { return timing.build_ns / plain.build_ns; }
  [[nodiscard]] auto pos_ratio() const -> double { return timing.pos_ns / plain.pos_ns; }
  [[nodiscard]] auto neg_ratio() const -> double { return timing.neg_ns / plain.neg_ns; }
};

// Variant names used in reports: plain, naive, tf, if1, if2.
[[nodiscard]] auto report_name(const FpfsFilter& filter) -> std::string;
[[nodiscard]] auto report_name(const BuildConfig& cfg) -> std::string;

// Builds cfg.runs times (alternating with the plain baseline), verifies the
// last build, measures its FPP and averages the timings.
[[nodiscard]] auto bench(const BenchConfig& cfg, const KeyList& S, const KeyList& T) -> EvalReport;

// Report for a single build without timing.
[[nodiscard]] auto evaluate(const FpfsFilter& filter, const KeySource& S, const KeySource& T) -> EvalReport;

struct CaseStudy {
  std::string name;
  std::uint64_t s{};
  std::uint64_t t{};
};

// Set sizes of a named case study: spell, url or spv. spv has two sizes of
// T, the smaller first. Throws std::invalid_argument for other names.
[[nodiscard]] auto case_studies(std::string_view name) -> std::vector<CaseStudy>;

struct CaseStudyResult {
  CaseStudy study;
  // plain, tf, if1, if2, in that order.
  std::vector<EvalReport> rows;

  [[nodiscard]] auto row(std::string_view variant) const -> const EvalReport&;
  // Extra bits relative to the plain filter, as a fraction.
  [[nodiscard]] auto overhead(std::string_view variant) const -> double;
};

// Builds every report variant at r = 8 on synthetic sets of the given sizes
// and verifies each against S and T. No FPP measurement.
[[nodiscard]] auto run_case_study(const CaseStudy& study, std::uint64_t rng_seed = 7) -> CaseStudyResult;

} // namespace fpfs
