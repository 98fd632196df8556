#include "fpfs/eval.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fpfs/sizing.hpp"

namespace fpfs {

auto lazy_disjoint_sets(std::uint64_t s, std::uint64_t t, std::uint64_t rng_seed) -> LazyDisjointSets {
  return {GeneratedKeys(rng_seed, 0, s), GeneratedKeys(rng_seed, s, t)};
}

auto gen_disjoint_sets(std::uint64_t s, std::uint64_t t, std::uint64_t rng_seed) -> DisjointSets {
  const LazyDisjointSets lazy = lazy_disjoint_sets(s, t, rng_seed);
  DisjointSets out;
  out.S.reserve(s, 16 * s);
  out.T.reserve(t, 16 * t);
  lazy.S.for_each([&](std::string_view k) { out.S.push_back(k); });
  lazy.T.for_each([&](std::string_view k) { out.T.push_back(k); });
  return out;
}

auto verify(const FpfsFilter& filter, const KeySource& S, const KeySource& T) -> VerifyResult {
  VerifyResult res;
  S.for_each([&](std::string_view key) {
    if (!filter.query(key)) {
      if (res.false_negative_keys.size() < VerifyResult::kMaxListed) {
        res.false_negative_keys.emplace_back(key);
      }
      ++res.false_negatives;
    }
  });
  T.for_each([&](std::string_view key) {
    if (filter.query(key)) {
      if (res.t_positive_keys.size() < VerifyResult::kMaxListed) {
        res.t_positive_keys.emplace_back(key);
      }
      ++res.t_positives;
    }
  });
  return res;
}

auto wilson(std::uint64_t hits, std::uint64_t trials, double z) -> Proportion {
  Proportion p{hits, trials, 0.0, 0.0, 1.0};
  if (trials == 0) {
    return p;
  }
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double denom = 1 + z2 / n;
  const double centre = (phat + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom;
  p.fraction = phat;
  p.ci_lo = std::max(0.0, centre - half);
  p.ci_hi = std::min(1.0, centre + half);
  return p;
}

auto exclusion_set(const KeySource& S, const KeySource& T) -> DigestSet {
  DigestSet set;
  set.reserve(S.size() + T.size());
  S.for_each([&](std::string_view k) { set.insert(k); });
  T.for_each([&](std::string_view k) { set.insert(k); });
  return set;
}

namespace {

template <class Fn>
void for_each_non_member(std::uint64_t n, std::uint64_t rng_seed, const DigestSet& exclude, Fn&& fn) {
  std::mt19937_64 rng(rng_seed);
  char buf[16];
  for (std::uint64_t done = 0; done < n;) {
    hex_token(rng(), buf);
    const std::string_view key(buf, sizeof buf);
    if (exclude.contains(key)) {
      continue;
    }
    fn(key);
    ++done;
  }
}

} // namespace

auto measure_fpp(const FpfsFilter& filter, std::uint64_t n_queries, std::uint64_t rng_seed,
                 const DigestSet& exclude) -> Proportion {
  if (n_queries < kMinFppQueries) {
    throw std::invalid_argument("FPP measurement needs at least 100000 queries");
  }
  std::uint64_t hits = 0;
  for_each_non_member(n_queries, rng_seed, exclude, [&](std::string_view key) { hits += filter.query(key); });
  return wilson(hits, n_queries);
}

auto random_non_members(std::uint64_t n, std::uint64_t rng_seed, const DigestSet& exclude) -> KeyList {
  KeyList keys;
  keys.reserve(n, 16 * n);
  for_each_non_member(n, rng_seed, exclude, [&](std::string_view key) { keys.push_back(key); });
  return keys;
}

auto report_name(const BuildConfig& cfg) -> std::string {
  if (cfg.variant == Variant::integrated) {
    return cfg.if_mode == IfMode::c1 ? "if1" : "if2";
  }
  return std::string(to_string(cfg.variant));
}

auto report_name(const FpfsFilter& filter) -> std::string {
  if (filter.variant() == Variant::integrated) {
    return filter.c() == 1 ? "if1" : "if2";
  }
  return std::string(to_string(filter.variant()));
}

auto evaluate(const FpfsFilter& filter, const KeySource& S, const KeySource& T) -> EvalReport {
  EvalReport rep;
  rep.variant = report_name(filter);
  rep.r = filter.r();
  rep.a = filter.a();
  rep.c = filter.c();
  rep.s = filter.s();
  rep.t = T.size();
  rep.f = filter.f();
  rep.memory_bits = filter.memory_bits();
  rep.predicted_fpp = predicted_fpp(filter.variant(), filter.r(), filter.a());
  const VerifyResult v = verify(filter, S, T);
  rep.false_negatives = v.false_negatives;
  rep.t_positives = v.t_positives;
  return rep;
}

namespace {

using Clock = std::chrono::steady_clock;

// Keeps lookup loops from being optimized away.
volatile std::size_t g_sink = 0;

auto elapsed_ns(Clock::time_point since) -> double {
  return std::chrono::duration<double, std::nano>(Clock::now() - since).count();
}

auto lookup_ns(const FpfsFilter& filter, const KeyList& keys) -> double {
  if (keys.empty()) {
    return 0.0;
  }
  std::size_t hits = 0;
  const auto start = Clock::now();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    hits += filter.query(keys[i]);
  }
  const double ns = elapsed_ns(start);
  g_sink = g_sink + hits;
  return ns / static_cast<double>(keys.size());
}

} // namespace

auto bench(const BenchConfig& cfg, const KeyList& S, const KeyList& T) -> EvalReport {
  if (cfg.runs < 1) {
    throw std::invalid_argument("bench needs at least one run");
  }
  const DigestSet exclude = exclusion_set(S, T);
  const KeyList negatives = random_non_members(cfg.negative_queries, cfg.rng_seed ^ 0x5bd1e995ULL, exclude);

  BuildConfig plain_cfg = cfg.build;
  plain_cfg.variant = Variant::plain;

  Timing sum;
  Timing plain_sum;
  FpfsFilter filter;
  for (unsigned run = 0; run < cfg.runs; ++run) {
    auto start = Clock::now();
    FpfsFilter plain = build_plain(S, plain_cfg);
    plain_sum.build_ns += elapsed_ns(start);

    start = Clock::now();
    filter = build(S, T, cfg.build);
    sum.build_ns += elapsed_ns(start);

    // Alternate which filter is timed first so cache warm-up does not
    // favour one side.
    if (run % 2 == 0) {
      plain_sum.pos_ns += lookup_ns(plain, S);
      sum.pos_ns += lookup_ns(filter, S);
      plain_sum.neg_ns += lookup_ns(plain, negatives);
      sum.neg_ns += lookup_ns(filter, negatives);
    } else {
      sum.pos_ns += lookup_ns(filter, S);
      plain_sum.pos_ns += lookup_ns(plain, S);
      sum.neg_ns += lookup_ns(filter, negatives);
      plain_sum.neg_ns += lookup_ns(plain, negatives);
    }
  }

  EvalReport rep = evaluate(filter, S, T);
  rep.variant = report_name(cfg.build);
  rep.runs = cfg.runs;
  const double n = cfg.runs;
  rep.timing = {sum.build_ns / n, sum.pos_ns / n, sum.neg_ns / n};
  rep.plain = {plain_sum.build_ns / n, plain_sum.pos_ns / n, plain_sum.neg_ns / n};
  rep.fpp = measure_fpp(filter, cfg.fpp_queries, cfg.rng_seed, exclude);
  return rep;
}

auto case_studies(std::string_view name) -> std::vector<CaseStudy> {
  if (name == "spell") {
    return {{"spell", 6136, 32894}};
  }
  if (name == "url") {
    return {{"url", 80000, 405730}};
  }
  if (name == "spv") {
    return {{"spv", 2500, 20'000'000}, {"spv", 2500, 700'000'000}};
  }
  throw std::invalid_argument("unknown case study '" + std::string(name) + "' (expected spell, url or spv)");
}

auto CaseStudyResult::row(std::string_view variant) const -> const EvalReport& {
  for (const auto& r : rows) {
    if (r.variant == variant) {
      return r;
    }
  }
  throw std::out_of_range("no case study row for " + std::string(variant));
}

auto CaseStudyResult::overhead(std::string_view variant) const -> double {
  const double plain = static_cast<double>(row("plain").memory_bits);
  return static_cast<double>(row(variant).memory_bits) / plain - 1.0;
}

auto run_case_study(const CaseStudy& study, std::uint64_t rng_seed) -> CaseStudyResult {
  const LazyDisjointSets sets = lazy_disjoint_sets(study.s, study.t, rng_seed);
  CaseStudyResult out{study, {}};

  BuildConfig cfg;
  cfg.r = 8;
  const std::pair<Variant, IfMode> variants[] = {{Variant::plain, IfMode::cmin},
                                                 {Variant::two_filter, IfMode::cmin},
                                                 {Variant::integrated, IfMode::c1},
                                                 {Variant::integrated, IfMode::cmin}};
  for (const auto& [variant, mode] : variants) {
    cfg.variant = variant;
    cfg.if_mode = mode;
    const FpfsFilter filter = build(sets.S, sets.T, cfg);
    EvalReport rep = evaluate(filter, sets.S, sets.T);
    rep.variant = report_name(cfg);
    out.rows.push_back(std::move(rep));
  }
  return out;
}

} // namespace fpfs
