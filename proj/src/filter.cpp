#include "fpfs/filter.hpp"

#include <algorithm>
#include <cmath>

#include "fpfs/params.hpp"

namespace fpfs {

auto to_string(Variant v) -> std::string_view {
  switch (v) {
  case Variant::plain:
    return "plain";
  case Variant::naive:
    return "naive";
  case Variant::two_filter:
    return "tf";
  case Variant::integrated:
    return "if";
  }
  return "unknown";
}

DisjointnessViolation::DisjointnessViolation(std::vector<std::string> offenders, std::size_t total)
    : std::runtime_error(std::to_string(total) + " key(s) appear in both S and T"),
      offenders_(std::move(offenders)), total_(total) {}

DuplicateKey::DuplicateKey(std::string_view key) : std::runtime_error("duplicate key '" + std::string(key) + "'") {}

namespace {

auto bad_shape(const std::string& what) -> std::invalid_argument {
  return std::invalid_argument("inconsistent filter layout: " + what);
}

auto is_single(const XorTable& t) -> bool {
  return t.role() == TableRole::plain || t.role() == TableRole::naive;
}

} // namespace

FpfsFilter::FpfsFilter(Variant variant, unsigned r, unsigned a, unsigned c, std::vector<XorTable> tables,
                       std::uint64_t s, std::uint64_t t, std::uint64_t f)
    : variant_(variant), r_(r), a_(a), c_(c), tables_(std::move(tables)), s_(s), t_(t), f_(f) {
  if (r < kMinR || r > kMaxR) {
    throw bad_shape("r = " + std::to_string(r) + " outside [2, 24]");
  }
  if (tables_.empty() || tables_.size() > 2) {
    throw bad_shape("expected one or two tables");
  }
  single_ = tables_.size() == 1 && is_single(tables_[0]);
  first_bits_ = single_ ? r : r + a - 1;
  if (first_bits_ > 32) {
    throw bad_shape("first filter wider than 32 bits");
  }
  first_mask_ = static_cast<std::uint32_t>((std::uint64_t{1} << first_bits_) - 1);

  auto width_is = [](const XorTable& tab, unsigned w) { return tab.cell_width() == w; };
  switch (variant) {
  case Variant::plain:
  case Variant::naive: {
    const TableRole want = variant == Variant::plain ? TableRole::plain : TableRole::naive;
    if (!single_ || tables_[0].role() != want || !width_is(tables_[0], r)) {
      throw bad_shape("single-table variant needs one r-bit table of its own role");
    }
    break;
  }
  case Variant::two_filter:
    if (single_) {
      if (tables_[0].role() != TableRole::plain || !width_is(tables_[0], r)) {
        throw bad_shape("empty-T two-filter layout needs one plain r-bit table");
      }
    } else if (tables_.size() != 2 || tables_[0].role() != TableRole::first ||
               tables_[1].role() != TableRole::second || !width_is(tables_[0], first_bits_) ||
               !width_is(tables_[1], 1)) {
      throw bad_shape("two-filter layout needs an (r+a-1)-bit first and a 1-bit second table");
    }
    break;
  case Variant::integrated:
    if (single_) {
      if (tables_[0].role() != TableRole::plain || !width_is(tables_[0], r)) {
        throw bad_shape("empty-T integrated layout needs one plain r-bit table");
      }
    } else if (tables_.size() != 1 || tables_[0].role() != TableRole::integrated || c < 1 || c > 2 ||
               !width_is(tables_[0], first_bits_ + c)) {
      throw bad_shape("integrated layout needs one (r+a-1+c)-bit table with c in {1, 2}");
    }
    break;
  default:
    throw bad_shape("unknown variant");
  }
}

auto FpfsFilter::memory_bits() const noexcept -> std::uint64_t {
  std::uint64_t bits = 0;
  for (const auto& t : tables_) {
    bits += t.memory_bits();
  }
  return bits;
}

auto FpfsFilter::first_bits() const noexcept -> unsigned { return first_bits_; }

auto residual_set(const XorTable& first, unsigned fingerprint_bits, const KeySource& T) -> ResidualSet {
  const auto mask = static_cast<std::uint32_t>((std::uint64_t{1} << fingerprint_bits) - 1);
  ResidualSet out;
  DigestSet seen;
  T.for_each([&](std::string_view key) {
    const KeyDigest d = first.key_digest(key);
    if ((first.eval(d) & mask) == fingerprint(d, fingerprint_bits) && seen.insert(key)) {
      out.keys.push_back(key);
    }
  });
  return out;
}

void check_disjoint(const KeySource& S, const KeySource& T) {
  DigestSet in_s;
  in_s.reserve(S.size());
  S.for_each([&](std::string_view key) {
    if (!in_s.insert(key)) {
      throw DuplicateKey(key);
    }
  });
  std::vector<std::string> offenders;
  std::size_t total = 0;
  T.for_each([&](std::string_view key) {
    if (in_s.contains(key)) {
      if (offenders.size() < DisjointnessViolation::kMaxListed) {
        offenders.emplace_back(key);
      }
      ++total;
    }
  });
  if (total != 0) {
    throw DisjointnessViolation(std::move(offenders), total);
  }
}

namespace {

void validate(const BuildConfig& cfg) {
  if (cfg.r < kMinR || cfg.r > kMaxR) {
    throw std::invalid_argument("r must be in [2, 24], got " + std::to_string(cfg.r));
  }
  if (!(cfg.epsilon >= 0.0)) {
    throw std::invalid_argument("epsilon must be non-negative");
  }
}

void check_width(unsigned bits) {
  if (bits > 32) {
    throw std::invalid_argument("cells would need " + std::to_string(bits) + " bits (max 32)");
  }
}

auto spec_for(const BuildConfig& cfg, unsigned width, TableRole role) -> TableSpec {
  return TableSpec{width, cfg.epsilon, cfg.master, role, cfg.max_retries};
}

auto fingerprint_values(unsigned bits) -> ValueFn {
  return [bits](const KeyDigest& d, std::size_t) { return fingerprint(d, bits); };
}

auto plain_table(const KeySource& S, const BuildConfig& cfg) -> BuiltTable {
  return build_with_retries(S, fingerprint_values(cfg.r), spec_for(cfg, cfg.r, TableRole::plain));
}

// Empty T: every construction reduces to an ordinary r-bit filter.
auto degenerate(Variant variant, unsigned c, const KeySource& S, const BuildConfig& cfg) -> FpfsFilter {
  auto built = plain_table(S, cfg);
  FpfsFilter filter(variant, cfg.r, 0, c, {std::move(built.table)}, S.size(), 0, 0);
  filter.retries = {built.retries};
  return filter;
}

} // namespace

auto build_plain(const KeySource& S, const BuildConfig& cfg) -> FpfsFilter {
  validate(cfg);
  check_disjoint(S, KeyList{});
  auto built = plain_table(S, cfg);
  FpfsFilter filter(Variant::plain, cfg.r, 0, 0, {std::move(built.table)}, S.size(), 0, 0);
  filter.retries = {built.retries};
  return filter;
}

auto build_naive(const KeySource& S, const KeySource& T, const BuildConfig& cfg) -> FpfsFilter {
  validate(cfg);
  check_disjoint(S, T);
  {
    DigestSet in_t;
    in_t.reserve(T.size());
    T.for_each([&](std::string_view key) {
      if (!in_t.insert(key)) {
        throw DuplicateKey(key);
      }
    });
  }
  const std::size_t s = S.size();
  const unsigned r = cfg.r;
  ConcatKeys all(S, T);
  auto built = build_with_retries(
      all,
      [s, r](const KeyDigest& d, std::size_t i) {
        const std::uint32_t v = fingerprint(d, r);
        return i < s ? v : v ^ 1U;
      },
      spec_for(cfg, r, TableRole::naive));
  FpfsFilter filter(Variant::naive, r, 0, 0, {std::move(built.table)}, s, T.size(), 0);
  filter.retries = {built.retries};
  return filter;
}

auto build_tf(const KeySource& S, const KeySource& T, const BuildConfig& cfg) -> FpfsFilter {
  validate(cfg);
  check_disjoint(S, T);
  const std::size_t s = S.size();
  const std::size_t t = T.size();
  if (t == 0) {
    return degenerate(Variant::two_filter, 0, S, cfg);
  }
  const unsigned a = !cfg.auto_a ? cfg.a : (s == 0 ? 0 : compute_a_tf(s, t, cfg.r));
  const unsigned k = cfg.r + a - 1;
  check_width(k);

  auto first = build_with_retries(S, fingerprint_values(k), spec_for(cfg, k, TableRole::first));
  ResidualSet residual = residual_set(first.table, k, T);
  ConcatKeys second_keys(S, residual.keys);
  auto second = build_with_retries(
      second_keys, [s](const KeyDigest&, std::size_t i) { return i < s ? 1U : 0U; },
      spec_for(cfg, 1, TableRole::second));

  std::vector<XorTable> tables;
  tables.push_back(std::move(first.table));
  tables.push_back(std::move(second.table));
  FpfsFilter filter(Variant::two_filter, cfg.r, a, 0, std::move(tables), s, t, residual.f());
  filter.retries = {first.retries, second.retries};
  return filter;
}

auto build_if(const KeySource& S, const KeySource& T, const BuildConfig& cfg) -> FpfsFilter {
  validate(cfg);
  check_disjoint(S, T);
  const std::size_t s = S.size();
  const std::size_t t = T.size();
  if (t == 0) {
    return degenerate(Variant::integrated, 1, S, cfg);
  }

  IfParams params{};
  if (!cfg.auto_a) {
    params = {cfg.a, cfg.if_mode == IfMode::c1 ? 1U : 2U};
  } else if (s == 0) {
    params = {0, cfg.if_mode == IfMode::c1 ? 1U : 2U};
  } else if (cfg.if_mode == IfMode::c1) {
    params = {compute_a_if_c1(s, t, cfg.r), 1};
  } else {
    params = select_if_params(s, t, cfg.r);
  }
  const unsigned a = params.a;
  const unsigned c = params.c;
  const unsigned k = cfg.r + a - 1;
  check_width(k + c);

  // Size for the expected heaviest column plus two standard deviations; grow
  // to the observed load if a column still comes out heavier.
  const double f_exp = expected_residual(t, cfg.r, a);
  const double load_exp = c == 1 ? static_cast<double>(s) + f_exp : (static_cast<double>(s) + f_exp) / 2;
  const double var = c == 1 ? f_exp : static_cast<double>(s) / 4 + f_exp / 2;
  std::size_t capacity = std::max<std::size_t>(s, static_cast<std::size_t>(std::ceil(load_exp + 2 * std::sqrt(var))));

  std::vector<KeyDigest> s_digests;
  s_digests.reserve(s);
  std::vector<std::uint32_t> s_values(s);
  std::vector<std::vector<KeyDigest>> col_digests(c);
  std::vector<std::vector<std::uint32_t>> col_values(c);
  unsigned resizes = 0;

  for (unsigned retry = 0; retry <= cfg.max_retries; ++retry) {
    const Seed seed = derive_seed(cfg.master, TableRole::integrated, retry);
    s_digests.clear();
    S.for_each([&](std::string_view key) { s_digests.push_back(digest(key, seed)); });
    for (std::size_t i = 0; i < s; ++i) {
      s_values[i] = fingerprint(s_digests[i], k);
    }

    for (;;) {
      const std::uint64_t segment_len = table_size(capacity, cfg.epsilon);
      auto first_order = peel(s_digests, segment_len);
      if (std::holds_alternative<PeelFailure>(first_order)) {
        break;
      }
      XorTable table(k + c, segment_len, seed, TableRole::integrated);
      fill_random(table);
      assign(std::get<PeelOrder>(first_order), s_digests, s_values, table, 0, k);

      ResidualSet residual = residual_set(table, k, T);

      for (unsigned j = 0; j < c; ++j) {
        col_digests[j].clear();
        col_values[j].clear();
      }
      auto route = [&](const KeyDigest& d, std::uint32_t value) {
        const unsigned j = c == 1 ? 0 : subfilter_select(d) - 1;
        col_digests[j].push_back(d);
        col_values[j].push_back(value);
      };
      for (const auto& d : s_digests) {
        route(d, 1);
      }
      residual.keys.for_each([&](std::string_view key) { route(digest(key, seed), 0); });

      std::size_t heaviest = 0;
      for (const auto& col : col_digests) {
        heaviest = std::max(heaviest, col.size());
      }
      if (heaviest > capacity) {
        capacity = heaviest;
        ++resizes;
        continue;
      }

      bool ok = true;
      for (unsigned j = 0; j < c && ok; ++j) {
        auto order = peel(col_digests[j], segment_len);
        if (std::holds_alternative<PeelFailure>(order)) {
          ok = false;
          break;
        }
        assign(std::get<PeelOrder>(order), col_digests[j], col_values[j], table, k + j, 1);
      }
      if (!ok) {
        break;
      }

      std::vector<XorTable> tables;
      tables.push_back(std::move(table));
      FpfsFilter filter(Variant::integrated, cfg.r, a, c, std::move(tables), s, t, residual.f());
      filter.retries = {retry};
      filter.resizes = resizes;
      return filter;
    }
  }
  throw BuildExhausted(TableRole::integrated, cfg.max_retries + 1);
}

auto build(const KeySource& S, const KeySource& T, const BuildConfig& cfg) -> FpfsFilter {
  switch (cfg.variant) {
  case Variant::plain:
    return build_plain(S, cfg);
  case Variant::naive:
    return build_naive(S, T, cfg);
  case Variant::two_filter:
    return build_tf(S, T, cfg);
  case Variant::integrated:
    return build_if(S, T, cfg);
  }
  throw std::invalid_argument("unknown variant");
}

} // namespace fpfs
