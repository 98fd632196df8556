#include "fpfs/report_csv.hpp"

#include <charconv>
#include <cmath>

#include "fpfs/params.hpp"

namespace fpfs {

auto format_number(double v) -> std::string {
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

template <class... Fields>
auto join(const Fields&... fields) -> std::string {
  std::string out;
  bool first = true;
  auto add = [&](const std::string& f) {
    if (!first) {
      out += ',';
    }
    out += f;
    first = false;
  };
  (add(fields), ...);
  return out;
}

auto num(std::uint64_t v) -> std::string { return std::to_string(v); }

} // namespace

auto csv_row(const EvalReport& rep) -> std::string {
  const double per_elem = rep.s == 0 ? 0.0 : static_cast<double>(rep.memory_bits) / static_cast<double>(rep.s);
  return join(rep.variant, num(rep.r), num(rep.a), num(rep.c), num(rep.s), num(rep.t), num(rep.f),
              num(rep.memory_bits), format_number(per_elem), format_number(rep.predicted_fpp),
              format_number(rep.fpp.fraction), format_number(rep.fpp.ci_lo), format_number(rep.fpp.ci_hi),
              format_number(rep.timing.build_ns), format_number(rep.timing.pos_ns), format_number(rep.timing.neg_ns));
}

auto sizing_header(bool with_bound) -> std::string {
  std::string h(kCsvHeader);
  if (with_bound) {
    h += ",lower_bound";
  }
  return h;
}

auto sizing_rows(const SizingReport& rep, std::optional<double> fpp) -> std::vector<std::string> {
  struct Row {
    const char* name;
    unsigned a;
    unsigned c;
    double f;
    double bits;
    Variant variant;
  };
  auto residual = [&](unsigned a) {
    return rep.t == 0 || rep.s == 0 ? 0.0 : std::round(expected_residual(rep.t, rep.r, a));
  };
  const Row rows[] = {
      {"naive", 0, 0, 0.0, rep.naive_bits, Variant::naive},
      {"tf", rep.a_tf, 0, residual(rep.a_tf), rep.tf_bits, Variant::two_filter},
      {"if1", rep.a_if_c1, 1, residual(rep.a_if_c1), rep.if_c1_bits, Variant::integrated},
      {"if2", rep.a_if_cmin, rep.c, residual(rep.a_if_cmin), rep.if_cmin_bits, Variant::integrated},
  };
  std::string bound;
  if (fpp) {
    bound = format_number(rep.s == 0 ? 0.0 : lower_bound(static_cast<double>(rep.s), static_cast<double>(rep.t), *fpp));
  }
  std::vector<std::string> out;
  for (const auto& row : rows) {
    std::string line = join(std::string(row.name), num(rep.r), num(row.a), num(row.c), num(rep.s), num(rep.t),
                            num(static_cast<std::uint64_t>(row.f)), format_number(row.bits),
                            format_number(rep.per_element(row.bits)),
                            format_number(predicted_fpp(row.variant, rep.r, row.a)), "", "", "", "", "", "");
    if (fpp) {
      line += ',' + bound;
    }
    out.push_back(std::move(line));
  }
  return out;
}

} // namespace fpfs
