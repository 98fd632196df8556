#include "fpfs/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fpfs {
namespace {

void require(std::uint64_t s, unsigned r) {
  if (s < 1) {
    throw std::invalid_argument("parameter selection needs s >= 1");
  }
  if (r < 2) {
    throw std::invalid_argument("r must be at least 2, got " + std::to_string(r));
  }
}

// a = ceil(log2(ratio)) - 1 when ratio > 2, else 0.
auto halvings_to_two(double ratio) -> unsigned {
  if (ratio <= 2.0) {
    return 0;
  }
  return static_cast<unsigned>(std::ceil(std::log2(ratio))) - 1;
}

} // namespace

auto expected_residual(std::uint64_t t, unsigned r, unsigned a) -> double {
  return std::ldexp(static_cast<double>(t), -static_cast<int>(r + a - 1));
}

auto compute_a_tf(std::uint64_t s, std::uint64_t t, unsigned r) -> unsigned {
  require(s, r);
  return halvings_to_two(expected_residual(t, r, 0) / static_cast<double>(s));
}

auto compute_c_min(std::uint64_t s, std::uint64_t t, unsigned r) -> unsigned {
  require(s, r);
  return 1 + static_cast<unsigned>(std::ceil(expected_residual(t, r, 0) / static_cast<double>(s)));
}

auto select_if_params(std::uint64_t s, std::uint64_t t, unsigned r) -> IfParams {
  const unsigned c_min = compute_c_min(s, t, r);
  if (c_min <= 2) {
    return {0, c_min < 1 ? 1 : c_min};
  }
  const auto a = static_cast<unsigned>(std::ceil(std::log2(static_cast<double>(c_min - 1))));
  return {a, 2};
}

auto compute_a_if_c1(std::uint64_t s, std::uint64_t t, unsigned r) -> unsigned {
  require(s, r);
  auto footprint = [&](unsigned a) {
    return (static_cast<double>(s) + expected_residual(t, r, a)) * static_cast<double>(r + a);
  };
  unsigned a = 0;
  while (r + a < 32 && footprint(a + 1) < footprint(a)) {
    ++a;
  }
  return a;
}

auto compute_a_if_c1_closed_form(std::uint64_t s, std::uint64_t t, unsigned r) -> unsigned {
  require(s, r);
  return halvings_to_two(expected_residual(t, r, 0) * static_cast<double>(r - 1) / static_cast<double>(s));
}

} // namespace fpfs
