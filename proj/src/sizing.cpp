#include "fpfs/sizing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fpfs/params.hpp"

namespace fpfs {

auto m_naive(double s, double t, unsigned r, double epsilon) -> double { return (s + t) * (1 + epsilon) * r; }

auto m_tf(std::uint64_t s, std::uint64_t t, unsigned r, double epsilon) -> TfSize {
  const double sd = static_cast<double>(s);
  if (t == 0 || s == 0) {
    return {sd * (1 + epsilon) * r, 0};
  }
  const unsigned a = compute_a_tf(s, t, r);
  return {sd * (1 + epsilon) * (r + a) + expected_residual(t, r, a) * (1 + epsilon), a};
}

auto m_if(std::uint64_t s, std::uint64_t t, unsigned r, IfMode mode, double epsilon) -> IfSize {
  const double sd = static_cast<double>(s);
  if (t == 0 || s == 0) {
    return {sd * (1 + epsilon) * r, 0, 1};
  }
  if (mode == IfMode::c1) {
    const unsigned a = compute_a_if_c1(s, t, r);
    return {(sd + expected_residual(t, r, a)) * (1 + epsilon) * (r + a), a, 1};
  }
  const IfParams p = select_if_params(s, t, r);
  return {sd * (1 + epsilon) * (r + p.a + p.c - 1), p.a, p.c};
}

auto extra_bits_if(double s, double t, unsigned r, unsigned a) -> unsigned {
  return a + 1 + static_cast<unsigned>(std::ceil(std::ldexp(t, -static_cast<int>(r + a - 1)) / s));
}

auto predicted_fpp(Variant v, unsigned r, unsigned a) -> double {
  const unsigned bits = (v == Variant::plain || v == Variant::naive) ? r : r + a;
  return std::ldexp(1.0, -static_cast<int>(bits));
}

auto lower_bound(double s, double t, double fpp) -> double {
  if (!(fpp > 0.0 && fpp < 0.5)) {
    throw std::domain_error("fpp must lie in (0, 0.5)");
  }
  const double p = t > 0 ? std::min(fpp, s / t) : fpp;
  return s * std::log2(1 / p) + t * p * std::numbers::log2e;
}

auto sweep(std::uint64_t s, unsigned r, double epsilon, const std::vector<std::uint64_t>& t_values)
    -> std::vector<SizingReport> {
  std::vector<SizingReport> out;
  out.reserve(t_values.size());
  for (auto t : t_values) {
    SizingReport rep;
    rep.s = s;
    rep.t = t;
    rep.r = r;
    rep.epsilon = epsilon;
    rep.naive_bits = m_naive(static_cast<double>(s), static_cast<double>(t), r, epsilon);
    const TfSize tf = m_tf(s, t, r, epsilon);
    const IfSize c1 = m_if(s, t, r, IfMode::c1, epsilon);
    const IfSize cmin = m_if(s, t, r, IfMode::cmin, epsilon);
    rep.tf_bits = tf.bits;
    rep.if_c1_bits = c1.bits;
    rep.if_cmin_bits = cmin.bits;
    rep.a_tf = tf.a;
    rep.a_if_c1 = c1.a;
    rep.a_if_cmin = cmin.a;
    rep.c = cmin.c;
    rep.predicted_fpp = predicted_fpp(Variant::two_filter, r, tf.a);
    if (s > 0 && t > 0 && rep.predicted_fpp < 0.5) {
      rep.lower_bound_bits = lower_bound(static_cast<double>(s), static_cast<double>(t), rep.predicted_fpp);
    }
    out.push_back(rep);
  }
  return out;
}

auto predicted_bits(const FpfsFilter& filter, double epsilon) -> double {
  const auto s = static_cast<double>(filter.s());
  const auto t = static_cast<double>(filter.t());
  const unsigned r = filter.r();
  const double slack = static_cast<double>(kTableSlack);
  if (filter.variant() == Variant::naive) {
    return m_naive(s, t, r, epsilon) + slack * r;
  }
  if (filter.variant() == Variant::plain || filter.degenerate()) {
    return s * (1 + epsilon) * r + slack * r;
  }
  const unsigned a = filter.a();
  if (filter.variant() == Variant::two_filter) {
    const double f = expected_residual(filter.t(), r, a);
    return s * (1 + epsilon) * (r + a - 1) + (s + f) * (1 + epsilon) + slack * (r + a);
  }
  const unsigned width = r + a - 1 + filter.c();
  if (filter.c() == 1) {
    return (s + expected_residual(filter.t(), r, a)) * (1 + epsilon) * width + slack * width;
  }
  return s * (1 + epsilon) * width + slack * width;
}

} // namespace fpfs
