#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpfs/eval.hpp"
#include "fpfs/sizing.hpp"

namespace fpfs {

inline constexpr std::string_view kCsvHeader =
    "variant,r,a,c,s,t,f,bits,bits_per_elem,pred_fpp,meas_fpp,ci_lo,ci_hi,build_ns,pos_ns,neg_ns";

// Shortest round-trip decimal form, independent of locale.
[[nodiscard]] auto format_number(double v) -> std::string;

[[nodiscard]] auto csv_row(const EvalReport& rep) -> std::string;

// The header with an extra lower_bound column when requested.
[[nodiscard]] auto sizing_header(bool with_bound) -> std::string;

// Rows naive, tf, if1, if2 for one sweep point. Measurement and timing
// columns are left empty; f is the expected residual count. With `fpp`, a
// lower_bound column at that target is appended.
[[nodiscard]] auto sizing_rows(const SizingReport& rep, std::optional<double> fpp) -> std::vector<std::string>;

} // namespace fpfs
