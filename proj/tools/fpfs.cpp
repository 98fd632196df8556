// fpfs: build, query and evaluate filters whose negative set T never
// produces a false positive.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpfs/eval.hpp"
#include "fpfs/filter.hpp"
#include "fpfs/filter_file.hpp"
#include "fpfs/keys.hpp"
#include "fpfs/report_csv.hpp"
#include "fpfs/sizing.hpp"

namespace {

using namespace fpfs;

enum Exit : int {
  kOk = 0,
  kIoError = 1,
  kDisjoint = 2,
  kExhausted = 3,
  kViolation = 4,
};

constexpr std::size_t kShownOffenders = 10;

struct VariantArg {
  Variant variant;
  IfMode mode;
};

auto parse_variant(const std::string& name) -> VariantArg {
  if (name == "plain") return {Variant::plain, IfMode::cmin};
  if (name == "naive") return {Variant::naive, IfMode::cmin};
  if (name == "tf") return {Variant::two_filter, IfMode::cmin};
  if (name == "if" || name == "if2") return {Variant::integrated, IfMode::cmin};
  if (name == "if1") return {Variant::integrated, IfMode::c1};
  throw std::invalid_argument("unknown variant '" + name + "'");
}

const std::vector<std::string> kVariantNames{"plain", "naive", "tf", "if", "if1", "if2"};

struct BuildArgs {
  std::string s_file;
  std::string t_file;
  std::string variant = "tf";
  unsigned r = 8;
  double epsilon = kDefaultEpsilon;
  std::uint64_t seed = BuildConfig{}.master.value;
  unsigned max_retries = kDefaultMaxRetries;
  std::optional<unsigned> a;
  std::string out;
};

auto make_config(const std::string& variant, unsigned r, double epsilon, std::uint64_t seed, unsigned max_retries,
                 std::optional<unsigned> a) -> BuildConfig {
  const VariantArg v = parse_variant(variant);
  BuildConfig cfg;
  cfg.variant = v.variant;
  cfg.if_mode = v.mode;
  cfg.r = r;
  cfg.epsilon = epsilon;
  cfg.master = Seed{seed};
  cfg.max_retries = max_retries;
  if (a) {
    cfg.auto_a = false;
    cfg.a = *a;
  }
  return cfg;
}

auto cmd_build(const BuildArgs& args) -> int {
  const BuildConfig cfg = make_config(args.variant, args.r, args.epsilon, args.seed, args.max_retries, args.a);
  const FileKeySource S(args.s_file);
  std::optional<FileKeySource> T_file;
  if (!args.t_file.empty()) {
    T_file.emplace(args.t_file);
  }
  const KeyList no_keys;
  const KeySource& T = T_file ? static_cast<const KeySource&>(*T_file) : no_keys;

  const FpfsFilter filter = build(S, T, cfg);
  save_filter(args.out, filter);

  std::cout << "variant=" << report_name(filter) << '\n'
            << "r=" << filter.r() << '\n'
            << "a=" << filter.a() << '\n'
            << "c=" << filter.c() << '\n'
            << "s=" << filter.s() << '\n'
            << "t=" << filter.t() << '\n'
            << "f=" << filter.f() << '\n'
            << "bits=" << filter.memory_bits() << '\n'
            << "file_bytes=" << serialize(filter).size() << '\n'
            << "retries=";
  for (std::size_t i = 0; i < filter.retries.size(); ++i) {
    std::cout << (i ? "," : "") << filter.retries[i];
  }
  std::cout << '\n' << "resizes=" << filter.resizes << '\n';
  return kOk;
}

auto cmd_query(const std::string& filter_path, const std::vector<std::string>& keys, const std::string& keys_file)
    -> int {
  const FpfsFilter filter = load_filter(filter_path);
  std::string out;
  auto answer = [&](std::string_view key) {
    out.append(key);
    out += filter.query(key) ? "\t1\n" : "\t0\n";
  };
  for (const auto& k : keys) {
    answer(k);
  }
  if (!keys_file.empty()) {
    std::ifstream in(keys_file, std::ios::binary);
    if (!in) {
      throw DatasetError("cannot open keys file: " + keys_file);
    }
    for (std::string line; std::getline(in, line);) {
      answer(line);
    }
  }
  std::cout << out;
  return kOk;
}

auto cmd_verify(const std::string& filter_path, const std::string& s_file, const std::string& t_file) -> int {
  const FpfsFilter filter = load_filter(filter_path);
  const FileKeySource S(s_file);
  const FileKeySource T(t_file);
  const VerifyResult res = verify(filter, S, T);
  std::cout << "s=" << S.size() << '\n'
            << "t=" << T.size() << '\n'
            << "false_negatives=" << res.false_negatives << '\n'
            << "t_positives=" << res.t_positives << '\n';
  for (const auto& k : res.false_negative_keys) {
    std::cout << "false_negative\t" << k << '\n';
  }
  for (const auto& k : res.t_positive_keys) {
    std::cout << "t_positive\t" << k << '\n';
  }
  return res.ok() ? kOk : kViolation;
}

struct BenchArgs {
  std::uint64_t s = 100'000;
  std::uint64_t t = 1'000'000;
  unsigned r = 8;
  std::string variant = "tf";
  unsigned runs = 30;
  std::uint64_t seed = 1;
  std::uint64_t fpp_queries = 1'000'000;
  std::uint64_t negative_queries = 1'000'000;
};

auto cmd_bench(const BenchArgs& args) -> int {
  BenchConfig cfg;
  cfg.build = make_config(args.variant, args.r, kDefaultEpsilon, BuildConfig{}.master.value, kDefaultMaxRetries, {});
  cfg.runs = args.runs;
  cfg.rng_seed = args.seed;
  cfg.fpp_queries = args.fpp_queries;
  cfg.negative_queries = args.negative_queries;
  const DisjointSets sets = gen_disjoint_sets(args.s, args.t, args.seed);
  const EvalReport rep = bench(cfg, sets.S, sets.T);
  std::cout << kCsvHeader << '\n' << csv_row(rep) << '\n';
  std::cerr << "build_ratio=" << format_number(rep.build_ratio()) << '\n'
            << "pos_ratio=" << format_number(rep.pos_ratio()) << '\n'
            << "neg_ratio=" << format_number(rep.neg_ratio()) << '\n';
  if (rep.false_negatives != 0 || (rep.variant != "plain" && rep.t_positives != 0)) {
    std::cerr << "verification failed: " << rep.false_negatives << " false negatives, " << rep.t_positives
              << " T positives\n";
    return kViolation;
  }
  return kOk;
}

auto cmd_analyze(std::uint64_t s, unsigned r, double epsilon, const std::vector<double>& t_list,
                 std::optional<double> fpp) -> int {
  if (fpp && !(*fpp > 0.0 && *fpp < 0.5)) {
    std::cerr << "error: --fpp must lie in (0, 0.5)\n";
    return kIoError;
  }
  std::vector<std::uint64_t> ts;
  for (double t : t_list) {
    if (!(t >= 0) || t != std::floor(t)) {
      std::cerr << "error: t values must be non-negative integers\n";
      return kIoError;
    }
    ts.push_back(static_cast<std::uint64_t>(t));
  }
  std::cout << sizing_header(fpp.has_value()) << '\n';
  for (const auto& rep : sweep(s, r, epsilon, ts)) {
    for (const auto& row : sizing_rows(rep, fpp)) {
      std::cout << row << '\n';
    }
  }
  return kOk;
}

auto cmd_casestudy(const std::string& name, std::optional<std::uint64_t> scale, bool full, std::uint64_t seed)
    -> int {
  auto studies = case_studies(name);
  if (name == "spv" && !full) {
    studies.resize(1);
  }
  const std::uint64_t divide = scale.value_or(name == "spv" && !full ? 100 : 1);
  if (divide == 0) {
    std::cerr << "error: --scale must be at least 1\n";
    return kIoError;
  }

  int rc = kOk;
  std::cout << kCsvHeader << '\n';
  std::vector<std::string> summary;
  for (auto study : studies) {
    const std::uint64_t full_t = study.t;
    study.t = std::max<std::uint64_t>(1, study.t / divide);
    const CaseStudyResult res = run_case_study(study, seed);
    for (const auto& row : res.rows) {
      std::cout << csv_row(row) << '\n';
      const bool bad = row.false_negatives != 0 || (row.variant != "plain" && row.t_positives != 0);
      if (bad) {
        std::cerr << row.variant << ": " << row.false_negatives << " false negatives, " << row.t_positives
                  << " T positives\n";
        rc = kViolation;
      }
    }
    std::string line = "# " + study.name + " s=" + std::to_string(study.s) + " t=" + std::to_string(study.t);
    for (const auto& row : res.rows) {
      line += ' ' + row.variant + "_bits=" + std::to_string(row.memory_bits);
    }
    for (const char* v : {"tf", "if1", "if2"}) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " %s_overhead=%.3f%%", v, 100 * res.overhead(v));
      line += buf;
    }
    line += " plain_t_positives=" + std::to_string(res.row("plain").t_positives);
    summary.push_back(line);
    if (study.t != full_t) {
      summary.push_back("# " + study.name + " model at t=" + std::to_string(full_t) +
                        ": tf_bits=" + format_number(std::round(m_tf(study.s, full_t, 8).bits)) +
                        " plain_bits=" + format_number(std::round(m_tf(study.s, 0, 8).bits)));
    }
  }
  for (const auto& line : summary) {
    std::cout << line << '\n';
  }
  return rc;
}

auto run(int argc, char** argv) -> int {
  CLI::App app{"Filters with a false-positive-free negative set"};
  app.require_subcommand(1);

  BuildArgs b;
  auto* build_cmd = app.add_subcommand("build", "Build a filter from S and T key files");
  build_cmd->add_option("--s-file", b.s_file, "Keys that must query positive, one per line")->required();
  build_cmd->add_option("--t-file", b.t_file, "Keys that must query negative (omit for none)");
  build_cmd->add_option("--variant", b.variant, "plain, naive, tf, if1 or if2 (if = if2)")
      ->check(CLI::IsMember(kVariantNames));
  build_cmd->add_option("--r", b.r, "Fingerprint bits")->check(CLI::Range(kMinR, kMaxR));
  build_cmd->add_option("--epsilon", b.epsilon, "Table space overhead")->check(CLI::NonNegativeNumber);
  build_cmd->add_option("--seed", b.seed, "Master seed");
  build_cmd->add_option("--max-retries", b.max_retries, "Extra construction attempts per table");
  build_cmd->add_option("--a", b.a, "Use this many extra filter bits instead of choosing them");
  build_cmd->add_option("--out", b.out, "Output filter file")->required();

  std::string q_filter;
  std::vector<std::string> q_keys;
  std::string q_keys_file;
  auto* query_cmd = app.add_subcommand("query", "Query keys against a filter file");
  query_cmd->add_option("--filter", q_filter)->required();
  auto* key_opt = query_cmd->add_option("--key", q_keys, "Key to query (repeatable)");
  auto* file_opt = query_cmd->add_option("--keys-file", q_keys_file, "File of keys, one per line");
  query_cmd->callback([&] {
    if (key_opt->count() == 0 && file_opt->count() == 0) {
      throw CLI::ValidationError("query", "give --key or --keys-file");
    }
  });

  std::string v_filter;
  std::string v_s;
  std::string v_t;
  auto* verify_cmd = app.add_subcommand("verify", "Check a filter against S and T");
  verify_cmd->add_option("--filter", v_filter)->required();
  verify_cmd->add_option("--s-file", v_s)->required();
  verify_cmd->add_option("--t-file", v_t)->required();

  BenchArgs be;
  auto* bench_cmd = app.add_subcommand("bench", "Time a variant against a plain filter on synthetic keys");
  bench_cmd->add_option("--s", be.s);
  bench_cmd->add_option("--t", be.t);
  bench_cmd->add_option("--r", be.r)->check(CLI::Range(kMinR, kMaxR));
  bench_cmd->add_option("--variant", be.variant)->check(CLI::IsMember(kVariantNames));
  bench_cmd->add_option("--runs", be.runs)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", be.seed, "Dataset and probe seed");
  bench_cmd->add_option("--fpp-queries", be.fpp_queries)->check(CLI::Range(kMinFppQueries, UINT64_MAX));
  bench_cmd->add_option("--neg-queries", be.negative_queries);

  std::uint64_t an_s = 1'000'000;
  unsigned an_r = 8;
  double an_eps = kDefaultEpsilon;
  std::vector<double> an_t;
  std::optional<double> an_fpp;
  auto* analyze_cmd = app.add_subcommand("analyze", "Print modelled sizes for a sweep over t");
  analyze_cmd->add_option("--s", an_s);
  analyze_cmd->add_option("--r", an_r)->check(CLI::Range(kMinR, kMaxR));
  analyze_cmd->add_option("--epsilon", an_eps)->check(CLI::NonNegativeNumber);
  analyze_cmd->add_option("--t-list", an_t, "Comma-separated t values")->delimiter(',')->required();
  analyze_cmd->add_option("--fpp", an_fpp, "Add a lower_bound column for this target rate");

  std::string cs_name;
  std::optional<std::uint64_t> cs_scale;
  bool cs_full = false;
  std::uint64_t cs_seed = 7;
  auto* case_cmd = app.add_subcommand("casestudy", "Rebuild a case study at its set sizes");
  case_cmd->add_option("--name", cs_name)->required()->check(CLI::IsMember({"spell", "url", "spv"}));
  case_cmd->add_option("--scale", cs_scale, "Divide t by this factor (spv defaults to 100)");
  case_cmd->add_flag("--full", cs_full, "spv: also run the largest T at full size");
  case_cmd->add_option("--seed", cs_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kIoError;
  }

  try {
    if (*build_cmd) return cmd_build(b);
    if (*query_cmd) return cmd_query(q_filter, q_keys, q_keys_file);
    if (*verify_cmd) return cmd_verify(v_filter, v_s, v_t);
    if (*bench_cmd) return cmd_bench(be);
    if (*analyze_cmd) return cmd_analyze(an_s, an_r, an_eps, an_t, an_fpp);
    if (*case_cmd) return cmd_casestudy(cs_name, cs_scale, cs_full, cs_seed);
  } catch (const DisjointnessViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    const auto& keys = e.offenders();
    for (std::size_t i = 0; i < keys.size() && i < kShownOffenders; ++i) {
      std::cerr << "  " << keys[i] << '\n';
    }
    return kDisjoint;
  } catch (const BuildExhausted& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExhausted;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kIoError;
}

} // namespace

auto main(int argc, char** argv) -> int { return run(argc, argv); }
