#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fpfs/eval.hpp"
#include "fpfs/filter_file.hpp"
#include "fpfs/keys.hpp"
#include "fpfs/report_csv.hpp"

using namespace fpfs;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

class Workdir {
public:
  Workdir() : dir_(fs::temp_directory_path() / ("fpfs_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Workdir() { fs::remove_all(dir_); }
  [[nodiscard]] auto path(const std::string& name) const -> std::string { return (dir_ / name).string(); }

private:
  fs::path dir_;
};

auto run(const std::string& args, const Workdir& wd) -> Result {
  const std::string out = wd.path("stdout.txt");
  const std::string cmd = std::string(FPFS_CLI) + " " + args + " > " + out + " 2> " + wd.path("stderr.txt");
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

auto read_file(const std::string& p) -> std::string {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_lines(const std::string& path, const KeySource& keys) { write_dataset(path, keys); }

} // namespace

TEST_SUITE("cli") {

TEST_CASE("build, query and verify") {
  Workdir wd;
  const auto sets = gen_disjoint_sets(10000, 100000, 1);
  write_lines(wd.path("s.txt"), sets.S);
  write_lines(wd.path("t.txt"), sets.T);
  std::ofstream(wd.path("empty.txt")).close();

  SUBCASE("integrated build reports c = 2") {
    const auto r = run("build --s-file " + wd.path("s.txt") + " --t-file " + wd.path("t.txt") +
                           " --variant if --r 8 --out " + wd.path("f.bin"),
                       wd);
    CHECK(r.code == 0);
    CHECK(r.out.find("c=2\n") != std::string::npos);
    CHECK(r.out.find("a=0\n") != std::string::npos);
    CHECK(r.out.find("bits=") != std::string::npos);
    CHECK(r.out.find("retries=") != std::string::npos);
  }

  SUBCASE("two filters with an empty T") {
    const auto r = run("build --s-file " + wd.path("s.txt") + " --t-file " + wd.path("empty.txt") +
                           " --variant tf --out " + wd.path("f.bin"),
                       wd);
    CHECK(r.code == 0);
    CHECK(r.out.find("a=0\n") != std::string::npos);
    CHECK(r.out.find("f=0\n") != std::string::npos);
  }

  SUBCASE("queries, verification and tampering") {
    REQUIRE(run("build --s-file " + wd.path("s.txt") + " --t-file " + wd.path("t.txt") + " --out " +
                    wd.path("f.bin"),
                wd)
                .code == 0);
    const std::string s0(sets.S[0]);
    const std::string t0(sets.T[0]);
    const auto q = run("query --filter " + wd.path("f.bin") + " --key " + s0 + " --key " + t0, wd);
    CHECK(q.code == 0);
    CHECK(q.out == s0 + "\t1\n" + t0 + "\t0\n");

    const auto qf = run("query --filter " + wd.path("f.bin") + " --keys-file " + wd.path("t.txt"), wd);
    CHECK(qf.code == 0);
    CHECK(qf.out.find("\t1\n") == std::string::npos);
    CHECK(qf.out.substr(0, 17) == t0 + "\t");

    CHECK(run("verify --filter " + wd.path("f.bin") + " --s-file " + wd.path("s.txt") + " --t-file " +
                  wd.path("t.txt"),
              wd)
              .code == 0);

    // Flip a cell bit and reseal so the file still loads.
    auto bytes = serialize(load_filter(wd.path("f.bin")));
    FpfsFilter f = deserialize(bytes);
    XorTable& t = f.tables()[0];
    const auto p = positions(t.key_digest(s0), t.segment_len());
    t.cells().set(p[0], t.cells().get(p[0]) ^ 1U);
    save_filter(wd.path("tampered.bin"), f);
    const auto v = run("verify --filter " + wd.path("tampered.bin") + " --s-file " + wd.path("s.txt") +
                           " --t-file " + wd.path("t.txt"),
                       wd);
    CHECK(v.code == 4);
    CHECK(v.out.find("false_negative\t" + s0) != std::string::npos);

    // A raw flipped byte fails the checksum.
    bytes[bytes.size() / 2] ^= 0x10;
    {
      std::ofstream out(wd.path("corrupt.bin"), std::ios::binary);
      out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    const auto c = run("query --filter " + wd.path("corrupt.bin") + " --key " + s0, wd);
    CHECK(c.code == 1);
    CHECK(c.out.empty());
    CHECK(read_file(wd.path("stderr.txt")).find("checksum") != std::string::npos);
  }

  SUBCASE("plain filter fails verification against T") {
    REQUIRE(run("build --s-file " + wd.path("s.txt") + " --variant plain --out " + wd.path("p.bin"), wd).code == 0);
    const auto v = run("verify --filter " + wd.path("p.bin") + " --s-file " + wd.path("s.txt") + " --t-file " +
                           wd.path("t.txt"),
                       wd);
    CHECK(v.code == 4);
    CHECK(v.out.find("false_negatives=0\n") != std::string::npos);
    CHECK(v.out.find("t_positive\t") != std::string::npos);
  }

  SUBCASE("overlapping sets exit 2") {
    const auto r = run("build --s-file " + wd.path("s.txt") + " --t-file " + wd.path("s.txt") + " --out " +
                           wd.path("x.bin"),
                       wd);
    CHECK(r.code == 2);
    const std::string err = read_file(wd.path("stderr.txt"));
    CHECK(err.find(std::string(sets.S[0])) != std::string::npos);
    CHECK(err.find(std::string(sets.S[10])) == std::string::npos);
    CHECK_FALSE(fs::exists(wd.path("x.bin")));
  }

  SUBCASE("retry exhaustion exits 3") {
    const auto r = run("build --s-file " + wd.path("s.txt") + " --variant plain --epsilon 0 --max-retries 1 --out " +
                           wd.path("x.bin"),
                       wd);
    CHECK(r.code == 3);
  }

  SUBCASE("input errors exit 1") {
    std::ofstream(wd.path("blank.txt")) << "a\n\nb\n";
    std::ofstream(wd.path("dup.txt")) << "a\nb\na\n";
    CHECK(run("build --s-file " + wd.path("missing.txt") + " --out " + wd.path("x.bin"), wd).code == 1);
    CHECK(run("build --s-file " + wd.path("blank.txt") + " --out " + wd.path("x.bin"), wd).code == 1);
    CHECK(run("build --s-file " + wd.path("dup.txt") + " --out " + wd.path("x.bin"), wd).code == 1);
    CHECK(run("build --s-file " + wd.path("s.txt") + " --variant bloom --out " + wd.path("x.bin"), wd).code == 1);
    CHECK(run("build --s-file " + wd.path("s.txt") + " --r 30 --out " + wd.path("x.bin"), wd).code == 1);
    CHECK(run("query --filter " + wd.path("missing.bin") + " --key a", wd).code == 1);
    CHECK(run("frobnicate", wd).code == 1);
    CHECK(run("", wd).code == 1);
    CHECK(run("--help", wd).code == 0);
  }
}

TEST_CASE("analyze") {
  Workdir wd;
  const auto r = run("analyze --s 1000000 --r 8 --t-list 0,10000,1e9 --fpp 0.00390625", wd);
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == std::string(kCsvHeader) + ",lower_bound");
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    rows.push_back(line);
  }
  REQUIRE(rows.size() == 12);
  auto bits = [](const std::string& row) {
    std::vector<std::string> cols;
    std::stringstream ss(row);
    for (std::string c; std::getline(ss, c, ',');) {
      cols.push_back(c);
    }
    return std::stod(cols.at(7));
  };
  // t = 0: every construction is the plain filter.
  for (int i = 1; i < 4; ++i) {
    CHECK(bits(rows[static_cast<std::size_t>(i)]) == bits(rows[0]));
  }
  // tf is the smallest.
  for (std::size_t g = 4; g < 12; g += 4) {
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(bits(rows[g + 1]) <= bits(rows[g + i]));
    }
  }
  CHECK(rows[1].substr(0, 3) == "tf,");

  const auto plain = run("analyze --t-list 5", wd);
  CHECK(plain.code == 0);
  CHECK(plain.out.substr(0, plain.out.find('\n')) == kCsvHeader);
  CHECK(run("analyze --t-list 5 --fpp 0.7", wd).code == 1);
  CHECK(run("analyze --t-list 5 --fpp 0", wd).code == 1);
}

TEST_CASE("bench and casestudy") {
  Workdir wd;
  const auto b = run("bench --s 5000 --t 50000 --runs 2 --variant if1 --fpp-queries 100000 --neg-queries 100000", wd);
  CHECK(b.code == 0);
  CHECK(b.out.substr(0, b.out.find('\n')) == kCsvHeader);
  CHECK(b.out.find("\nif1,8,") != std::string::npos);
  CHECK(read_file(wd.path("stderr.txt")).find("pos_ratio=") != std::string::npos);

  const auto c = run("casestudy --name spell", wd);
  CHECK(c.code == 0);
  CHECK(c.out.find("\ntf,8,0,0,6136,32894,") != std::string::npos);
  CHECK(c.out.find("# spell") != std::string::npos);

  const auto spv = run("casestudy --name spv --scale 1000", wd);
  CHECK(spv.code == 0);
  CHECK(spv.out.find(",2500,20000,") != std::string::npos);
  CHECK(spv.out.find("model at t=20000000") != std::string::npos);
  CHECK(run("casestudy --name dna", wd).code == 1);
}

}
