// Exit-code and output contracts of the command-line tool.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("dyadlab_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& stdout_file = "") {
  const std::string out = stdout_file.empty() ? (scratch() / "stdout.txt").string() : stdout_file;
  const std::string cmd = std::string(DYADLAB_BIN) + " " + args + " > " + out + " 2> " +
                          (scratch() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("gen-weight then compute characteristic") {
  const auto s = scratch() / "s.wgt", w = scratch() / "w.wgt";
  REQUIRE(run("gen-weight --dim 2 --depth 3 --spec lognormal:1:0.5 --out " + s.string()) == 0);
  REQUIRE(run("gen-weight --dim 2 --depth 3 --spec constant:1 --out " + w.string()) == 0);
  CHECK(slurp(w).rfind("WGT1 d=2 L=3", 0) == 0);
  const auto out = scratch() / "char.csv";
  CHECK(run("compute characteristic --kind product_bump --p 2 --q 4 --theta 1.5 --sigma " + s.string() +
                " --omega " + w.string(),
            out.string()) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.find("quantity,kind,value,witness") == 0);
  CHECK(csv.find("product_bump") != std::string::npos);
}

TEST_CASE("malformed weight file exits 3") {
  const auto bad = scratch() / "bad.wgt";
  write(bad, "WGT1 d=1 L=2\n1 1 1\n");
  CHECK(run("compute doubling --weight " + bad.string()) == 3);
  CHECK(run("compute doubling --weight " + (scratch() / "missing.wgt").string()) == 3);
}

TEST_CASE("p >= q exits 2 naming the constraint") {
  const auto w = scratch() / "w2.wgt";
  REQUIRE(run("gen-weight --dim 2 --depth 2 --spec constant:1 --out " + w.string()) == 0);
  CHECK(run("compute characteristic --p 4 --q 2 --sigma " + w.string() + " --omega " + w.string()) == 2);
  CHECK(slurp(scratch() / "stderr.txt").find("p < q") != std::string::npos);
}

TEST_CASE("unknown options are rejected") {
  CHECK(run("compute doubling --bogus 1") == 2);
  CHECK(run("frobnicate") == 2);
}

TEST_CASE("negative weight exits 2 at load") {
  const auto neg = scratch() / "neg.wgt";
  write(neg, "WGT1 d=1 L=1\n1 -1\n");
  CHECK(run("verify --quick --properties-only --weight " + neg.string()) == 2);
}

TEST_CASE("verify is deterministic") {
  const auto a = scratch() / "a.csv", b = scratch() / "b.csv";
  REQUIRE(run("verify --quick --properties-only --depth 6 --seed 7 --out " + a.string()) == 0);
  REQUIRE(run("verify --quick --properties-only --depth 6 --seed 7 --out " + b.string()) == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find("check,pass,measured") == 0);
}

TEST_CASE("norm-estimate trace ends with the lower bound") {
  const auto s = scratch() / "ns.wgt";
  REQUIRE(run("gen-weight --dim 2 --depth 3 --spec lognormal:3:0.5 --out " + s.string()) == 0);
  const auto out = scratch() / "trace.csv";
  REQUIRE(run("norm-estimate --iterations 5 --sigma " + s.string() + " --omega " + s.string(), out.string()) == 0);
  const std::string trace = slurp(out);
  CHECK(trace.rfind("start,iteration,objective,seed", 0) == 0);
  CHECK(trace.find("\nlower_bound,") != std::string::npos);
}

TEST_CASE("strong-rd-bound and grid-sample") {
  const auto out = scratch() / "rd.json";
  REQUIRE(run("compute strong-rd-bound --rd-beta 0.6 --format json", out.string()) == 0);
  CHECK(slurp(out).find("\"C\": 8.0") != std::string::npos);
  const auto g = scratch() / "grid.txt";
  REQUIRE(run("grid-sample --kind shift --dim 2 --depth 5 --check", g.string()) == 0);
  const std::string text = slurp(g);
  CHECK(text.rfind("GRID1 dim=2 kind=shift", 0) == 0);
  CHECK(text.find("structure: ok") != std::string::npos);
}
