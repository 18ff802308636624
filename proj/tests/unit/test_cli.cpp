#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    std::random_device rd;
    dir = fs::temp_directory_path() / ("otrepair-cli-" + std::to_string(rd()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }
  std::string read(const std::string& name) const {
    std::ifstream in(dir / name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  // Runs the CLI with `args`, output dir `out`, and returns the exit status.
  int run(const std::string& args, const std::string& out = "out") const {
    const std::string cmd = std::string("\"") + OTREPAIR_CLI_PATH + "\" --out-dir \"" +
                            (dir / out).string() + "\" " + args + " > \"" +
                            (dir / "stdout.txt").string() + "\" 2> \"" +
                            (dir / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
};

const char* kSixSamples =
    "x,__group__\n"
    "0,0\n1,0\n1,0\n"
    "0,1\n0,1\n1,1\n";

std::size_t data_rows(const std::string& csv) {
  std::size_t n = 0;
  for (char c : csv) n += c == '\n';
  return n - 1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("total repair of the six-sample dataset") {
  Workspace w;
  const auto data = w.write("six.csv", kSixSamples);
  REQUIRE(w.run("repair --data " + data.string() + " --theta zero --epsilon 0.01 --iters 600") == 0);
  const auto repaired = w.read("out/repaired.csv");
  CHECK(data_rows(repaired) == 12);
  CHECK(fs::exists(w.dir / "out/coupling.csv"));
  CHECK(fs::exists(w.dir / "out/coupling.csv.json"));
  CHECK(fs::exists(w.dir / "out/report.json"));

  REQUIRE(w.run("metrics --data " + (w.dir / "out/repaired.csv").string(), "m") == 0);
  std::ifstream in(w.dir / "m/metrics.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["s_wise_tv"].get<double>() < 1e-9);
}

TEST_CASE("solve writes a coupling and report") {
  Workspace w;
  const auto src = w.write("p.csv", "point_0,mass\n0,0.5\n1,0.5\n");
  const auto g0 = w.write("g0.csv", "point_0,mass\n0,0.3333333333333333\n1,0.6666666666666667\n");
  const auto g1 = w.write("g1.csv", "point_0,mass\n0,0.6666666666666667\n1,0.3333333333333333\n");
  REQUIRE(w.run("solve --source " + src.string() + " --target self --group0 " + g0.string() +
                " --group1 " + g1.string() + " --theta zero") == 0);
  std::ifstream in(w.dir / "out/report.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j["report"]["final_residuals"].size() == 3);
  CHECK(data_rows(w.read("out/coupling.csv")) == 4);
}

TEST_CASE("validation failures exit with 2") {
  Workspace w;
  CHECK(w.run("repair --data " + (w.dir / "missing.csv").string()) == 2);
  CHECK(w.read("stderr.txt").find("cannot open") != std::string::npos);
  const auto src = w.write("p.csv", "point_0,mass\n0,0.5\n1,0.5\n");
  CHECK(w.run("solve --source " + src.string() + " --theta 0.1") == 2);
  CHECK(w.run("solve --source " + src.string() + " --theta banana") == 2);
  CHECK(w.run("solve --source " + src.string() + " --epsilon -1") == 2);
  CHECK(w.run("solve --no-such-flag") == 2);
  const auto bad = w.write("bad.csv", "x,__group__\n0,0\nzz,1\n");
  CHECK(w.run("metrics --data " + bad.string()) == 2);
  CHECK(w.read("stderr.txt").find("bad.csv:3:") != std::string::npos);
}

TEST_CASE("solver failures exit with 3") {
  Workspace w;
  const auto data = w.write("six.csv", kSixSamples);
  // Row sums 0.3 and 0.7 do not match P^X = [0.5, 0.5].
  w.write("g.csv", "src_index,tgt_index,mass\n0,0,0.3\n1,1,0.7\n");
  w.write("g.csv.json", R"({"rows":2,"cols":2})");
  CHECK(w.run("repair --data " + data.string() + " --coupling " + (w.dir / "g.csv").string()) == 3);
  CHECK(w.read("stderr.txt").find("coupling infeasible") != std::string::npos);
}

TEST_CASE("barycentre and synthetic subcommands") {
  Workspace w;
  const auto data = w.write("six.csv", kSixSamples);
  REQUIRE(w.run("barycentre --data " + data.string()) == 0);
  CHECK(fs::exists(w.dir / "out/repaired.csv"));

  const auto cfg = w.write("syn.json", R"({"samples": 500, "k_baseline": 40, "k_repair": 40,
                                           "theta_grid": [0.01]})");
  REQUIRE(w.run("synthetic-exp --seed 3 --config " + cfg.string(), "syn") == 0);
  CHECK(w.read("stdout.txt").find("0.01-repair") != std::string::npos);
  CHECK_FALSE(fs::is_empty(w.dir / "syn"));
}

}
