#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "edgeimp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return edgeimp::cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

}  // namespace

TEST_CASE("usage errors exit with code 1") {
  CHECK(run({}) == edgeimp::cli::kUsage);
  CHECK(run({"frobnicate"}) == edgeimp::cli::kUsage);
  CHECK(run({"perturb", "--output-dir", "/tmp/x"}) == edgeimp::cli::kUsage);
  CHECK(run({"--help"}) == edgeimp::cli::kOk);
  TempDir dir("edgeimp_cli_usage");
  CHECK(run({"importance", "--output-dir", dir / "o"}) == edgeimp::cli::kUsage);
  CHECK(run({"perturb", "--graph", "ring:5", "--mode", "triple", "--output-dir", dir / "o"}) ==
        edgeimp::cli::kUsage);
}

TEST_CASE("missing or corrupt inputs exit with code 2") {
  TempDir dir("edgeimp_cli_data");
  CHECK(run({"estimate", "--input", dir / "none.json", "--output-dir", dir / "o"}) == edgeimp::cli::kData);
  std::ofstream(dir / "bad.csv") << "a,b,1\na,b,oops\n";
  CHECK(run({"ingest", "--input", dir / "bad.csv", "--output-dir", dir / "o"}) == edgeimp::cli::kData);
  CHECK(run({"perturb", "--graph", "ring:2", "--output-dir", dir / "o"}) == edgeimp::cli::kData);
}

TEST_CASE("simulate then analyse, with provenance headers and repeatable output") {
  TempDir dir("edgeimp_cli_pipeline");
  const std::vector<std::string> sim{"simulate", "--graph", "er:25:0.25", "--weights", "int:1:10", "--alpha", "0.5",
                                     "--rho", "0.5", "--beta", "0.02", "--steps", "15", "--seed", "4"};
  auto with_out = [](std::vector<std::string> a, const std::string& out) {
    a.push_back("--output-dir");
    a.push_back(out);
    return a;
  };
  REQUIRE(run(with_out(sim, dir / "s1")) == 0);
  REQUIRE(run(with_out(sim, dir / "s2")) == 0);
  for (const char* f : {"network.json", "changes.csv", "simulate_summary.txt"})
    CHECK(slurp(dir.path / "s1" / f) == slurp(dir.path / "s2" / f));

  const std::string net = dir / "s1/network.json";
  for (const char* cmd : {"importance", "report", "estimate", "predict"}) {
    REQUIRE(run({cmd, "--input", net, "--seed", "3", "--output-dir", dir / (std::string(cmd) + "1")}) == 0);
    REQUIRE(run({cmd, "--input", net, "--seed", "3", "--output-dir", dir / (std::string(cmd) + "2")}) == 0);
    for (const auto& entry : fs::directory_iterator(dir.path / (std::string(cmd) + "1"))) {
      const auto text = slurp(entry.path());
      CHECK(text.rfind("# config: {", 0) == 0);
      CHECK(text.find(R"("command":")" + std::string(cmd)) != std::string::npos);
      CHECK(text == slurp(dir.path / (std::string(cmd) + "2") / entry.path().filename()));
    }
  }
  const auto changes = slurp(dir.path / "s1" / "changes.csv");
  CHECK(changes.find("\nt,source,target,l_e,changed,rel_change\n") != std::string::npos);
}
