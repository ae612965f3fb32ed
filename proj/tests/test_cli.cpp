#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  const auto dir = fs::temp_directory_path() / "locus_test_cli";
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = std::string(LOCUS_CLI) + " " + args + " > " + (work_dir() / "stdout.txt").string() +
                          " 2> " + (work_dir() / "stderr.txt").string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("generate, noise, solve pipeline") {
  const auto dir = work_dir();
  const auto inst = dir / "inst.json";
  const auto meas = dir / "meas.json";
  const auto sol = dir / "sol.json";
  REQUIRE(run("generate --n 30 --d 2 --r 0.7 --seed 4 --out " + inst.string()) == 0);
  const auto doc = load(inst);
  CHECK(doc.at("configuration").at("points").size() == 30);
  CHECK(doc.at("configuration").at("dim") == 2);
  CHECK(doc.at("graph").at("radius") == 0.7);

  REQUIRE(run("noise --in " + inst.string() + " --model uniform --delta 0.001 --seed 2 --out " + meas.string()) == 0);
  const auto m = load(meas);
  CHECK(m.at("model") == "uniform");
  CHECK(m.at("delta") == 0.001);
  CHECK(m.at("edges").size() == doc.at("graph").at("edges").size());

  REQUIRE(run("solve --in " + meas.string() + " --d 2 --max-iters 5000 --truth " + inst.string() + " --out " +
              sol.string()) == 0);
  const auto s = load(sol);
  CHECK(s.at("iterations").get<int>() <= 5000);
  CHECK(s.at("max_violation").get<double>() < 1e-3);
  CHECK(s.at("points").size() == 30);
  CHECK(s.at("metric").get<double>() < 0.01);
  CHECK(slurp(dir / "stdout.txt").find("converged=") != std::string::npos);
}

TEST_CASE("rigidity subcommand prints a JSON report") {
  const auto dir = work_dir();
  const auto inst = dir / "rig.json";
  REQUIRE(run("generate --n 40 --alpha 3 --seed 1 --out " + inst.string()) == 0);
  REQUIRE(run("rigidity --in " + inst.string() + " --mode full") == 0);
  const auto report = json::parse(slurp(dir / "stdout.txt"));
  CHECK(report.at("stress").at("mode") == "full");
  CHECK(report.at("n") == 40);
}

TEST_CASE("sweep subcommand writes its report") {
  const auto dir = work_dir();
  const auto cfg = dir / "sweep.json";
  std::ofstream(cfg) << R"({"name": "cli", "sweep": "r", "n": 15, "values": [0.6, 0.7, 0.8], "seeds": 1,
                            "delta": 0.004, "solver": {"max_iters": 1500}})";
  const auto out = dir / "sweep_out";
  REQUIRE(run("sweep --config " + cfg.string() + " --out-dir " + out.string() + " --quiet") == 0);
  const std::string csv = slurp(out / "results.csv");
  CHECK(csv.rfind("sweep_value,seed,metric,trace,max_violation,iterations,converged,wall_s", 0) == 0);
  CHECK(load(out / "summary.json").at("cells") == 3);
}

TEST_CASE("errors exit nonzero with a message") {
  const auto dir = work_dir();
  CHECK(run("solve --in " + (dir / "missing.json").string() + " --out " + (dir / "x.json").string()) == 1);
  CHECK(slurp(dir / "stderr.txt").find("missing.json") != std::string::npos);
  CHECK(run("noise --in x --model laplace --out y") != 0);
  CHECK(run("") != 0);
  fs::remove_all(dir);
}
