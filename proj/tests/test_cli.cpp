#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " \"" SSR_CLI_PATH "\" " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch_dir() {
  fs::path d = fs::temp_directory_path() / ("ssr_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("recover --measure /nonexistent.json") == 2);
  CHECK(run("bounds-audit --bound NOT_A_BOUND --samples 10") == 2);
  CHECK(run("sweep --trials 0") == 2);
  CHECK(run("recover --degree -3 --measure " + ssr::test::data_path("table1.json")) == 2);
}

TEST_CASE("bound audit command") {
  fs::path d = scratch_dir();
  CHECK(run("bounds-audit --degrees 20 --bound G1 --samples 2000 --out " + (d / "g1.csv").string()) == 0);
  std::string csv = slurp(d / "g1.csv");
  CHECK(csv.find("L32.G1,20,") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("moments command and config precedence") {
  fs::path d = scratch_dir();
  std::string measure = ssr::test::data_path("table1.json");
  CHECK(run("moments --measure " + measure + " --degree 3 --out " + (d / "m3.json").string()) == 0);
  auto j = nlohmann::json::parse(slurp(d / "m3.json"));
  CHECK(j["N"] == 3);
  CHECK(j["values"].size() == 16);

  {
    std::ofstream cfg(d / "cfg.json");
    cfg << R"({"moments": {"degree": 2}, "threads": 1})";
  }
  CHECK(run("--config " + (d / "cfg.json").string() + " moments --measure " + measure + " --out " +
            (d / "m2.json").string()) == 0);
  CHECK(nlohmann::json::parse(slurp(d / "m2.json"))["N"] == 2);
  // An explicit flag overrides the config value.
  CHECK(run("--config " + (d / "cfg.json").string() + " moments --measure " + measure + " --degree 4 --out " +
            (d / "m4.json").string()) == 0);
  CHECK(nlohmann::json::parse(slurp(d / "m4.json"))["N"] == 4);
  fs::remove_all(d);
}

TEST_CASE("grid recovery command") {
  fs::path d = scratch_dir();
  std::string measure = ssr::test::data_path("table1.json");
  CHECK(run("recover --method grid --grid-n 40 --thresh 0.1 --measure " + measure + " --out " +
                (d / "grid.json").string(),
            "SPHERE_SUPERRES_THREADS=1") == 0);
  auto j = nlohmann::json::parse(slurp(d / "grid.json"));
  CHECK(j["measure"]["atoms"].size() == 6);
  CHECK(j["eps_x"].get<double>() < 0.1);
  CHECK(j["diagnostics"]["method"] == "grid");

  CHECK(run("convergence --measure " + measure + " --grid-ns 20 40 --out " + (d / "conv.csv").string()) == 0);
  std::string conv = slurp(d / "conv.csv");
  CHECK(std::count(conv.begin(), conv.end(), '\n') == 3);
  fs::remove_all(d);
}

TEST_CASE("certificate command") {
  fs::path d = scratch_dir();
  {
    std::ofstream m(d / "one.json");
    m << R"({"atoms": [{"r": 0.7, "theta": 1.1, "c": 1.0}]})";
  }
  CHECK(run("certificate --support " + (d / "one.json").string() + " --degree 20 --sampling 5 --out " +
            (d / "rep.json").string()) == 0);
  auto j = nlohmann::json::parse(slurp(d / "rep.json"));
  CHECK(j["pass"] == true);
  CHECK(j["max_off_cap_q"].get<double>() < 1.0);
  fs::remove_all(d);
}
