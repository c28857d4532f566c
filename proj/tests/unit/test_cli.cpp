#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "herman/cli.hpp"
#include "herman/errors.hpp"

using namespace herman;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exact on a single configuration") {
  const auto r = run({"exact", "--config", "N=9;gaps=3,3,3"});
  CHECK(r.code == kExitPass);
  CHECK(r.out.find("\"expected_time_num\":\"12\"") != std::string::npos);
}

TEST_CASE("sweep prints rows and a verdict") {
  const auto r = run({"--output-format", "csv", "exact", "--sweep", "9"});
  CHECK(r.code == kExitPass);
  CHECK(r.out.rfind("N,K,gaps,", 0) == 0);
  CHECK(r.out.find("# verdict PASS") != std::string::npos);
  CHECK(r.out.find("3,3,3") != std::string::npos);
}

TEST_CASE("simulate is deterministic and thread-count independent") {
  const auto a = run({"--threads", "1", "simulate", "--config", "N=9;tokens=1,4,7", "--runs", "2000", "--seed", "5"});
  const auto b = run({"--threads", "2", "simulate", "--config", "N=9;tokens=1,4,7", "--runs", "2000", "--seed", "5"});
  CHECK(a.code == kExitPass);
  CHECK(a.out == b.out);
  CHECK(a.out.find("\"kind\":\"sim_stats\"") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run({"simulate", "--config", "N=6;tokens=1,2", "--runs", "10"}).code == kExitUsage);
  CHECK(run({"simulate", "--config", "N=9;tokens=1,4,7", "--runs", "0"}).code == kExitUsage);
  CHECK(run({"optimize", "--target", "g", "--k", "5"}).code == kExitUsage);
  CHECK(run({"exact", "--config", "N=15;gaps=5,5,5"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"--output-format", "xml", "exact", "--sweep", "5"}).code == kExitUsage);
}

TEST_CASE("help exits 0") { CHECK(run({"--help"}).code == kExitPass); }

TEST_CASE("settings file parsing") {
  RunConfig cfg;
  std::istringstream in("# comment\nseed = 9\nmc_runs=50\n\noutput_format=csv\n");
  load_settings(in, cfg);
  CHECK(cfg.seed == 9);
  CHECK(cfg.mc_runs == 50);
  CHECK(cfg.output_format == "csv");
  std::istringstream bad("colour=blue\n");
  CHECK_THROWS_AS(load_settings(bad, cfg), InvalidArgument);
  std::istringstream badval("seed=abc\n");
  CHECK_THROWS_AS(load_settings(badval, cfg), InvalidArgument);
}

TEST_CASE("flags override the settings file") {
  const std::string path = "herman_lab_test_settings.txt";
  {
    std::ofstream f(path);
    f << "seed=5\nmc_runs=2000\n";
  }
  const auto from_file = run({"--settings", path, "simulate", "--config", "N=9;tokens=1,4,7"});
  const auto from_flags = run({"simulate", "--config", "N=9;tokens=1,4,7", "--runs", "2000", "--seed", "5"});
  const auto overridden =
      run({"--settings", path, "simulate", "--config", "N=9;tokens=1,4,7", "--seed", "6"});
  CHECK(from_file.code == kExitPass);
  CHECK(from_file.out == from_flags.out);
  CHECK(overridden.out != from_file.out);
  {
    std::ofstream f(path);
    f << "colour=blue\n";
  }
  CHECK(run({"--settings", path, "exact", "--sweep", "5"}).code == kExitUsage);
  std::remove(path.c_str());
}

TEST_CASE("malformed HERMAN_LAB_THREADS is a usage error") {
  setenv("HERMAN_LAB_THREADS", "many", 1);
  const int code = run({"exact", "--sweep", "5"}).code;
  unsetenv("HERMAN_LAB_THREADS");
  CHECK(code == kExitUsage);
}

TEST_CASE("verify identities passes on small K") {
  const auto r = run({"verify", "identities", "--max-k", "7"});
  CHECK(r.code == kExitPass);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

}
