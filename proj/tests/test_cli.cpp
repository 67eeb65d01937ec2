#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
// End-to-end tests that shell out to the CLI binary. Each case works in its
// own subdirectory of the test working directory so reruns are hermetic.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const std::string cli = NDR_CLI_PATH;
const std::string fixtures = FIXTURES_DIR;

int run(const std::string& args) {
  const int status = std::system((cli + " " + args).c_str());
#if defined(_WIN32)
  return status;
#else
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#endif
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::path("cli_cases") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("simulate writes trace, summary and effective config") {
  const fs::path dir = fresh_dir("simulate");
  const int rc = run("simulate --config " + fixtures + "/configs/simulate_eta0.json --out " +
                     (dir / "out").string() + " > " + (dir / "stdout.txt").string());
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "out" / "trace.tsv"));
  CHECK(fs::exists(dir / "out" / "summary.csv"));
  CHECK(fs::exists(dir / "out" / "effective_config.json"));
  const std::string summary = slurp(dir / "out" / "summary.csv");
  // Zero noise: not a single mistaken claim.
  CHECK(contains(summary, "mistaken_claims,0\n"));
  CHECK(contains(summary, "mistake_rate,0\n"));
  const std::string trace = slurp(dir / "out" / "trace.tsv");
  CHECK(contains(trace, "replica\tsequence\titeration\tkind"));
  CHECK(contains(trace, "claim_added"));
  CHECK(contains(slurp(dir / "stdout.txt"), "simulate:"));
}

TEST_CASE("a rerun with identical inputs is byte-identical") {
  const fs::path dir = fresh_dir("rerun");
  const std::string cmd = "simulate --config " + fixtures + "/configs/simulate_eta0.json --out " +
                          (dir / "out").string() + " > /dev/null";
  REQUIRE(run(cmd) == 0);
  const std::string trace1 = slurp(dir / "out" / "trace.tsv");
  const std::string summary1 = slurp(dir / "out" / "summary.csv");
  const std::string config1 = slurp(dir / "out" / "effective_config.json");
  REQUIRE(run(cmd) == 0);
  CHECK(slurp(dir / "out" / "trace.tsv") == trace1);
  CHECK(slurp(dir / "out" / "summary.csv") == summary1);
  CHECK(slurp(dir / "out" / "effective_config.json") == config1);
}

TEST_CASE("the effective config reproduces the run it describes") {
  const fs::path dir = fresh_dir("roundtrip");
  REQUIRE(run("estimate --config " + fixtures + "/configs/estimate_uniform.json --out " +
              (dir / "a").string() + " > /dev/null") == 0);
  REQUIRE(run("estimate --config " + (dir / "a" / "effective_config.json").string() + " --out " +
              (dir / "b").string() + " > /dev/null") == 0);
  for (const char* name :
       {"est_0_pk.csv", "est_1_answer.csv", "est_2_claims.csv", "exact_0_pk.csv",
        "exact_1_answer.csv", "exact_2_claims.csv"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir / "a" / name));
    REQUIRE(fs::exists(dir / "b" / name));
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }
}

TEST_CASE("the seed flag overrides the config seed") {
  const fs::path dir = fresh_dir("seedflag");
  REQUIRE(run("simulate --config " + fixtures + "/configs/simulate_eta0.json --seed 8 --out " +
              (dir / "out").string() + " > /dev/null") == 0);
  const std::string cfg = slurp(dir / "out" / "effective_config.json");
  CHECK(contains(cfg, "\"seed\": 8"));
}

TEST_CASE("thread count never changes estimates") {
  const fs::path dir = fresh_dir("threads");
  REQUIRE(run("estimate --config " + fixtures + "/configs/estimate_uniform.json --out " +
              (dir / "t1").string() + " > /dev/null") == 0);
  const int rc = std::system(("NDR_THREADS=4 " + cli + " estimate --config " + fixtures +
                              "/configs/estimate_uniform.json --out " + (dir / "t4").string() +
                              " > /dev/null")
                                 .c_str());
  REQUIRE(rc == 0);
  for (const char* name : {"est_0_pk.csv", "est_1_answer.csv", "est_2_claims.csv"}) {
    CAPTURE(name);
    CHECK(slurp(dir / "t1" / name) == slurp(dir / "t4" / name));
  }
}

TEST_CASE("identity theorem suites pass and write a report") {
  const fs::path dir = fresh_dir("check");
  const int rc = run("check --config " + fixtures + "/configs/check_suites.json --out " +
                     (dir / "out").string() + " > " + (dir / "stdout.txt").string());
  CHECK(rc == 0);
  const std::string report = slurp(dir / "out" / "check_report.txt");
  CHECK(contains(report, "abduction suite:"));
  CHECK(contains(report, "proofpath suite:"));
  CHECK(contains(report, "status: pass"));
  CHECK(slurp(dir / "stdout.txt") == report);
}

TEST_CASE("joint-file checks report both inference directions") {
  const fs::path dir = fresh_dir("joint");
  const int rc = run("check --config " + fixtures + "/configs/check_joint.json --out " +
                     (dir / "out").string() + " > /dev/null");
  CHECK(rc == 0);
  const std::string report = slurp(dir / "out" / "check_report.txt");
  CHECK(contains(report, "joint file:"));
  CHECK(contains(report, "0.8"));
  CHECK(contains(report, "product identity error:"));
  CHECK(contains(report, "status: pass"));
}

TEST_CASE("nonzero exits distinguish failures from crashes") {
  const fs::path dir = fresh_dir("exits");
  // A question the policy never asks: typed library error, exit 2.
  CHECK(run("estimate --config " + fixtures + "/configs/estimate_unanswerable.json --out " +
            (dir / "a").string() + " 2> /dev/null") == 2);
  // A joint whose weights do not sum to one: typed library error, exit 2.
  CHECK(run("check --config " + fixtures + "/configs/check_corrupted.json --out " +
            (dir / "b").string() + " 2> /dev/null") == 2);
  // A failed property check: exit 1.
  CHECK(run("ptm --machine " + fixtures + "/machines/not_prefix_free.tm"
            " --action check-prefix-free --max-len 3 > /dev/null") == 1);
  // Coin-flip prior over a non-prefix-free machine: typed error, exit 2.
  CHECK(run("ptm --machine " + fixtures + "/machines/not_prefix_free.tm"
            " --action coinflip --max-len 3 2> /dev/null") == 2);
  // Missing config file: exit 2.
  CHECK(run("simulate --config no_such_file.json 2> /dev/null") == 2);
  // Unknown subcommand: a parse error from the option layer, nonzero.
  CHECK(run("frobnicate 2> /dev/null") != 0);
}

TEST_CASE("graph rebuilds tape transitions including deletions") {
  const fs::path dir = fresh_dir("graph");
  REQUIRE(run("simulate --config " + fixtures + "/configs/simulate_removal.json --out " +
              (dir / "out").string() + " > /dev/null") == 0);
  const int rc = run("graph --trace " + (dir / "out" / "trace.tsv").string() + " --out " +
                     (dir / "g").string() + " > /dev/null");
  CHECK(rc == 0);
  const std::string graph = slurp(dir / "g" / "graph.tsv");
  CHECK(contains(graph, "from\tto\tkind\tcount\tprobability"));
  CHECK(contains(graph, "\tappend\t"));
  // Removal rate one half over many traced replicas: deletions are observed.
  CHECK(contains(graph, "\tdelete\t"));
}

TEST_CASE("ptm subcommand runs machines and computes coin-flip priors") {
  const fs::path dir = fresh_dir("ptm");
  REQUIRE(run("ptm --machine " + fixtures + "/machines/identity.tm"
              " --action run --input 101 > " + (dir / "run.txt").string()) == 0);
  CHECK(contains(slurp(dir / "run.txt"), "halted output 101 steps 1"));

  REQUIRE(run("ptm --machine " + fixtures + "/machines/halt_three.tm"
              " --action coinflip --max-len 4 > " + (dir / "coin.txt").string()) == 0);
  const std::string coin = slurp(dir / "coin.txt");
  CHECK(contains(coin, "omega 1"));
  CHECK(contains(coin, "0 0.5"));
  CHECK(contains(coin, "10 0.25"));
  CHECK(contains(coin, "11 0.25"));

  REQUIRE(run("ptm --machine " + fixtures + "/machines/halt_three.tm"
              " --action halting-set --max-len 4 --out " + (dir / "hs").string() +
              " > /dev/null") == 0);
  const std::string hs = slurp(dir / "hs" / "ptm_halting-set.txt");
  CHECK(contains(hs, "0\n"));
  CHECK(contains(hs, "10\n"));
  CHECK(contains(hs, "11\n"));
}

TEST_CASE("mmh builds measures with restriction and statistics") {
  const fs::path dir = fresh_dir("mmh");
  const int rc = run("mmh --config " + fixtures + "/configs/mmh_measure_coinflip.json --out " +
                     (dir / "out").string() + " > /dev/null");
  CHECK(rc == 0);
  REQUIRE(fs::exists(dir / "out" / "measure.txt"));
  REQUIRE(fs::exists(dir / "out" / "mmh_stats.txt"));
  const std::string stats = slurp(dir / "out" / "mmh_stats.txt");
  CHECK(contains(stats, "mistake_free_mass"));
  CHECK(contains(stats, "0.75"));
  CHECK(contains(stats, "1.5"));  // entropy in bits

  // The explicit-weights fixture also restricts to the mistake-free slice.
  REQUIRE(run("mmh --config " + fixtures + "/configs/mmh_measure_explicit.json --out " +
              (dir / "ex").string() + " > /dev/null") == 0);
  REQUIRE(fs::exists(dir / "ex" / "measure_restricted.txt"));
  const std::string restricted = slurp(dir / "ex" / "measure_restricted.txt");
  CHECK(contains(restricted, "SYNTHU"));
  CHECK(contains(restricted, " 1 "));  // the surviving instance carries all the mass
}

TEST_CASE("a custom system file loads relative to the config") {
  const fs::path dir = fresh_dir("customsys");
  const int rc = run("simulate --config " + fixtures + "/configs/simulate_custom.json --out " +
                     (dir / "out").string() + " > /dev/null");
  CHECK(rc == 0);
  const std::string summary = slurp(dir / "out" / "summary.csv");
  CHECK(contains(summary, "mistaken_claims,0\n"));
}

TEST_CASE("the format flag switches between csv and plain text") {
  const fs::path dir = fresh_dir("format");
  REQUIRE(run("simulate --config " + fixtures + "/configs/simulate_eta0.json --format text --out " +
              (dir / "out").string() + " > /dev/null") == 0);
  CHECK(fs::exists(dir / "out" / "summary.txt"));
  CHECK_FALSE(fs::exists(dir / "out" / "summary.csv"));
  CHECK(contains(slurp(dir / "out" / "summary.txt"), "mistake_rate: "));
}
