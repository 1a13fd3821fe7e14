#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args, const std::string& env = "") {
  std::string file = std::string(HISTRIO_TEST_TMP) + "/cli_out.json";
  std::string cmd = env + " " + HISTRIO_CLI + " " + args + " > " + file + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

nlohmann::json parse(const Run& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST_CASE("laws scenario lists every suite and passes") {
  Run r = cli("--scenario laws --samples 200 --no-meta");
  REQUIRE(r.code == 0);
  auto j = parse(r);
  CHECK(j["verdict"] == "pass");
  CHECK(j["stats"]["suites"].size() >= 6);
  for (const char* key : {"version", "config", "verdict", "interleavings", "violations", "stats"}) CHECK(j.contains(key));
  CHECK_FALSE(j.contains("meta"));
}

TEST_CASE("exhaustive producer-consumer reports an exact count") {
  Run r = cli("--scenario producer-consumer --mode exhaustive --threads 2 --ops-per-thread 2 --no-meta");
  REQUIRE(r.code == 0);
  auto j = parse(r);
  CHECK(j["interleavings"].is_number_unsigned());
  CHECK(j["interleavings"].get<std::uint64_t>() > 0);
  CHECK(j["inconclusive_count"].is_number_unsigned());
}

TEST_CASE("unknown scenario is a usage error") {
  CHECK(cli("--scenario nosuch").code == 2);
  CHECK(cli("--scenario treiber --mode sideways").code == 2);
  CHECK(cli("").code == 2);
}

TEST_CASE("random mode needs a seed, from the flag or the environment") {
  CHECK(cli("--scenario treiber --mode random", "env -u HISTRIO_SEED").code == 2);
  Run r = cli("--scenario treiber --mode random --no-meta", "HISTRIO_SEED=11");
  CHECK(r.code == 0);
  CHECK(parse(r)["config"]["seed"] == 11);
}

TEST_CASE("identical configs give byte-identical reports") {
  Run a = cli("--scenario treiber --mode random --seed 4 --runs 5 --no-meta");
  Run b = cli("--scenario treiber --mode random --seed 4 --runs 5 --no-meta");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  Run c = cli("--scenario pair-snapshot --no-meta");
  Run d = cli("--scenario pair-snapshot --no-meta");
  CHECK(c.out == d.out);
}

TEST_CASE("budget exhaustion without violations exits 3") {
  Run r = cli("--scenario treiber --step-bound 2 --no-meta");
  CHECK(r.code == 3);
  CHECK(parse(r)["verdict"] == "inconclusive");
}

TEST_CASE("a violation exits 1 and replays deterministically") {
  std::string report = std::string(HISTRIO_TEST_TMP) + "/racy.json";
  Run r = cli("--scenario racy-snapshot --no-meta --emit-trace --output " + report);
  REQUIRE(r.code == 1);
  std::ifstream in(report);
  auto j = nlohmann::json::parse(in);
  REQUIRE(!j["violations"].empty());
  auto v = j["violations"][0];
  CHECK(v["check"] == "spec-post:readPair");
  CHECK(v.contains("trace-ref"));
  CHECK(!v["schedule"].empty());
  std::ifstream traces(report + ".traces.json");
  CHECK(nlohmann::json::parse(traces).size() == j["violations"].size());

  Run replay = cli("--replay " + report + " --no-meta");
  REQUIRE(replay.code == 1);
  auto rj = parse(replay);
  CHECK(rj["violations"][0]["check"] == v["check"]);
  CHECK(rj["violations"][0]["step"] == v["step"]);
  CHECK(rj["violations"][0]["schedule"] == v["schedule"]);
}

TEST_CASE("native mode") {
  Run r = cli("--scenario treiber --mode native --threads 2 --ops-per-thread 200 --seed 3 --no-meta");
  CHECK(r.code == 0);
  CHECK(cli("--scenario pair-snapshot --mode native --seed 3").code == 2);
}
