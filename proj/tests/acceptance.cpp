#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "histrio/scenarios.hpp"
#include "histrio/scheduler.hpp"
#include "histrio/structures/native_treiber.hpp"
#include "histrio/suites.hpp"

using namespace histrio;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

ExplorationReport exhaustive(const std::string& name, ScenarioConfig c, std::size_t step_bound) {
  ExploreOptions o;
  o.step_bound = step_bound;
  return explore(*make_scenario(name, c), o);
}

void require_pass(Outcome& out, const std::string& name, const ExplorationReport& r) {
  out.require(r.violations.empty(), name + ": " + (r.violations.empty() ? "" : render(r.violations.front())));
  out.require(r.complete > 0, name + ": no completed interleaving");
  out.detail = out.ok ? name + " complete=" + r.complete.str() + " inconclusive=" + r.inconclusive.str() : out.detail;
}

Outcome laws() {
  Outcome out;
  for (const auto& r : run_law_suites(1, 1000)) out.require(r.ok(), "law violation in " + r.instance);
  return out;
}

Outcome pair_snapshot() {
  Outcome out;
  require_pass(out, "pair-snapshot", exhaustive("pair-snapshot", {3, 2, 3}, 40));
  return out;
}

Outcome treiber() {
  Outcome out;
  require_pass(out, "treiber", exhaustive("treiber", {3, 1, 3}, 40));
  return out;
}

Outcome producer_consumer() {
  Outcome out;
  auto r = exhaustive("producer-consumer", {2, 3, 3}, 60);
  require_pass(out, "producer-consumer", r);
  std::string summary = out.detail;
  Scenario s = producer_consumer_scenario({2, 3, 20});
  std::size_t completed = 0;
  for (std::uint64_t seed = 0; seed < 100 && out.ok; ++seed) {
    Trace t = run_random(s, seed, 400);
    out.require(t.verdict != "violation", "seed " + std::to_string(seed) + ": " + (t.violation ? render(*t.violation) : ""));
    if (t.verdict == "pass") ++completed;
  }
  out.require(completed == 100, "only " + std::to_string(completed) + "/100 random runs completed");
  if (out.ok) out.detail = summary + "; random 100/100 pass";
  return out;
}

Outcome flat_combiner() {
  Outcome out;
  require_pass(out, "flat-combiner", exhaustive("flat-combiner", {3, 1, 3}, 40));
  return out;
}

Outcome seq_recovery() {
  Outcome out;
  Scenario s = seq_recovery_scenario({1, 2, 3});
  Trace t = run_schedule(s, std::vector<int>(64, 0));
  out.require(t.verdict == "pass", "seq-recovery: " + (t.violation ? render(*t.violation) : t.verdict));
  require_pass(out, "seq-recovery", explore(s));
  return out;
}

Outcome metatheory() {
  Outcome out;
  for (const auto& r : run_concurroid_suites(1, 500)) out.require(suite_ok(r), r.check + " on " + r.subject);
  for (const auto& a : run_action_suites(1, 500)) {
    for (const auto& p : a.properties) out.require(suite_ok(p), p.check + " on " + a.action);
  }
  return out;
}

Outcome erasure() {
  Outcome out;
  for (const auto& name : scenario_names()) {
    if (name == "racy-snapshot") continue;
    Scenario s = *make_scenario(name, default_config(name));
    for (std::uint64_t seed = 0; seed < 50 && out.ok; ++seed) {
      Trace t = run_random(s, seed, 200);
      auto cmp = compare_erasure(s, t.schedule);
      out.require(cmp.same, name + " seed " + std::to_string(seed) + ": " + cmp.detail);
    }
  }
  return out;
}

Outcome accounting() {
  Outcome out;
  auto two = exhaustive("straight-line", {2, 2, 3}, 40);
  out.require(two.complete == 6 && two.inconclusive == 0, "2x2 gave " + two.complete.str());
  auto three = exhaustive("straight-line", {3, 2, 3}, 40);
  out.require(three.complete == 90, "3x2 gave " + three.complete.str());
  for (const auto& name : scenario_names()) {
    if (name == "racy-snapshot" || name == "flat-combiner") continue;
    auto r = exhaustive(name, default_config(name), default_step_bound(name));
    out.require(r.violations.empty(), name + ": " + (r.violations.empty() ? "" : render(r.violations.front())));
  }
  return out;
}

Outcome native() {
  Outcome out;
  NativeReport r = run_native_treiber(4, 1000, 1);
  out.require(r.ok(), r.ok() ? "" : r.violations.front());
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  std::vector<Criterion> criteria{
      {1, "PCM laws", 5, laws},
      {2, "pair snapshot", 120, pair_snapshot},
      {3, "Treiber stack", 120, treiber},
      {4, "producer/consumer", 180, producer_consumer},
      {5, "flat combiner", 300, flat_combiner},
      {6, "sequential recovery", 1, seq_recovery},
      {7, "metatheory obligations", 60, metatheory},
      {8, "erasure commutation", 60, erasure},
      {9, "accounting and exact counts", 10, accounting},
      {10, "native stress", 30, native},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && secs > c.limit_seconds) {
      o.ok = false;
      o.detail = "took longer than " + std::to_string(static_cast<int>(c.limit_seconds)) + "s";
    }
    if (!o.ok) ++failed;
    std::printf("%s criterion %d: %s (%.2fs)%s%s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.empty() ? "" : " - ", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
