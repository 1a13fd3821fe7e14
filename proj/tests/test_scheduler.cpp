#include "doctest.h"

#include "histrio/scenarios.hpp"
#include "histrio/specs.hpp"
#include "histrio/structures/private_heap.hpp"
#include "histrio/structures/treiber.hpp"

using namespace histrio;
using namespace histrio::prog;

namespace {

ExplorationReport run(const Scenario& s, std::size_t bound = 40) {
  ExploreOptions o;
  o.step_bound = bound;
  return explore(s, o);
}

std::string first_check(const ExplorationReport& r) { return r.violations.empty() ? "" : r.violations.front().check; }

Scenario treiber_single(Prog p) {
  TreiberStack tr = make_treiber();
  Scenario s;
  s.name = "unit";
  s.concurroid = tr.entangled;
  s.init = tr.initial({Value::nat(1)}, Loc{200});
  s.program = std::move(p);
  return s;
}

}  // namespace

TEST_CASE("interleaving counts are multinomial on straight-line scenarios") {
  CHECK(run(straight_line_scenario({1, 3, 1})).complete == 1);
  CHECK(run(straight_line_scenario({2, 1, 1})).complete == 2);
  CHECK(run(straight_line_scenario({2, 2, 1})).complete == 6);
  CHECK(run(straight_line_scenario({3, 2, 1})).complete == 90);
  CHECK(run(straight_line_scenario({4, 3, 1})).complete == BigCount(369600));
  auto r = run(straight_line_scenario({2, 2, 1}));
  CHECK(r.verdict() == "pass");
  CHECK(r.inconclusive == 0);
  CHECK(r.violations.empty());
}

TEST_CASE("exceeding the step bound is inconclusive, never pass") {
  auto r = run(straight_line_scenario({2, 2, 1}), 3);
  CHECK(r.complete == 0);
  CHECK(r.inconclusive == 6);
  CHECK(r.verdict() == "inconclusive");
}

TEST_CASE("a loop with bound zero is cut") {
  auto s = treiber_single(loop(ret_value(Value::none()), 0));
  CHECK(run(s).verdict() == "inconclusive");
  auto spin = treiber_single(loop(seq(act(make_treiber().read_sentinel), ret_value(Value::none())), 3));
  auto r = run(spin);
  CHECK(r.verdict() == "inconclusive");
  CHECK(r.inconclusive == 1);
}

TEST_CASE("random runs are deterministic per seed") {
  Scenario s = producer_consumer_scenario({2, 2, 6});
  Trace a = run_random(s, 42, 200);
  Trace b = run_random(s, 42, 200);
  CHECK(a.schedule == b.schedule);
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    CHECK(a.events[i].step == b.events[i].step);
    CHECK(a.events[i].thread == b.events[i].thread);
    CHECK(a.events[i].action == b.events[i].action);
    CHECK(a.events[i].result == b.events[i].result);
    CHECK(a.events[i].delta == b.events[i].delta);
  }
  CHECK(a.verdict == b.verdict);
  for (std::size_t i = 1; i < a.events.size(); ++i) CHECK(a.events[i].step > a.events[i - 1].step);
}

TEST_CASE("different seeds may interleave differently but agree on the verdict") {
  Scenario s = producer_consumer_scenario({2, 2, 20});
  std::set<std::vector<int>> schedules;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Trace t = run_random(s, seed, 400);
    CHECK(t.verdict == "pass");
    schedules.insert(t.schedule);
  }
  CHECK(schedules.size() > 1);
}

TEST_CASE("budget zero gives an empty inconclusive trace") {
  Trace t = run_random(treiber_scenario({3, 1, 3}), 7, 0);
  CHECK(t.events.empty());
  CHECK(t.verdict == "inconclusive");
}

TEST_CASE("replaying a random schedule reproduces the trace") {
  Scenario s = treiber_scenario({3, 1, 3});
  Trace a = run_random(s, 9, 100);
  Trace b = run_schedule(s, a.schedule);
  CHECK(b.verdict == a.verdict);
  CHECK(b.events.size() == a.events.size());
  CHECK(b.final_heap == a.final_heap);
  Trace c = run_schedule(s, {7});
  REQUIRE(c.violation);
  CHECK(c.violation->check == "schedule");
}

TEST_CASE("inject restricts the labels a body may touch") {
  auto bad = treiber_single(inject({labels::tb}, alloc()));
  auto r = run(bad);
  CHECK(r.verdict() == "violation");
  CHECK(first_check(r) == "inject-frame");

  auto ok = treiber_single(inject({labels::pv}, alloc()));
  CHECK(run(ok).verdict() == "pass");
  auto sentinel = treiber_single(inject({labels::tb}, act(make_treiber().read_sentinel)));
  Trace t = run_schedule(sentinel, {0});
  CHECK(t.verdict == "pass");
  CHECK(self_heap(t.final_view, labels::pv).empty());

  auto pure = treiber_single(inject({labels::tb}, ret_value(Value::nat(4))));
  Trace u = run_schedule(pure, {});
  CHECK(u.verdict == "pass");
  CHECK(u.final_view == pure.init);
  CHECK(u.result == Value::nat(4));
}

TEST_CASE("a par split must decompose self") {
  Scenario s = straight_line_scenario({2, 1, 1});
  s.program = par(write(lit(Value::loc(Loc{20})), lit(Value::nat(1))), ret_unit(),
                  [](const PcmMap& self, const Env&) { return std::pair{self, self}; });
  auto r = run(s);
  CHECK(first_check(r) == "fork");
}

TEST_CASE("degenerate split behaves as the frame rule") {
  Scenario s = straight_line_scenario({2, 1, 1});
  Loc a{20}, b{21};
  s.program = par(seq(write(lit(Value::loc(a)), lit(Value::nat(5))), write(lit(Value::loc(b)), lit(Value::nat(6)))),
                  ret_unit(), split_all_left());
  s.final_check = nullptr;
  auto r = run(s);
  CHECK(r.verdict() == "pass");
  CHECK(r.complete == 1);

  s.program = par(ret_unit(), write(lit(Value::loc(a)), lit(Value::nat(5))), split_all_left());
  CHECK(first_check(run(s)) == "safety");
}

TEST_CASE("actions on labels outside the thread's view are rejected") {
  Scenario s = straight_line_scenario({1, 1, 1});
  s.program = act(make_treiber().read_sentinel);
  s.final_check = nullptr;
  CHECK(first_check(run(s)) == "label-scope");
}

TEST_CASE("hide around return leaves the state unchanged") {
  TreiberStack tr = make_treiber();
  std::vector<Value> l{Value::nat(1)};
  Heap stack = joint_of(tr.initial(l, Loc{200}), labels::tb).heap;
  Scenario s;
  s.name = "hide-return";
  s.concurroid = private_heap().concurroid;
  s.init = private_state(stack);
  PhiPtr phi = hidden_stack(tr, l);
  std::optional<PcmElement> seen;
  s.program = hide(phi, tr.entangled, ret_unit(), [&seen](const PcmElement& g, const Heap&) -> Failure {
    seen = g;
    return std::nullopt;
  });
  Trace t = run_schedule(s, {});
  CHECK(t.verdict == "pass");
  CHECK(t.final_view == s.init);
  REQUIRE(seen);
  CHECK(*seen == phi->g0);
}

TEST_CASE("hide entry requires the erasure of g0 in the private heap") {
  TreiberStack tr = make_treiber();
  Scenario s;
  s.name = "hide-missing";
  s.concurroid = private_heap().concurroid;
  s.init = private_state({});
  s.program = hide(hidden_stack(tr, {}), tr.entangled, ret_unit());
  CHECK(first_check(run(s)) == "hide-entry");
}

TEST_CASE("sequential recovery recovers the exact history") {
  Scenario s = seq_recovery_scenario({1, 2, 3});
  auto r = run(s);
  CHECK(r.verdict() == "pass");
  CHECK(r.complete == 1);
  Trace t = run_schedule(s, std::vector<int>(5, 0));
  CHECK(t.verdict == "pass");
  auto got = read_stack(self_heap(t.final_view, labels::pv), make_treiber().snt);
  REQUIRE(got);
  CHECK(*got == std::vector<Value>{pushed_element(0, 8), Value::nat(1), Value::nat(2)});
}

TEST_CASE("a wrong recovery check is reported at hide exit") {
  Scenario s = seq_recovery_scenario({1, 1, 3});
  TreiberStack tr = make_treiber();
  std::vector<Value> l{Value::nat(1)};
  s.program = hide(hidden_stack(tr, l), tr.entangled, tr.push(lit(Value::nat(5)), 3),
                   [](const PcmElement& g, const Heap&) -> Failure {
                     if (g.history().size() != 1) return std::string("history grew");
                     return std::nullopt;
                   });
  s.final_check = nullptr;
  CHECK(first_check(run(s)) == "hide-check");
}

TEST_CASE("subjective accounting holds across every fork and join") {
  for (const auto& name : {"pair-snapshot", "treiber", "producer-consumer", "straight-line"}) {
    auto s = make_scenario(name, default_config(name));
    REQUIRE(s);
    auto r = run(*s, default_step_bound(name));
    INFO(name);
    CHECK(r.violations.empty());
    CHECK(r.complete > 0);
  }
}

TEST_CASE("erasure commutes with scheduling on random schedules") {
  for (const auto& name : scenario_names()) {
    if (std::string(name) == "racy-snapshot") continue;
    auto s = make_scenario(name, default_config(name));
    REQUIRE(s);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Trace t = run_random(*s, seed, 200);
      auto cmp = compare_erasure(*s, t.schedule);
      INFO(name << " seed " << seed << ": " << cmp.detail);
      CHECK(cmp.same);
    }
  }
}

TEST_CASE("exhaustive reports are reproducible") {
  Scenario s = treiber_scenario({3, 1, 3});
  auto a = run(s), b = run(s);
  CHECK(a.complete == b.complete);
  CHECK(a.inconclusive == b.inconclusive);
  CHECK(a.final_states == b.final_states);
}
