#include "doctest.h"

#include "histrio/scenarios.hpp"
#include "histrio/specs.hpp"
#include "histrio/structures/private_heap.hpp"

using namespace histrio;
using namespace histrio::prog;

namespace {

ExplorationReport run(const Scenario& s, std::size_t bound = 40) {
  ExploreOptions o;
  o.step_bound = bound;
  return explore(s, o);
}

Value L(std::vector<std::uint64_t> xs) {
  std::vector<Value> v;
  for (auto x : xs) v.push_back(Value::nat(x));
  return Value::list(v);
}

State tb_self(std::map<Timestamp, Entry> e) {
  State w;
  w.self[labels::tb] = PcmElement(make_history(HistKind::Stack, std::move(e)));
  w.other[labels::tb] = PcmElement(make_history(HistKind::Stack));
  w.joint[labels::tb] = Joint{};
  return w;
}

}  // namespace

TEST_CASE("readPair spec holds on every explored pair-snapshot run") {
  auto r = run(pair_snapshot_scenario({3, 2, 3}));
  CHECK(r.verdict() == "pass");
  CHECK(r.complete > 0);
}

TEST_CASE("an unvalidated readPair is caught with a minimal counterexample") {
  auto r = run(racy_snapshot_scenario({3, 2, 3}));
  REQUIRE(r.verdict() == "violation");
  const Violation& v = r.violations.front();
  CHECK(v.check == "spec-post:readPair");
  Trace t = run_schedule(racy_snapshot_scenario({3, 2, 3}), v.schedule);
  REQUIRE(t.violation);
  CHECK(t.violation->check == v.check);
  CHECK(t.violation->step == v.step);
}

TEST_CASE("snapshot validity oracle") {
  Scenario s = pair_snapshot_scenario({3, 2, 3});
  int complete = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Trace t = run_random(s, seed, 100);
    if (t.verdict != "pass") continue;
    ++complete;
    CHECK_FALSE(oracle_snapshot_validity(t));
    auto chi = total_history(t.final_view, labels::sp);
    REQUIRE(chi);
    for (const auto& ret : t.returns) {
      if (ret.method == "readPair") CHECK_FALSE(check_read_pair_monolithic(*chi, ret.result));
    }
  }
  CHECK(complete > 0);

  Trace t = run_random(s, 1, 100);
  REQUIRE(t.verdict == "pass");
  for (auto& ret : t.returns) {
    if (ret.method == "readPair") ret.result = Value::pair(Value::nat(99), Value::nat(98));
  }
  CHECK(oracle_snapshot_validity(t));

  Trace solo = run_random(pair_snapshot_scenario({2, 0, 3}), 3, 100);
  REQUIRE(solo.verdict == "pass");
  CHECK_FALSE(oracle_snapshot_validity(solo));
}

TEST_CASE("framed readPair and push keep their framed posts") {
  Scenario s = pair_snapshot_scenario({2, 2, 3});
  std::swap(s.init.self[labels::sp], s.init.other[labels::sp]);
  auto r = run(s);
  CHECK(r.verdict() == "pass");

  Scenario t = treiber_scenario({3, 1, 3});
  std::swap(t.init.self[labels::tb], t.init.other[labels::tb]);
  auto rt = run(t);
  CHECK(rt.verdict() == "pass");
}

TEST_CASE("push post is the exact singleton; a wrong spec is rejected") {
  CHECK(run(treiber_scenario({3, 1, 3})).verdict() == "pass");
  TreiberStack tr = make_treiber();
  Scenario s = treiber_scenario({2, 1, 3});
  s.program = spec(spec_push(), args({lit(Value::nat(7))}), tr.push(lit(Value::nat(8)), 3));
  s.final_check = nullptr;
  auto r = run(s);
  REQUIRE(r.verdict() == "violation");
  CHECK(r.violations.front().check == "spec-post:push");
}

TEST_CASE("pop on a never-pushed stack returns None with nil at stamp 0") {
  TreiberStack tr = make_treiber();
  Scenario s = treiber_scenario({2, 1, 3});
  s.program = spec(spec_pop(), no_args(), inject({labels::tb}, tr.pop(3)));
  s.final_check = nullptr;
  Trace t = run_schedule(s, {0});
  CHECK(t.verdict == "pass");
  CHECK(t.result.is_none());
}

TEST_CASE("pop spec rejects a None that never saw an empty stack") {
  TreiberStack tr = make_treiber();
  Scenario s = treiber_scenario({2, 1, 3});
  s.init = tr.initial({Value::nat(1)}, Loc{200});
  s.program = spec(spec_pop(), no_args(), seq(act(tr.read_sentinel), ret_value(Value::none())));
  s.final_check = nullptr;
  auto r = run(s);
  REQUIRE(r.verdict() == "violation");
  CHECK(r.violations.front().check == "spec-post:pop");
}

TEST_CASE("producer/consumer exchange") {
  auto two = run(producer_consumer_scenario({2, 2, 3}), 60);
  CHECK(two.verdict() == "pass");
  CHECK(two.violations.empty());
  auto none = run(producer_consumer_scenario({2, 0, 3}), 60);
  CHECK(none.verdict() == "pass");
  CHECK(none.complete == 1);
}

TEST_CASE("exchange oracle") {
  Heap h{{Loc{20}, Value::nat(1)}, {Loc{21}, Value::nat(2)}, {Loc{30}, Value::nat(2)}, {Loc{31}, Value::nat(1)}};
  CHECK_FALSE(oracle_exchange(h, Loc{20}, Loc{30}, 2));
  h[Loc{31}] = Value::nat(2);
  CHECK(oracle_exchange(h, Loc{20}, Loc{30}, 2));
  CHECK_FALSE(oracle_exchange({}, Loc{20}, Loc{30}, 0));
}

TEST_CASE("join check on producer and consumer histories") {
  auto check = lemma_join_check();
  State prod = tb_self({{0, {L({}), L({})}}, {1, {L({}), L({1})}}});
  State cons = tb_self({{2, {L({1}), L({})}}});
  CHECK_FALSE(check(prod, cons, Value::unit(), Value::unit()));
  State broken = tb_self({{2, {L({}), L({1, 2})}}});
  CHECK(check(prod, broken, Value::unit(), Value::unit()));
}

TEST_CASE("flatCombine single-threaded produces the unique singleton") {
  Scenario s = flat_combiner_scenario({1, 1, 3});
  auto r = run(s);
  CHECK(r.verdict() == "pass");
  CHECK(r.complete == 1);
  Trace t = run_random(s, 0, 100);
  REQUIRE(t.verdict == "pass");
  FlatCombiner fc = make_flat_combiner(1);
  auto v = fc.inspect(t.final_view);
  REQUIRE(v);
  Value e = pushed_element(0, 0);
  CHECK(v->self_aux == make_history(HistKind::Stack, {{1, Entry{L({}), Value::list({e})}}}));
}

TEST_CASE("flatCombine with helping") {
  Scenario s = flat_combiner_scenario({2, 1, 3});
  auto r = run(s);
  CHECK(r.verdict() == "pass");
  bool helped = false;
  for (std::uint64_t seed = 0; seed < 60 && !helped; ++seed) {
    Trace t = run_random(s, seed, 200);
    CHECK(t.verdict != "violation");
    std::set<int> helpers;
    int helps = 0;
    for (const auto& e : t.events) {
      if (e.action == "doHelp") {
        helpers.insert(e.thread);
        ++helps;
      }
    }
    helped = t.verdict == "pass" && helps == 2 && helpers.size() == 1;
  }
  CHECK(helped);
}

TEST_CASE("tryCollect before help returns None and leaves the state unchanged") {
  FlatCombiner fc = make_flat_combiner(2);
  State w = fc.initial({}, Loc{200});
  Allocator alloc;
  auto req = run_atomic(*fc.req_help, w, {Value::nat(0), Value::req("push", Value::nat(5))}, alloc);
  auto col = run_atomic(*fc.try_collect, req.post, {Value::nat(0)}, alloc);
  CHECK(col.result.is_none());
  CHECK(col.post == req.post);
}

TEST_CASE("flatCombine spec rejects a push checked against the pop f_spec") {
  FlatCombiner fc = make_flat_combiner(1);
  Scenario s = flat_combiner_scenario({1, 1, 3});
  s.program = spec(spec_flat_combine(fc, 0, "pop"), args({lit(Value::nat(4))}), fc.flat_combine(0, "push", lit(Value::nat(4)), 3));
  s.final_check = nullptr;
  auto r = run(s);
  REQUIRE(r.verdict() == "violation");
  CHECK(r.violations.front().check == "spec-post:flatCombine(pop)");
}

TEST_CASE("flatCombine precondition requires the caller's slot") {
  FlatCombiner fc = make_flat_combiner(2);
  Scenario s = flat_combiner_scenario({2, 1, 3});
  s.program = par(spec(spec_flat_combine(fc, 1, "push"), args({lit(Value::nat(4))}), ret_unit()), ret_unit(),
                  [](const PcmMap& self, const Env&) {
                    PcmMap a = unit_map(self), b = self;
                    const Triple& t = self.at(labels::fc).triple();
                    a[labels::fc] = PcmElement(IdSet{0}, Mutex::NotOwn, unit_of(*t.aux));
                    b[labels::fc] = PcmElement(IdSet{1}, t.mutex, *t.aux);
                    return std::pair{a, b};
                  });
  s.final_check = nullptr;
  auto r = run(s);
  REQUIRE(r.verdict() == "violation");
  CHECK(r.violations.front().check == "spec-pre:flatCombine(push)");
}
