#include "doctest.h"

#include "histrio/scenarios.hpp"
#include "histrio/structures/pair_snapshot.hpp"
#include "histrio/structures/private_heap.hpp"
#include "histrio/structures/spin_lock.hpp"
#include "histrio/structures/treiber.hpp"

using namespace histrio;
using namespace histrio::prog;

namespace {

const Value A = Value::nat(1), B = Value::nat(2), C = Value::nat(3), D = Value::nat(4);

Scenario single(ConcurroidPtr c, State init, Prog p) {
  Scenario s;
  s.name = "example";
  s.concurroid = std::move(c);
  s.init = std::move(init);
  s.program = std::move(p);
  return s;
}

Trace solo(const Scenario& s) {
  ExploreOptions o;
  auto r = explore(s, o);
  REQUIRE(r.complete == 1);
  Trace t = run_random(s, 0, 100);
  REQUIRE(t.verdict == "pass");
  return t;
}

}  // namespace

TEST_CASE("writeX bumps the version and appends a fresh snapshot entry") {
  auto ps = make_pair_snapshot();
  State w = ps.initial(A, C);
  Allocator alloc;
  auto ev = run_atomic(*ps.write_x, w, {B}, alloc);
  CHECK(joint_of(ev.post, labels::sp).heap.at(ps.x) == Value::pair(B, Value::nat(1)));
  const History& mine = self_history(ev.post, labels::sp);
  REQUIRE(mine.size() == 1);
  const auto& [t, e] = *mine.entries.begin();
  CHECK(t == 1);
  CHECK(e.pre == snapshot(A, C, 0));
  CHECK(e.post == snapshot(B, C, 1));

  auto ey = run_atomic(*ps.write_y, ev.post, {D}, alloc);
  const auto& last = self_history(ey.post, labels::sp).entries.rbegin()->second;
  CHECK(last.post == snapshot(B, D, 1));
  CHECK(joint_of(ey.post, labels::sp).heap.at(ps.x) == Value::pair(B, Value::nat(1)));
}

TEST_CASE("readX returns value and version") {
  auto ps = make_pair_snapshot();
  State w = ps.initial(A, C);
  Allocator alloc;
  for (int i = 0; i < 5; ++i) w = run_atomic(*ps.write_x, w, {A}, alloc).post;
  auto ev = run_atomic(*ps.read_x, w, {}, alloc);
  CHECK(ev.result == Value::pair(A, Value::nat(5)));
  CHECK(ev.post == w);
}

TEST_CASE("readPair without interference") {
  auto ps = make_pair_snapshot();
  Trace t = solo(single(ps.concurroid, ps.initial(A, B), ps.read_pair(3)));
  CHECK(t.result == Value::pair(A, B));
}

TEST_CASE("readPair retries past a racing writeX and terminates") {
  auto ps = make_pair_snapshot();
  Scenario s = single(ps.concurroid, ps.initial(A, C), par(ps.read_pair(3), act(ps.write_x, args({lit(B)})), split_all_left()));
  ExploreOptions o;
  auto r = explore(s, o);
  CHECK(r.verdict() == "pass");
  CHECK(r.inconclusive == 0);
  std::set<Value> results;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Trace t = run_random(s, seed, 100);
    REQUIRE(t.verdict == "pass");
    results.insert(t.result.at(0));
  }
  CHECK(results == std::set<Value>{Value::pair(A, C), Value::pair(B, C)});
}

TEST_CASE("sequential push, push, pop is LIFO") {
  auto tr = make_treiber();
  Prog p = seq({tr.push(lit(A), 1), tr.push(lit(B), 1), inject({labels::tb}, tr.pop(1))});
  Trace t = solo(single(tr.entangled, tr.initial({}, Loc{200}), p));
  CHECK(t.result == Value::some(B));
  auto h = total_history(t.final_view, labels::tb);
  REQUIRE(h);
  CHECK(stack_contents(*h) == std::vector<Value>{A});
}

TEST_CASE("pop on an empty stack") {
  auto tr = make_treiber();
  Trace t = solo(single(tr.entangled, tr.initial({}, Loc{200}), inject({labels::tb}, tr.pop(1))));
  CHECK(t.result.is_none());
}

TEST_CASE("push from empty yields a fresh singleton self history") {
  auto tr = make_treiber();
  Trace t = solo(single(tr.entangled, tr.initial({}, Loc{200}), tr.push(lit(A), 1)));
  History expected = make_history(HistKind::Stack, {{1, Entry{Value::list({}), Value::list({A})}}});
  CHECK(self_history(t.final_view, labels::tb) == expected);
  CHECK(self_heap(t.final_view, labels::pv).empty());
}

TEST_CASE("private heap actions") {
  Prog p = let(alloc(), "p", seq(write(var("p"), lit(node(A, Loc{7}))), read(var("p"))));
  Trace t = solo(single(private_heap().concurroid, private_state({}), p));
  CHECK(t.result == node(A, Loc{7}));
  CHECK(self_heap(t.final_view, labels::pv) == Heap{{Loc{100}, node(A, Loc{7})}});

  State owned_elsewhere = private_state({}, {{Loc{5}, A}});
  Allocator alloc;
  CHECK_THROWS_AS(run_atomic(*private_heap().write, owned_elsewhere, {Value::loc(Loc{5}), B}, alloc), SafetyFault);
}

TEST_CASE("spin lock round trip") {
  auto l = make_spin_lock();
  State w = l.initial({A});
  REQUIRE(l.entangled->coherent(w));
  Allocator alloc;
  auto got = run_atomic(*l.trylock, w, {}, alloc);
  CHECK(got.result == Value::boolean(true));
  CHECK(self_heap(got.post, labels::pv).at(l.r) == Value::list({A}));
  CHECK(l.entangled->coherent(got.post));

  auto again = run_atomic(*l.trylock, got.post, {}, alloc);
  CHECK(again.result == Value::boolean(false));
  CHECK(again.post == got.post);

  auto wrote = run_atomic(*private_heap().write, restrict(got.post, {labels::pv}), {Value::loc(l.r), Value::list({B, A})}, alloc);
  State held = *merge(wrote.post, restrict(got.post, {labels::lk}));
  auto rel = run_atomic(*l.unlock, held, {}, alloc);
  CHECK(l.entangled->coherent(rel.post));
  CHECK_FALSE(self_heap(rel.post, labels::pv).count(l.r));
  CHECK(joint_of(rel.post, labels::lk).heap.at(l.r) == Value::list({B, A}));
}
