#include "doctest.h"

#include "histrio/actions.hpp"
#include "histrio/structures/common.hpp"
#include "histrio/structures/pair_snapshot.hpp"
#include "histrio/structures/private_heap.hpp"
#include "histrio/structures/treiber.hpp"

using namespace histrio;

namespace {

const Loc x{1};
const Value A = Value::nat(1), B = Value::nat(2), C = Value::nat(3);

Value run_prim(const PrimitiveAtomic& p, Heap& h) {
  std::uint64_t next = 500;
  return apply_primitive(p, h, next);
}

}  // namespace

TEST_CASE("cas success and failure") {
  Heap h{{x, A}};
  CHECK(run_prim(cas(x, A, B), h) == Value::boolean(true));
  CHECK(h == Heap{{x, B}});
  Heap h2{{x, C}};
  CHECK(run_prim(cas(x, A, B), h2) == Value::boolean(false));
  CHECK(h2 == Heap{{x, C}});
  Heap h3{{x, A}};
  CHECK(run_prim(cas(x, A, A), h3) == Value::boolean(true));
  CHECK(h3 == Heap{{x, A}});
}

TEST_CASE("primitives fault on dangling locations") {
  Heap h;
  CHECK_THROWS_AS(run_prim(prim_read(x), h), MemoryFault);
  CHECK_THROWS_AS(run_prim(prim_free(x), h), MemoryFault);
  CHECK(run_prim(prim_skip(), h) == Value::unit());
  Value l = run_prim(prim_alloc(), h);
  CHECK(h.count(l.as_loc()));
}

TEST_CASE("erasures of the shipped actions") {
  auto ps = make_pair_snapshot();
  auto tr = make_treiber();
  auto rx = erase(*ps.read_x, {});
  CHECK(rx.kind == PrimitiveAtomic::Kind::Read);
  CHECK(rx.loc == ps.x);
  auto wx = erase(*ps.write_x, {A});
  CHECK(wx.kind == PrimitiveAtomic::Kind::Rmw);
  CHECK(wx.loc == ps.x);
  Heap h{{ps.x, Value::pair(C, Value::nat(4))}};
  CHECK(run_prim(wx, h) == Value::unit());
  CHECK(h.at(ps.x) == Value::pair(A, Value::nat(5)));
  auto tp = erase(*tr.try_push, {Value::loc(kNull), Value::loc(Loc{200})});
  CHECK(tp.kind == PrimitiveAtomic::Kind::Rmw);
  CHECK(tp.loc == tr.snt);
  Heap s{{tr.snt, Value::loc(kNull)}};
  CHECK(run_prim(tp, s) == Value::boolean(true));
  CHECK(s.at(tr.snt) == Value::loc(Loc{200}));
}

TEST_CASE("run_atomic readX returns the joint cell and leaves the state unchanged") {
  auto ps = make_pair_snapshot();
  State w = ps.initial(A, B);
  Allocator alloc;
  auto ev = run_atomic(*ps.read_x, w, {}, alloc);
  CHECK(ev.result == Value::pair(A, Value::nat(0)));
  CHECK(ev.post == w);
  CHECK(ev.transition == "id");
}

TEST_CASE("run_atomic of a skip action") {
  AtomicAction skip;
  skip.name = "skip";
  skip.concurroid = private_heap().concurroid;
  skip.safe = [](const State&, const Args&) { return true; };
  skip.step = [](const State& w, const Args&, Allocator&) { return outcome(w, Value::unit(), "id"); };
  skip.claimed = {"id"};
  skip.erasure = [](const Args&) { return prim_skip(); };
  State w = private_state({{x, A}});
  Allocator alloc;
  auto ev = run_atomic(skip, w, {}, alloc);
  CHECK(ev.post == w);
  CHECK(ev.result == Value::unit());
}

TEST_CASE("run_atomic tryPop on an empty stack takes the failure branch") {
  auto tr = make_treiber();
  Loc p{200};
  Value one = Value::list({A});
  History other = make_history(HistKind::Stack, {{0, Entry{one, one}}, {1, Entry{one, Value::list({})}}});
  State w = treiber_state({{tr.snt, Value::loc(kNull)}, {p, node(A, kNull)}}, make_history(HistKind::Stack), other);
  REQUIRE(tr.concurroid->coherent(w));
  Allocator alloc;
  auto ev = run_atomic(*tr.try_pop, w, {Value::loc(p), Value::loc(kNull)}, alloc);
  CHECK(ev.result == Value::boolean(false));
  CHECK(ev.post == w);
}

TEST_CASE("stepping an unsafe state is a safety fault") {
  auto tr = make_treiber();
  State w = tr.initial({}, Loc{200});
  Allocator alloc;
  CHECK_THROWS_AS(run_atomic(*tr.try_pop, w, {Value::loc(Loc{999}), Value::loc(kNull)}, alloc), SafetyFault);
  CHECK_THROWS_AS(tr.try_pop->step(w, {Value::loc(Loc{999}), Value::loc(kNull)}, alloc), SafetyFault);
}

TEST_CASE("all seven properties hold for readX and tryPush") {
  Gen g(31);
  auto ps = make_pair_snapshot();
  auto tr = make_treiber();
  for (const auto& a : {ps.read_x, tr.try_push}) {
    auto rep = check_action_properties(*a, g, 300);
    CHECK(rep.properties.size() == 7);
    for (const auto& r : rep.properties) {
      INFO(a->name << " " << r.check);
      CHECK(r.ok());
      CHECK(r.applicable > 0);
    }
  }
}

TEST_CASE("erasure check catches a result that leaks auxiliary state") {
  Gen g(32);
  auto ps = make_pair_snapshot();
  AtomicAction leak = *ps.read_x;
  leak.name = "leakyReadX";
  auto step = leak.step;
  leak.step = [step](const State& w, const Args& args, Allocator& alloc) {
    StepOutcome o = step(w, args, alloc);
    o.result = Value::nat(total_history(w, labels::sp)->size());
    return o;
  };
  auto rep = check_action_properties(leak, g, 200);
  bool erasure_failed = false;
  for (const auto& r : rep.properties) {
    if (r.check == "erasure") erasure_failed = !r.ok();
  }
  CHECK(erasure_failed);
}
