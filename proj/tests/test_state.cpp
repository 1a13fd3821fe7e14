#include "doctest.h"

#include "histrio/gen.hpp"
#include "histrio/state.hpp"
#include "histrio/structures/pair_snapshot.hpp"
#include "histrio/structures/treiber.hpp"

using namespace histrio;

namespace {

const Loc x{1}, snt{3}, p{200};

PcmElement heap(Heap h) { return PcmElement(std::move(h)); }
PcmElement hist(std::map<Timestamp, Entry> e) { return PcmElement(make_history(HistKind::Stack, std::move(e))); }
Entry ent(std::uint64_t a, std::uint64_t b) { return Entry{Value::nat(a), Value::nat(b)}; }

State pv_state(Heap self) { return State{{{labels::pv, heap(std::move(self))}}, {{labels::pv, Joint{}}}, {{labels::pv, heap({})}}}; }

}  // namespace

TEST_CASE("validate") {
  CHECK(validate(pv_state({{x, Value::nat(3)}})));
  State overlap = pv_state({{x, Value::nat(3)}});
  overlap.joint[labels::pv].heap[x] = Value::nat(4);
  CHECK_FALSE(validate(overlap));
  State mismatch = pv_state({});
  mismatch.other.erase(labels::pv);
  CHECK_FALSE(validate(mismatch));
}

TEST_CASE("flatten") {
  State w = pv_state({{x, Value::nat(3)}});
  w.self[labels::tb] = hist({});
  w.other[labels::tb] = hist({});
  w.joint[labels::tb] = Joint{{{snt, Value::loc(p)}}, {}};
  auto h = flatten(w);
  REQUIRE(h);
  CHECK(*h == Heap{{x, Value::nat(3)}, {snt, Value::loc(p)}});
  CHECK(flatten(pv_state({}))->empty());
  w.other[labels::pv] = heap({{x, Value::nat(5)}});
  CHECK_FALSE(flatten(w));
}

TEST_CASE("transpose") {
  State w{{{labels::tb, hist({{1, ent(0, 1)}})}}, {{labels::tb, Joint{}}}, {{labels::tb, hist({{2, ent(1, 2)}})}}};
  State t = transpose(w);
  CHECK(t.self == w.other);
  CHECK(t.other == w.self);
  CHECK(transpose(t) == w);
  CHECK(validate(t) == validate(w));
}

TEST_CASE("realign") {
  State w{{{labels::tb, hist({})}}, {{labels::tb, Joint{}}}, {{labels::tb, hist({{2, ent(1, 2)}})}}};
  PcmMap t{{labels::tb, hist({{1, ent(0, 1)}})}};
  auto a = realign_acquire(w, t);
  REQUIRE(a);
  CHECK(a->self == t);
  CHECK(a->other == w.other);
  CHECK(*realign_acquire(w, unit_map(w.self)) == w);
  State stripped{unit_map(a->self), a->joint, a->other};
  auto back = realign_release(stripped, t);
  REQUIRE(back);
  CHECK(back->self.at(labels::tb) == hist({}));
  CHECK(back->other.at(labels::tb).history().size() == 2);
  CHECK_FALSE(realign_release(*back, t));
}

TEST_CASE("subjective split and join") {
  State w{{{labels::tb, hist({{1, ent(0, 1)}, {2, ent(1, 2)}})}}, {{labels::tb, Joint{}}}, {{labels::tb, hist({{0, ent(0, 0)}})}}};
  PcmMap a{{labels::tb, hist({{1, ent(0, 1)}})}};
  PcmMap b{{labels::tb, hist({{2, ent(1, 2)}})}};
  auto [c1, c2] = subjective_split(w, a, b);
  CHECK(c1.self == a);
  CHECK(c2.self == b);
  CHECK(c1.other.at(labels::tb).history().size() == 2);
  CHECK(subjective_join(c1, c2) == w);

  auto [d1, d2] = subjective_split(w, w.self, unit_map(w.self));
  CHECK(d1 == w);
  CHECK(d2.self == unit_map(w.self));
  CHECK(*map_pointwise_join(d2.other, unit_map(w.self)) == *map_pointwise_join(w.self, w.other));

  State u{{{labels::tb, hist({})}}, {{labels::tb, Joint{}}}, {{labels::tb, hist({})}}};
  CHECK(subjective_join(u, u) == u);

  State bad = c2;
  bad.other[labels::tb] = hist({{5, ent(0, 0)}});
  CHECK_THROWS_AS(subjective_join(c1, bad), StateError);
  CHECK_THROWS_AS(subjective_split(w, a, a), StateError);
}

TEST_CASE("split then join round-trips on sampled coherent states") {
  Gen g(17);
  auto ps = make_pair_snapshot();
  auto tr = make_treiber();
  int checked = 0;
  for (const auto& c : {ps.concurroid, tr.entangled}) {
    for (int i = 0; i < 200; ++i) {
      auto w = c->sample_state(g);
      if (!w) continue;
      auto [a, b] = random_split(g, w->self);
      auto [c1, c2] = subjective_split(*w, a, b);
      CHECK(validate(c1));
      CHECK(validate(c2));
      CHECK(subjective_join(c1, c2) == *w);
      CHECK(transpose(transpose(*w)) == *w);
      CHECK(validate(transpose(*w)));
      ++checked;
    }
  }
  CHECK(checked > 100);
}
