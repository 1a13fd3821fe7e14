#include "doctest.h"

#include "histrio/gen.hpp"
#include "histrio/pcm.hpp"
#include "histrio/suites.hpp"

using namespace histrio;

namespace {

History hist(std::map<Timestamp, Entry> e) { return make_history(HistKind::Stack, std::move(e)); }
Entry ent(std::uint64_t a, std::uint64_t b) { return Entry{Value::nat(a), Value::nat(b)}; }

}  // namespace

TEST_CASE("mutex join") {
  CHECK(*join(PcmElement(Mutex::Own), PcmElement(Mutex::NotOwn)) == PcmElement(Mutex::Own));
  CHECK(*join(PcmElement(Mutex::NotOwn), PcmElement(Mutex::Own)) == PcmElement(Mutex::Own));
  CHECK_FALSE(join(PcmElement(Mutex::Own), PcmElement(Mutex::Own)).has_value());
}

TEST_CASE("heap join is defined iff domains are disjoint") {
  PcmElement a(Heap{{Loc{1}, Value::nat(3)}});
  PcmElement b(Heap{{Loc{2}, Value::nat(4)}});
  PcmElement c(Heap{{Loc{1}, Value::nat(5)}});
  auto ab = join(a, b);
  REQUIRE(ab);
  CHECK(ab->heap().size() == 2);
  CHECK_FALSE(join(a, c));
  CHECK(*join(a, unit_of(a)) == a);
}

TEST_CASE("idset and triple joins") {
  CHECK(join(PcmElement(IdSet{1}), PcmElement(IdSet{2}))->idset() == IdSet{1, 2});
  CHECK_FALSE(join(PcmElement(IdSet{1}), PcmElement(IdSet{1, 3})));
  PcmElement aux0(make_history(HistKind::Stack));
  PcmElement t1(IdSet{0}, Mutex::Own, PcmElement(hist({{1, ent(1, 2)}})));
  PcmElement t2(IdSet{1}, Mutex::NotOwn, PcmElement(hist({{2, ent(2, 3)}})));
  auto t = join(t1, t2);
  REQUIRE(t);
  CHECK(t->triple().ids == IdSet{0, 1});
  CHECK(t->triple().mutex == Mutex::Own);
  CHECK(t->aux().history().size() == 2);
  CHECK_FALSE(join(t1, PcmElement(IdSet{2}, Mutex::Own, aux0)));
  CHECK_FALSE(join(t1, PcmElement(IdSet{0}, Mutex::NotOwn, aux0)));
}

TEST_CASE("joining different instances is a usage error") {
  CHECK_THROWS_AS(join(PcmElement(Mutex::Own), PcmElement(Heap{})), PcmUsageError);
}

TEST_CASE("map disjoint union") {
  PcmMap a{{labels::pv, PcmElement(Heap{{Loc{1}, Value::nat(1)}})}};
  PcmMap b{{labels::tb, PcmElement(hist({{1, ent(0, 1)}}))}};
  auto ab = map_disjoint_union(a, b);
  REQUIRE(ab);
  CHECK(ab->size() == 2);
  CHECK_FALSE(map_disjoint_union(a, a));
  CHECK(*map_disjoint_union(a, PcmMap{}) == a);
}

TEST_CASE("map pointwise join") {
  PcmMap a{{labels::tb, PcmElement(hist({{1, ent(0, 1)}}))}};
  PcmMap b{{labels::tb, PcmElement(hist({{2, ent(1, 2)}}))}};
  auto ab = map_pointwise_join(a, b);
  REQUIRE(ab);
  CHECK(ab->at(labels::tb).history().size() == 2);
  PcmMap own{{labels::lk, PcmElement(Mutex::Own)}};
  CHECK_FALSE(map_pointwise_join(own, own));
  CHECK(map_pointwise_join(PcmMap{}, PcmMap{})->empty());
}

TEST_CASE("pcm order") {
  PcmElement small(hist({{1, ent(0, 1)}}));
  PcmElement big(hist({{1, ent(0, 1)}, {2, ent(1, 2)}}));
  CHECK(pcm_order(small, big));
  CHECK(pcm_order(big, big));
  CHECK_FALSE(pcm_order(big, small));
  CHECK_FALSE(pcm_order(small, PcmElement(hist({{2, ent(1, 2)}}))));
}

TEST_CASE("pcm laws hold on every instance") {
  for (const auto& r : run_law_suites(2024, 1000)) {
    INFO(r.instance << ": " << (r.ok() ? "" : r.violations.front().law + " " + r.violations.front().detail));
    CHECK(r.ok());
    CHECK(r.samples > 0);
  }
}

TEST_CASE("mutex laws hold exhaustively") {
  auto r = check_pcm_laws_exhaustive(mutex_instance(), {PcmElement(Mutex::NotOwn), PcmElement(Mutex::Own)},
                                     [](const PcmElement& e) { return e.render(); });
  CHECK(r.ok());
  CHECK(r.samples == 8);
}

TEST_CASE("law checker catches a non-commutative join") {
  PcmInstance<int> broken{"first-wins", [](int a, int) { return std::optional<int>(a); }, 0};
  std::mt19937_64 rng(3);
  auto r = check_pcm_laws(broken, [&] { return static_cast<int>(rng() % 5); }, 100,
                          [](int x) { return std::to_string(x); });
  CHECK_FALSE(r.ok());
}

TEST_CASE("join definedness is symmetric on random samples") {
  Gen g(99);
  for (int i = 0; i < 500; ++i) {
    PcmElement a(random_history(g, HistKind::Stack, 3));
    PcmElement b(random_history(g, HistKind::Stack, 3));
    CHECK(join(a, b).has_value() == join(b, a).has_value());
  }
}
