#include "doctest.h"

#include "histrio/concurroid.hpp"
#include "histrio/structures/common.hpp"
#include "histrio/structures/pair_snapshot.hpp"
#include "histrio/structures/private_heap.hpp"
#include "histrio/structures/treiber.hpp"

using namespace histrio;

namespace {

bool all_ok(const std::vector<CheckReport>& rs) {
  for (const auto& r : rs) {
    if (!r.ok()) return false;
  }
  return true;
}

const Transition& internal(const Concurroid& c, const std::string& name) {
  const Transition* t = c.find(name);
  REQUIRE(t != nullptr);
  return *t;
}

}  // namespace

TEST_CASE("named checks pass on the shipped concurroids") {
  Gen g(21);
  auto ps = make_pair_snapshot();
  auto tr = make_treiber();
  CHECK(check_guarantee(*ps.concurroid, internal(*ps.concurroid, "wr_x"), g, 500).ok());
  CHECK(check_guarantee(*tr.concurroid, internal(*tr.concurroid, "pop"), g, 500).ok());
  CHECK(check_locality(*ps.concurroid, internal(*ps.concurroid, "wr_x"), g, 200).ok());
  CHECK(check_fork_join_closure(*ps.concurroid, g, 200).ok());
  CHECK(check_footprints(*tr.concurroid, g, 200).ok());
  for (const auto& t : {ps.concurroid->find("id"), tr.concurroid->find("id")}) {
    REQUIRE(t);
    CHECK(check_locality(*ps.concurroid, *t, g, 100).ok());
  }
}

TEST_CASE("guarantee check catches a transition that mutates other") {
  Gen g(22);
  auto tr = make_treiber();
  Transition bad = internal(*tr.concurroid, "pop");
  auto sample = bad.sample;
  bad.sample = [sample](Gen& gen, const Heap* want) -> std::optional<Sampled> {
    auto s = sample(gen, want);
    if (!s) return s;
    History o = s->post.other.at(labels::tb).history();
    o.entries[1000] = Entry{Value::list({}), Value::list({})};
    s->post.other[labels::tb] = PcmElement(o);
    return s;
  };
  CHECK_FALSE(check_guarantee(*tr.concurroid, bad, g, 100).ok());
}

TEST_CASE("locality check catches a transition reading the absolute self value") {
  Gen g(23);
  auto ps = make_pair_snapshot();
  Transition bad = internal(*ps.concurroid, "wr_x");
  auto member = bad.member;
  auto sample = bad.sample;
  bad.member = [member](const Heap& h, const State& pre, const State& post) {
    return member(h, pre, post) && self_history(pre, labels::sp).empty();
  };
  bad.sample = [sample](Gen& gen, const Heap* want) -> std::optional<Sampled> {
    for (int i = 0; i < 50; ++i) {
      auto s = sample(gen, want);
      if (s && self_history(s->pre, labels::sp).empty()) return s;
    }
    return std::nullopt;
  };
  CHECK_FALSE(check_locality(*ps.concurroid, bad, g, 200).ok());
}

TEST_CASE("fork-join closure catches coherence that depends on self alone") {
  Gen g(24);
  auto ps = make_pair_snapshot();
  Concurroid bad = *ps.concurroid;
  auto coherent = bad.coherent;
  auto sample = bad.sample_state;
  bad.coherent = [coherent](const State& w) { return coherent(w) && self_history(w, labels::sp).empty(); };
  bad.sample_state = [sample](Gen& gen) -> std::optional<State> {
    auto w = sample(gen);
    if (!w) return w;
    return realign_release(*w, w->self);
  };
  CHECK_FALSE(check_fork_join_closure(bad, g, 200).ok());
}

TEST_CASE("private heap acquire extends the footprint by the acquired heap") {
  Gen g(25);
  const Concurroid& P = *private_heap().concurroid;
  const Transition* acq = P.find("pv.acquire");
  REQUIRE(acq);
  int seen = 0;
  for (int i = 0; i < 100; ++i) {
    auto s = acq->sample(g, nullptr);
    if (!s || s->h.empty()) continue;
    auto before = heap_dom(self_heap(s->pre, labels::pv));
    auto after = heap_dom(self_heap(s->post, labels::pv));
    for (Loc l : heap_dom(s->h)) {
      CHECK_FALSE(before.count(l));
      CHECK(after.count(l));
    }
    CHECK(after.size() == before.size() + s->h.size());
    ++seen;
  }
  CHECK(seen > 0);
}

TEST_CASE("entanglement") {
  Gen g(26);
  auto ps = make_pair_snapshot();
  auto tr = make_treiber();
  auto P = private_heap().concurroid;
  auto ps_pv = entangle(P, ps.concurroid);
  CHECK(ps_pv->labels == std::set<Label>{labels::pv, labels::sp});
  std::string why;
  CHECK_MESSAGE(accepts_same(*entangle(P, empty_concurroid()), *P, g, 100, &why), why);
  auto left = entangle(entangle(P, tr.concurroid), ps.concurroid);
  auto right = entangle(entangle(P, ps.concurroid), tr.concurroid);
  CHECK_MESSAGE(accepts_same(*left, *right, g, 100, &why), why);
  CHECK(all_ok(check_concurroid(*left, g, 100)));
}

TEST_CASE("empty concurroid") {
  auto e = empty_concurroid();
  CHECK(e->labels.empty());
  CHECK(e->coherent(State{}));
  State w{{{labels::pv, PcmElement(Heap{})}}, {{labels::pv, Joint{}}}, {{labels::pv, PcmElement(Heap{})}}};
  CHECK_FALSE(e->coherent(w));
}
