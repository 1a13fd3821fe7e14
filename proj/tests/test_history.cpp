#include "doctest.h"

#include "histrio/gen.hpp"
#include "histrio/history.hpp"

using namespace histrio;

namespace {

Value L(std::vector<std::uint64_t> xs) {
  std::vector<Value> v;
  for (auto x : xs) v.push_back(Value::nat(x));
  return Value::list(v);
}

History hist(std::map<Timestamp, Entry> e) { return make_history(HistKind::Stack, std::move(e)); }

const Value a = Value::nat(1);
const Value b = Value::nat(2);

}  // namespace

TEST_CASE("lookup_end") {
  CHECK(lookup_end(hist({{2, {L({1}), L({2})}}}), 2) == L({2}));
  CHECK(lookup_end(hist({{0, {L({}), L({})}}}), 0) == L({}));
  CHECK(lookup_end(hist({{1, {L({}), L({1})}}}), 1) == L({1}));
  CHECK_THROWS(lookup_end(hist({}), 4));
}

TEST_CASE("upper_bounds") {
  CHECK(upper_bounds(hist({}), 0));
  CHECK(upper_bounds(hist({{1, {L({}), L({1})}}, {2, {L({1}), L({})}}}), 2));
  CHECK_FALSE(upper_bounds(hist({{3, {L({}), L({1})}}}), 2));
}

TEST_CASE("fresh") {
  CHECK(fresh(hist({})) == 0);
  CHECK(fresh(hist({{0, {L({}), L({})}}})) == 1);
  CHECK(fresh(hist({{0, {L({}), L({})}}, {2, {L({}), L({1})}}})) == 1);
}

TEST_CASE("is_continuous") {
  CHECK(is_continuous(hist({{1, {L({}), L({1})}}, {2, {L({1}), L({})}}})));
  CHECK_FALSE(is_continuous(hist({{1, {L({}), L({1})}}, {2, {L({2}), L({})}}})));
  CHECK(is_continuous(hist({})));
}

TEST_CASE("is_complete") {
  CHECK(is_complete(hist({{0, {L({}), L({})}}, {1, {L({}), L({1})}}})));
  CHECK_FALSE(is_complete(hist({{0, {L({}), L({})}}, {2, {L({}), L({1})}}})));
  CHECK_FALSE(is_complete(hist({{0, {L({}), L({1})}}})));
}

TEST_CASE("is_stacklike") {
  CHECK(is_stacklike(hist({{0, {L({}), L({})}}, {1, {L({}), L({1})}}, {2, {L({1}), L({})}}})));
  CHECK_FALSE(is_stacklike(hist({{1, {L({}), L({1, 2})}}})));
  CHECK(is_stacklike(hist({})));
}

TEST_CASE("pushed and popped") {
  auto h = hist({{0, {L({}), L({})}}, {1, {L({}), L({1})}}, {2, {L({1}), L({2, 1})}}});
  CHECK(pushed(h) == multiset_of({a, b}));
  CHECK(popped(hist({{2, {L({1}), L({})}}})) == multiset_of({a}));
  CHECK(pushed(hist({})).empty());
  CHECK(pushed(hist({{0, {L({1, 2}), L({1, 2})}}})) == multiset_of({a, b}));
}

TEST_CASE("subset order") {
  Entry e{L({}), L({1})}, f{L({1}), L({})};
  CHECK(is_subset(hist({{1, e}}), hist({{1, e}, {2, f}})));
  CHECK(is_subset(hist({{1, e}}), hist({{1, e}})));
  CHECK_FALSE(is_subset(hist({{1, e}}), hist({{2, f}})));
  CHECK_FALSE(is_subset(hist({{1, e}}), hist({{1, f}})));
}

TEST_CASE("distribution and balance oracles on examples") {
  CHECK(lemma2_oracle(hist({{0, {L({}), L({})}}, {1, {L({}), L({1})}}, {2, {L({1}), L({})}}})));
  CHECK(lemma1_oracle(hist({{1, {L({}), L({1})}}}), hist({{2, {L({1}), L({})}}})));
  CHECK(lemma2_oracle(hist({{0, {L({}), L({})}}})));
  CHECK_THROWS(lemma1_oracle(hist({{1, {L({}), L({1})}}}), hist({{1, {L({}), L({1})}}})));
}

TEST_CASE("history join is a disjoint union of stamps") {
  Entry e{L({}), L({1})};
  CHECK(history_join(hist({{1, e}}), hist({{2, e}}))->size() == 2);
  CHECK_FALSE(history_join(hist({{1, e}}), hist({{1, e}})));
}

TEST_CASE("random stack histories are complete, continuous and stacklike") {
  Gen g(5);
  for (int i = 0; i < 300; ++i) {
    std::uint64_t next = 1;
    History h = random_stack_history(g, {}, g.below(12), next);
    CHECK(is_complete(h));
    CHECK(is_continuous(h));
    CHECK(is_stacklike(h));
    CHECK(upper_bounds(h, fresh(h)));
    CHECK(fresh(h) == h.size());
  }
}

TEST_CASE("balanced accounting holds on every complete stack history from empty") {
  Gen g(6);
  int drained = 0;
  for (int i = 0; i < 500; ++i) {
    std::uint64_t next = 1;
    History h = random_stack_history(g, {}, g.below(10), next);
    CHECK(lemma2_oracle(h));
    if (last_post(h) == L({})) {
      ++drained;
      CHECK(pushed(h) == popped(h));
    }
    Multiset pu = pushed(h), po = popped(h);
    CHECK(multiset_size(pu) - multiset_size(po) == last_post(h)->items().size());
  }
  CHECK(drained > 0);
}

TEST_CASE("push/pop distribution holds when one side only pushes and the other only pops") {
  Gen g(8);
  for (int i = 0; i < 300; ++i) {
    std::uint64_t next = 1;
    History h = random_stack_history(g, {}, g.below(10), next);
    History pushes = make_history(HistKind::Stack), pops = make_history(HistKind::Stack);
    for (const auto& [t, e] : h.entries) {
      auto& side = (t != 0 && e.pre.items().size() > e.post.items().size()) ? pops : pushes;
      side.entries[t] = e;
    }
    CHECK(lemma1_oracle(pushes, pops));
    CHECK(pushed(*history_join(pushes, pops)) == pushed(pushes));
    CHECK(popped(*history_join(pushes, pops)) == popped(pops));
  }
}

TEST_CASE("balanced accounting premise includes continuity") {
  auto gap = hist({{0, {L({}), L({})}}, {1, {L({}), L({1})}}, {2, {L({2}), L({})}}});
  CHECK(is_complete(gap));
  CHECK(is_stacklike(gap));
  CHECK_FALSE(is_continuous(gap));
  CHECK(pushed(gap) != popped(gap));
  CHECK(lemma2_oracle(gap));
}
