#include "histrio/structures/spin_lock.hpp"

#include "histrio/structures/private_heap.hpp"

namespace histrio {

namespace {

constexpr Label pv = labels::pv;

struct Side {
  Mutex m;
  History g;
};

std::optional<Side> side(const PcmElement& e) {
  if (!e.is_triple() || !e.triple().ids.empty() || !e.aux().is_history()) return std::nullopt;
  if (e.aux().history().kind != HistKind::Stack) return std::nullopt;
  return Side{e.triple().mutex, e.aux().history()};
}

PcmElement make_side(Mutex m, History g) { return PcmElement(IdSet{}, m, PcmElement(std::move(g))); }

Heap resource(Loc r, const History& g) { return Heap{{r, Value::list(stack_contents(g))}}; }

struct Spec {
  Label label;
  Loc lk, r;
};

bool coherent(const State& w, const Spec& sp) {
  if (labels_of(w) != std::set<Label>{sp.label} || !validate(w)) return false;
  auto s = side(w.self.at(sp.label));
  auto o = side(w.other.at(sp.label));
  const Joint& j = w.joint.at(sp.label);
  if (!s || !o || !j.aux.empty()) return false;
  auto g = history_join(s->g, o->g);
  auto b = j.heap.find(sp.lk);
  if (!g || b == j.heap.end() || !b->second.is(Value::Kind::Bool)) return false;
  bool owned = s->m == Mutex::Own || o->m == Mutex::Own;
  Heap h = j.heap;
  h.erase(sp.lk);
  if (b->second.as_bool()) return h.empty() && owned;
  return !owned && h == resource(sp.r, *g);
}

State make_state(const Spec& sp, Heap joint, PcmElement self, PcmElement other) {
  State w;
  w.self[sp.label] = std::move(self);
  w.joint[sp.label] = Joint{std::move(joint), {}};
  w.other[sp.label] = std::move(other);
  return w;
}

History total(const State& w, Label l) { return *total_history(w, l); }

// Random stack history split between self and other, with the lock held by `holder` (0 none, 1 self, 2 other).
State sample(Gen& g, const Spec& sp, int holder) {
  std::uint64_t next_elem = 1;
  History tau = random_stack_history(g, {}, g.below(4), next_elem);
  auto [a, b] = random_split(g, PcmElement(tau));
  Mutex ms = holder == 1 ? Mutex::Own : Mutex::NotOwn;
  Mutex mo = holder == 2 ? Mutex::Own : Mutex::NotOwn;
  Heap j{{sp.lk, Value::boolean(holder != 0)}};
  if (holder == 0) j.merge(resource(sp.r, tau));
  return make_state(sp, j, make_side(ms, a.history()), make_side(mo, b.history()));
}

State sample_any(Gen& g, const Spec& sp) { return sample(g, sp, static_cast<int>(g.below(3))); }

// g grown by an entry reaching `contents`, or unchanged when it already ends there.
std::optional<History> ghost(const History& mine, const History& all, const Value& contents) {
  if (Value::list(stack_contents(all)) == contents) return mine;
  return history_join(mine, singleton(HistKind::Stack, fresh(all), Value::list(stack_contents(all)), contents));
}

Transition unlock_transition(const Spec& sp, std::string name) {
  Transition t;
  t.name = std::move(name);
  t.kind = TransitionKind::Acquire;
  t.member = [sp](const Heap& h, const State& pre, const State& post) {
    if (!coherent(pre, sp) || !coherent(post, sp) || !(pre.other == post.other)) return false;
    auto s = side(pre.self.at(sp.label));
    auto s2 = side(post.self.at(sp.label));
    if (s->m != Mutex::Own || s2->m != Mutex::NotOwn || !is_subset(s->g, s2->g)) return false;
    Heap j = post.joint.at(sp.label).heap;
    return j.erase(sp.lk) && j == h && pre.joint.at(sp.label).heap.size() == 1;
  };
  t.sample = [sp](Gen& g, const Heap* want) -> std::optional<Sampled> {
    State pre = sample(g, sp, 1);
    History all = total(pre, sp.label);
    auto s = side(pre.self.at(sp.label));
    Value contents = Value::list(stack_contents(all));
    if (want) {
      if (want->size() != 1 || !want->count(sp.r)) return std::nullopt;
      contents = want->at(sp.r);
      if (!contents.is(Value::Kind::List)) return std::nullopt;
    } else if (g.coin()) {
      std::vector<Value> next = contents.items();
      next.insert(next.begin(), Value::nat(50 + g.below(10)));
      contents = Value::list(next);
    }
    auto g2 = ghost(s->g, all, contents);
    if (!g2) return std::nullopt;
    Heap h{{sp.r, contents}};
    Heap j{{sp.lk, Value::boolean(false)}, {sp.r, contents}};
    State post = make_state(sp, j, make_side(Mutex::NotOwn, *g2), pre.other.at(sp.label));
    if (!coherent(post, sp)) return std::nullopt;
    return Sampled{h, pre, post};
  };
  return t;
}

Transition lock_transition(const Spec& sp, std::string name) {
  Transition t;
  t.name = std::move(name);
  t.kind = TransitionKind::Release;
  t.member = [sp](const Heap& h, const State& pre, const State& post) {
    if (!coherent(pre, sp) || !coherent(post, sp) || !(pre.other == post.other)) return false;
    auto s = side(pre.self.at(sp.label));
    auto s2 = side(post.self.at(sp.label));
    if (s->m != Mutex::NotOwn || s2->m != Mutex::Own || !(s->g == s2->g)) return false;
    Heap j = pre.joint.at(sp.label).heap;
    return j.erase(sp.lk) && j == h && post.joint.at(sp.label).heap.size() == 1;
  };
  t.sample = [sp](Gen& g, const Heap* want) -> std::optional<Sampled> {
    for (int attempt = 0; attempt < 8; ++attempt) {
      State pre = sample(g, sp, 0);
      Heap h = pre.joint.at(sp.label).heap;
      h.erase(sp.lk);
      if (want && !(*want == h)) continue;
      auto s = side(pre.self.at(sp.label));
      State post = make_state(sp, Heap{{sp.lk, Value::boolean(true)}}, make_side(Mutex::Own, s->g),
                              pre.other.at(sp.label));
      return Sampled{h, pre, post};
    }
    return std::nullopt;
  };
  return t;
}

}  // namespace

std::string SpinLock::lock_name() const { return label_name(label) + ".lock"; }
std::string SpinLock::unlock_name() const { return label_name(label) + ".unlock"; }

SpinLock make_spin_lock(Label label, Loc lk, Loc r) {
  SpinLock s;
  s.label = label;
  s.lk = lk;
  s.r = r;
  Spec sp{label, lk, r};
  auto c = std::make_shared<Concurroid>();
  c->name = "L[" + label_name(label) + "]";
  c->labels = {label};
  c->coherent = [sp](const State& w) { return coherent(w, sp); };
  c->sample_state = [sp](Gen& g) -> std::optional<State> { return sample_any(g, sp); };
  c->internals.push_back(identity_transition(c->sample_state));
  c->externals.push_back(ExternalPair{unlock_transition(sp, s.unlock_name()), lock_transition(sp, s.lock_name())});
  s.concurroid = c;
  s.entangled = entangle(private_heap().concurroid, s.concurroid);
  ConcurroidPtr pl = s.entangled;

  auto sample_pl = [pl, sp](Gen& g, bool own_resource) -> std::optional<std::pair<State, Args>> {
    auto p = private_heap().concurroid->sample_state(g);
    State l = sample(g, sp, own_resource ? 1 : static_cast<int>(g.below(3)));
    if (own_resource) {
      Heap mine = self_heap(*p, pv);
      History all = total(l, sp.label);
      std::vector<Value> items = stack_contents(all);
      if (g.coin()) items.insert(items.begin(), Value::nat(60 + g.below(10)));
      mine[sp.r] = Value::list(items);
      if (g.chance(1, 6)) mine.erase(sp.r);
      p = set_self(*p, pv, PcmElement(mine));
    }
    auto w = merge(*p, l);
    if (!w || !pl->coherent(*w)) return std::nullopt;
    return std::pair{*w, Args{}};
  };

  AtomicAction tl;
  tl.name = "trylock[" + label_name(label) + "]";
  tl.concurroid = pl;
  tl.result_type = ResultType::Bool;
  tl.safe = [pl](const State& w, const Args& args) { return args.empty() && pl->coherent(w); };
  std::string acquire_lock = "pv.acquire⋈" + s.lock_name();
  tl.step = [sp, acquire_lock](const State& w, const Args&, Allocator&) {
    Heap j = w.joint.at(sp.label).heap;
    if (j.at(sp.lk).as_bool()) return outcome(w, Value::boolean(false), "id");
    j.erase(sp.lk);
    auto mine = heap_union(self_heap(w, pv), j);
    if (!mine) throw SafetyFault("resource overlaps private heap");
    auto s = side(w.self.at(sp.label));
    State post = set_self(w, pv, PcmElement(*mine));
    post = set_self(post, sp.label, make_side(Mutex::Own, s->g));
    post = set_joint_heap(post, sp.label, Heap{{sp.lk, Value::boolean(true)}});
    return outcome(post, Value::boolean(true), acquire_lock);
  };
  tl.claimed = {"id", acquire_lock};
  tl.erasure = [lk](const Args&) { return cas(lk, Value::boolean(false), Value::boolean(true)); };
  tl.sample = [sample_pl](Gen& g) { return sample_pl(g, false); };
  s.trylock = make_action(std::move(tl));

  AtomicAction ul;
  ul.name = "unlock[" + label_name(label) + "]";
  ul.concurroid = pl;
  ul.result_type = ResultType::Unit;
  ul.safe = [pl, sp](const State& w, const Args& args) {
    if (!args.empty() || !pl->coherent(w)) return false;
    auto s = side(w.self.at(sp.label));
    const Heap& mine = self_heap(w, pv);
    auto it = mine.find(sp.r);
    return s->m == Mutex::Own && it != mine.end() && it->second.is(Value::Kind::List);
  };
  std::string release_unlock = s.unlock_name() + "⋈pv.release";
  ul.step = [sp, release_unlock](const State& w, const Args&, Allocator&) {
    Heap mine = self_heap(w, pv);
    Value contents = mine.at(sp.r);
    mine.erase(sp.r);
    auto s = side(w.self.at(sp.label));
    auto g2 = ghost(s->g, total(w, sp.label), contents);
    if (!g2) throw SafetyFault("ghost update undefined");
    State post = set_self(w, pv, PcmElement(mine));
    post = set_self(post, sp.label, make_side(Mutex::NotOwn, *g2));
    post = set_joint_heap(post, sp.label, Heap{{sp.lk, Value::boolean(false)}, {sp.r, contents}});
    return outcome(post, Value::unit(), release_unlock);
  };
  ul.claimed = {release_unlock};
  ul.erasure = [lk](const Args&) { return prim_write(lk, Value::boolean(false)); };
  ul.sample = [sample_pl](Gen& g) { return sample_pl(g, true); };
  s.unlock = make_action(std::move(ul));
  return s;
}

State SpinLock::initial(const std::vector<Value>& contents, Heap private_heap) const {
  Value l = Value::list(contents);
  State w;
  w.self[label] = make_side(Mutex::NotOwn, make_history(HistKind::Stack));
  w.joint[label] = Joint{Heap{{lk, Value::boolean(false)}, {r, l}}, {}};
  w.other[label] = make_side(Mutex::NotOwn, make_history(HistKind::Stack, {{0, Entry{l, l}}}));
  return *merge(private_state(std::move(private_heap)), w);
}

}  // namespace histrio
