#include "histrio/structures/private_heap.hpp"

namespace histrio {

namespace {

constexpr Label pv = labels::pv;

bool coherent(const State& w) {
  if (labels_of(w) != std::set<Label>{pv} || !validate(w)) return false;
  const auto& j = w.joint.at(pv);
  return w.self.at(pv).is_heap() && w.other.at(pv).is_heap() && j.heap.empty() && j.aux.empty();
}

std::optional<State> sample_state(Gen& g) {
  return private_state(random_heap(g, 3), random_heap(g, 2));
}

State with_private(const State& w, Heap h) { return set_self(w, pv, PcmElement(std::move(h))); }

bool frame_same(const State& pre, const State& post) {
  return pre.other == post.other && pre.joint == post.joint;
}

// ι_P: the domain is unchanged and at most one cell changes value.
bool write_member(const State& pre, const State& post) {
  if (!frame_same(pre, post) || !coherent(pre) || !coherent(post)) return false;
  const Heap& a = self_heap(pre, pv);
  const Heap& b = self_heap(post, pv);
  if (heap_dom(a) != heap_dom(b)) return false;
  int changed = 0;
  for (const auto& [l, v] : a) changed += (b.at(l) != v);
  return changed <= 1;
}

std::optional<Sampled> write_sample(Gen& g) {
  State pre = *sample_state(g);
  Heap h = self_heap(pre, pv);
  h[g.fresh_loc()] = random_value(g);
  pre = with_private(pre, h);
  auto it = std::next(h.begin(), static_cast<long>(g.below(h.size())));
  it->second = random_value(g);
  return Sampled{{}, pre, with_private(pre, h)};
}

Transition acquire() {
  Transition t;
  t.name = "pv.acquire";
  t.kind = TransitionKind::Acquire;
  t.member = [](const Heap& h, const State& pre, const State& post) {
    if (!frame_same(pre, post) || !coherent(pre) || !coherent(post)) return false;
    auto u = heap_union(self_heap(pre, pv), h);
    return u && *u == self_heap(post, pv);
  };
  t.sample = [](Gen& g, const Heap* want) -> std::optional<Sampled> {
    State pre = *sample_state(g);
    Heap h = want ? *want : random_heap(g, 2);
    if (h.empty() && !want) h[g.fresh_loc()] = Value::unit();
    auto flat = flatten(pre);
    auto u = heap_union(self_heap(pre, pv), h);
    if (!flat || !heap_disjoint(*flat, h) || !u) return std::nullopt;
    return Sampled{h, pre, with_private(pre, *u)};
  };
  return t;
}

Transition release() {
  Transition t;
  t.name = "pv.release";
  t.kind = TransitionKind::Release;
  t.member = [](const Heap& h, const State& pre, const State& post) {
    if (!frame_same(pre, post) || !coherent(pre) || !coherent(post)) return false;
    auto u = heap_union(self_heap(post, pv), h);
    return u && *u == self_heap(pre, pv);
  };
  t.sample = [](Gen& g, const Heap* want) -> std::optional<Sampled> {
    State post = *sample_state(g);
    Heap h;
    if (want) {
      h = *want;
    } else {
      h[g.fresh_loc()] = random_value(g);
      if (g.coin()) h[g.fresh_loc()] = random_value(g);
    }
    auto flat = flatten(post);
    auto u = heap_union(self_heap(post, pv), h);
    if (!flat || !heap_disjoint(*flat, h) || !u) return std::nullopt;
    return Sampled{h, with_private(post, *u), post};
  };
  return t;
}

// Coherent state whose private heap holds a location for the action to use.
std::optional<std::pair<State, Args>> sample_with_cell(Gen& g, bool with_value) {
  State w = *sample_state(g);
  Heap h = self_heap(w, pv);
  Loc x = g.fresh_loc();
  h[x] = random_value(g);
  w = with_private(w, h);
  if (g.chance(1, 5) && !w.other.at(pv).heap().empty()) x = w.other.at(pv).heap().begin()->first;
  Args args{Value::loc(x)};
  if (with_value) args.push_back(random_value(g));
  return std::pair{w, args};
}

bool owns(const State& w, const Args& args) {
  return coherent(w) && args.size() >= 1 && args[0].is(Value::Kind::Loc) &&
         self_heap(w, pv).count(args[0].as_loc()) != 0;
}

PrivateHeap build() {
  auto c = std::make_shared<Concurroid>();
  c->name = "P";
  c->labels = {pv};
  c->coherent = coherent;
  c->sample_state = sample_state;
  c->internals.push_back(identity_transition(sample_state));
  c->internals.push_back(internal_transition("pv.write", write_member, write_sample));
  c->externals.push_back(ExternalPair{acquire(), release()});
  ConcurroidPtr cp = c;

  PrivateHeap p;
  p.concurroid = cp;

  AtomicAction alloc;
  alloc.name = "alloc";
  alloc.concurroid = cp;
  alloc.result_type = ResultType::Value;
  alloc.safe = [](const State& w, const Args& args) { return coherent(w) && args.empty(); };
  alloc.step = [](const State& w, const Args&, Allocator& a) {
    Loc l = a.fresh();
    Heap h = self_heap(w, pv);
    auto flat = flatten(w);
    if (!flat || flat->count(l)) throw MemoryFault("allocator returned a live location " + render(l));
    h[l] = Value::unit();
    return outcome(with_private(w, h), Value::loc(l), "pv.acquire", Heap{{l, Value::unit()}});
  };
  alloc.claimed = {"pv.acquire"};
  alloc.erasure = [](const Args&) { return prim_alloc(); };
  alloc.sample = [](Gen& g) -> std::optional<std::pair<State, Args>> { return std::pair{*sample_state(g), Args{}}; };
  p.alloc = make_action(std::move(alloc));

  AtomicAction write;
  write.name = "write";
  write.concurroid = cp;
  write.result_type = ResultType::Unit;
  write.safe = [](const State& w, const Args& args) { return args.size() == 2 && owns(w, args); };
  write.step = [](const State& w, const Args& args, Allocator&) {
    Heap h = self_heap(w, pv);
    h[args[0].as_loc()] = args[1];
    return outcome(with_private(w, h), Value::unit(), "pv.write");
  };
  write.claimed = {"pv.write"};
  write.erasure = [](const Args& args) { return prim_write(args.at(0).as_loc(), args.at(1)); };
  write.sample = [](Gen& g) { return sample_with_cell(g, true); };
  p.write = make_action(std::move(write));

  AtomicAction read;
  read.name = "read";
  read.concurroid = cp;
  read.result_type = ResultType::Value;
  read.safe = [](const State& w, const Args& args) { return args.size() == 1 && owns(w, args); };
  read.step = [](const State& w, const Args& args, Allocator&) {
    return outcome(w, self_heap(w, pv).at(args[0].as_loc()), "id");
  };
  read.claimed = {"id"};
  read.erasure = [](const Args& args) { return prim_read(args.at(0).as_loc()); };
  read.sample = [](Gen& g) { return sample_with_cell(g, false); };
  p.read = make_action(std::move(read));

  AtomicAction dealloc;
  dealloc.name = "dealloc";
  dealloc.concurroid = cp;
  dealloc.result_type = ResultType::Unit;
  dealloc.safe = [](const State& w, const Args& args) { return args.size() == 1 && owns(w, args); };
  dealloc.step = [](const State& w, const Args& args, Allocator&) {
    Heap h = self_heap(w, pv);
    Loc x = args[0].as_loc();
    Heap gone{{x, h.at(x)}};
    h.erase(x);
    return outcome(with_private(w, h), Value::unit(), "pv.release", gone);
  };
  dealloc.claimed = {"pv.release"};
  dealloc.erasure = [](const Args& args) { return prim_free(args.at(0).as_loc()); };
  dealloc.sample = [](Gen& g) { return sample_with_cell(g, false); };
  p.dealloc = make_action(std::move(dealloc));
  return p;
}

}  // namespace

const PrivateHeap& private_heap() {
  static const PrivateHeap p = build();
  return p;
}

State private_state(Heap self, Heap other) {
  State w;
  w.self[pv] = PcmElement(std::move(self));
  w.joint[pv] = Joint{};
  w.other[pv] = PcmElement(std::move(other));
  return w;
}

namespace prog {

Prog alloc() { return act(private_heap().alloc); }
Prog write(Expr x, Expr v) { return act(private_heap().write, args({std::move(x), std::move(v)})); }
Prog read(Expr x) { return act(private_heap().read, args({std::move(x)})); }

}  // namespace prog

}  // namespace histrio
