#include "histrio/structures/treiber.hpp"

#include "histrio/structures/private_heap.hpp"

namespace histrio {

namespace {

constexpr Label tb = labels::tb;
constexpr Label pv = labels::pv;

bool coherent(const State& w, Loc snt) {
  if (labels_of(w) != std::set<Label>{tb} || !validate(w)) return false;
  const auto& s = w.self.at(tb);
  const auto& o = w.other.at(tb);
  if (!s.is_history() || !o.is_history() || s.history().kind != HistKind::Stack) return false;
  if (!w.joint.at(tb).aux.empty()) return false;
  auto tau = total_history(w, tb);
  return tau && stack_invariant(*tau, w.joint.at(tb).heap, snt);
}

Loc top(const State& w, Loc snt) { return w.joint.at(tb).heap.at(snt).as_loc(); }

std::optional<State> add_entry(State w, const Value& pre, const Value& post) {
  auto tau = total_history(w, tb);
  if (!tau) return std::nullopt;
  auto self = history_join(self_history(w, tb), singleton(HistKind::Stack, fresh(*tau), pre, post));
  if (!self) return std::nullopt;
  return set_self(std::move(w), tb, PcmElement(*self));
}

std::optional<State> push_step(const State& pre, Loc snt, Loc p, const Value& e) {
  auto tau = total_history(pre, tb);
  if (!tau) return std::nullopt;
  Heap h = pre.joint.at(tb).heap;
  if (h.count(p)) return std::nullopt;
  h[p] = node(e, top(pre, snt));
  h[snt] = Value::loc(p);
  std::vector<Value> l = stack_contents(*tau);
  std::vector<Value> l2 = l;
  l2.insert(l2.begin(), e);
  return add_entry(set_joint_heap(pre, tb, h), Value::list(l), Value::list(l2));
}

std::optional<State> pop_step(const State& pre, Loc snt) {
  Loc p = top(pre, snt);
  auto tau = total_history(pre, tb);
  if (p.null() || !tau) return std::nullopt;
  Heap h = pre.joint.at(tb).heap;
  h[snt] = h.at(p).at(1);
  std::vector<Value> l = stack_contents(*tau);
  if (l.empty()) return std::nullopt;
  std::vector<Value> l2(l.begin() + 1, l.end());
  return add_entry(set_joint_heap(pre, tb, h), Value::list(l), Value::list(l2));
}

State sample(Gen& g, Loc snt) {
  std::vector<Value> init;
  std::size_t n0 = g.below(3);
  std::uint64_t next_elem = 100;
  for (std::size_t i = 0; i < n0; ++i) init.push_back(Value::nat(next_elem++));
  History tau = random_stack_history(g, init, g.below(5), next_elem);
  Heap h = build_stack(g, snt, stack_contents(tau), g.below(3));
  auto [s, o] = random_split(g, PcmElement(tau));
  return treiber_state(h, s.history(), o.history());
}

Transition pop_transition(Loc snt) {
  return internal_transition(
      "pop",
      [snt](const State& pre, const State& post) {
        if (!coherent(pre, snt)) return false;
        auto expect = pop_step(pre, snt);
        return expect && *expect == post;
      },
      [snt](Gen& g) -> std::optional<Sampled> {
        State pre = sample(g, snt);
        auto post = pop_step(pre, snt);
        if (!post) return std::nullopt;
        return Sampled{{}, pre, *post};
      });
}

Transition push_transition(Loc snt) {
  Transition t;
  t.name = "tb.push";
  t.kind = TransitionKind::Acquire;
  t.member = [snt](const Heap& h, const State& pre, const State& post) {
    if (h.size() != 1 || !coherent(pre, snt)) return false;
    const auto& [p, v] = *h.begin();
    if (!is_node(v) || v.at(1).as_loc() != top(pre, snt)) return false;
    auto expect = push_step(pre, snt, p, v.at(0));
    return expect && *expect == post;
  };
  t.sample = [snt](Gen& g, const Heap* want) -> std::optional<Sampled> {
    for (int attempt = 0; attempt < 8; ++attempt) {
      State pre = sample(g, snt);
      Heap h = want ? *want : Heap{{g.fresh_loc(), node(Value::nat(g.below(50)), top(pre, snt))}};
      if (h.size() != 1 || !is_node(h.begin()->second)) return std::nullopt;
      if (h.begin()->second.at(1).as_loc() != top(pre, snt)) continue;
      auto post = push_step(pre, snt, h.begin()->first, h.begin()->second.at(0));
      if (post) return Sampled{h, pre, *post};
    }
    return std::nullopt;
  };
  return t;
}

std::vector<Loc> nodes_of(const State& w, Loc snt) {
  std::vector<Loc> out;
  for (const auto& kv : w.joint.at(tb).heap) {
    if (kv.first != snt) out.push_back(kv.first);
  }
  return out;
}

}  // namespace

State treiber_state(Heap joint, History self, History other) {
  State w;
  w.self[tb] = PcmElement(std::move(self));
  w.joint[tb] = Joint{std::move(joint), {}};
  w.other[tb] = PcmElement(std::move(other));
  return w;
}

TreiberStack make_treiber(Loc snt) {
  TreiberStack s;
  s.snt = snt;
  auto c = std::make_shared<Concurroid>();
  c->name = "T";
  c->labels = {tb};
  c->coherent = [snt](const State& w) { return coherent(w, snt); };
  c->sample_state = [snt](Gen& g) -> std::optional<State> { return sample(g, snt); };
  c->internals.push_back(identity_transition(c->sample_state));
  c->internals.push_back(pop_transition(snt));
  c->externals.push_back(ExternalPair{push_transition(snt), std::nullopt});
  s.concurroid = c;
  s.entangled = entangle(private_heap().concurroid, s.concurroid);
  ConcurroidPtr t = s.concurroid;
  ConcurroidPtr pt = s.entangled;

  AtomicAction rs;
  rs.name = "readSentinel";
  rs.concurroid = t;
  rs.result_type = ResultType::Value;
  rs.safe = [snt](const State& w, const Args& args) { return args.empty() && coherent(w, snt); };
  rs.step = [snt](const State& w, const Args&, Allocator&) { return outcome(w, Value::loc(top(w, snt)), "id"); };
  rs.claimed = {"id"};
  rs.erasure = [snt](const Args&) { return prim_read(snt); };
  rs.sample = [snt](Gen& g) -> std::optional<std::pair<State, Args>> { return std::pair{sample(g, snt), Args{}}; };
  s.read_sentinel = make_action(std::move(rs));

  AtomicAction rn;
  rn.name = "readNode";
  rn.concurroid = t;
  rn.result_type = ResultType::Pair;
  rn.safe = [snt](const State& w, const Args& args) {
    if (args.size() != 1 || !args[0].is(Value::Kind::Loc) || !coherent(w, snt)) return false;
    Loc p = args[0].as_loc();
    return p != snt && w.joint.at(tb).heap.count(p) != 0;
  };
  rn.step = [](const State& w, const Args& args, Allocator&) {
    return outcome(w, w.joint.at(tb).heap.at(args[0].as_loc()), "id");
  };
  rn.claimed = {"id"};
  rn.erasure = [](const Args& args) { return prim_read(args.at(0).as_loc()); };
  rn.sample = [snt](Gen& g) -> std::optional<std::pair<State, Args>> {
    State w = sample(g, snt);
    auto nodes = nodes_of(w, snt);
    Loc p = nodes.empty() || g.chance(1, 6) ? g.fresh_loc() : nodes[g.below(nodes.size())];
    return std::pair{w, Args{Value::loc(p)}};
  };
  s.read_node = make_action(std::move(rn));

  AtomicAction tp;
  tp.name = "tryPop";
  tp.concurroid = t;
  tp.result_type = ResultType::Bool;
  tp.safe = [snt](const State& w, const Args& args) {
    if (args.size() != 2 || !args[0].is(Value::Kind::Loc) || !args[1].is(Value::Kind::Loc)) return false;
    if (!coherent(w, snt)) return false;
    Loc p = args[0].as_loc();
    if (p.null() || p == snt) return false;
    auto it = w.joint.at(tb).heap.find(p);
    return it != w.joint.at(tb).heap.end() && it->second.at(1) == args[1];
  };
  tp.step = [snt](const State& w, const Args& args, Allocator&) {
    if (top(w, snt) != args[0].as_loc()) return outcome(w, Value::boolean(false), "id");
    auto post = pop_step(w, snt);
    if (!post) throw SafetyFault("tryPop on malformed stack");
    return outcome(*post, Value::boolean(true), "pop");
  };
  tp.claimed = {"id", "pop"};
  tp.erasure = [snt](const Args& args) { return cas(snt, args.at(0), args.at(1)); };
  tp.sample = [snt](Gen& g) -> std::optional<std::pair<State, Args>> {
    State w = sample(g, snt);
    auto nodes = nodes_of(w, snt);
    if (nodes.empty()) return std::nullopt;
    Loc p = !top(w, snt).null() && g.coin() ? top(w, snt) : nodes[g.below(nodes.size())];
    Value next = w.joint.at(tb).heap.at(p).at(1);
    if (g.chance(1, 6)) next = Value::loc(g.fresh_loc());
    return std::pair{w, Args{Value::loc(p), next}};
  };
  s.try_pop = make_action(std::move(tp));

  AtomicAction tpush;
  tpush.name = "tryPush";
  tpush.concurroid = pt;
  tpush.result_type = ResultType::Bool;
  tpush.safe = [pt](const State& w, const Args& args) {
    if (args.size() != 2 || !args[0].is(Value::Kind::Loc) || !args[1].is(Value::Kind::Loc)) return false;
    if (!pt->coherent(w)) return false;
    const Heap& mine = self_heap(w, pv);
    auto it = mine.find(args[1].as_loc());
    return it != mine.end() && is_node(it->second) && it->second.at(1) == args[0];
  };
  tpush.step = [snt](const State& w, const Args& args, Allocator&) {
    if (top(w, snt) != args[0].as_loc()) return outcome(w, Value::boolean(false), "id");
    Loc p = args[1].as_loc();
    Heap mine = self_heap(w, pv);
    Value n = mine.at(p);
    mine.erase(p);
    auto post = push_step(set_self(w, pv, PcmElement(mine)), snt, p, n.at(0));
    if (!post) throw SafetyFault("tryPush on malformed stack");
    return outcome(*post, Value::boolean(true), "tb.push⋈pv.release");
  };
  tpush.claimed = {"id", "tb.push⋈pv.release"};
  tpush.erasure = [snt](const Args& args) { return cas(snt, args.at(0), args.at(1)); };
  tpush.sample = [pt, snt](Gen& g) -> std::optional<std::pair<State, Args>> {
    auto w = pt->sample_state(g);
    if (!w) return std::nullopt;
    Heap mine = self_heap(*w, pv);
    Loc p = g.fresh_loc();
    Loc p1 = g.chance(2, 3) ? top(restrict(*w, {tb}), snt) : Loc{g.fresh_loc()};
    mine[p] = node(Value::nat(g.below(50)), p1);
    return std::pair{set_self(*w, pv, PcmElement(mine)), Args{Value::loc(p1), Value::loc(p)}};
  };
  s.try_push = make_action(std::move(tpush));
  return s;
}

State TreiberStack::initial(const std::vector<Value>& contents, Loc first_node, Heap private_heap) const {
  Heap h;
  Loc next = kNull;
  std::uint64_t id = first_node.id + contents.size();
  for (auto it = contents.rbegin(); it != contents.rend(); ++it) {
    Loc p{--id};
    h[p] = node(*it, next);
    next = p;
  }
  h[snt] = Value::loc(next);
  Value l = Value::list(contents);
  State t = treiber_state(h, make_history(HistKind::Stack), make_history(HistKind::Stack, {{0, Entry{l, l}}}));
  return *merge(private_state(std::move(private_heap)), t);
}

Prog TreiberStack::push(Expr e, std::uint32_t bound) const {
  using namespace prog;
  auto attempt = let(
      inject({labels::tb}, act(read_sentinel)), "p1",
      seq(inject({labels::pv}, write(var("p"), [e](const Env& env) { return node(e(env), env.at("p1").as_loc()); })),
          let(act(try_push, args({var("p1"), var("p")})), "ok",
              ret([](const Env& env) { return env.at("ok").as_bool() ? Value::some(Value::unit()) : Value::none(); }))));
  return let(inject({labels::pv}, alloc()), "p", loop(attempt, bound));
}

Prog TreiberStack::pop(std::uint32_t bound) const {
  using namespace prog;
  auto attempt = let(
      act(read_sentinel), "p",
      if_([](const Env& env) { return env.at("p").as_loc().null(); }, ret_value(Value::some(Value::none())),
          let(act(read_node, args({var("p")})), "n",
              let(act(try_pop, args({var("p"), [](const Env& env) { return env.at("n").at(1); }})), "ok",
                  ret([](const Env& env) {
                    if (!env.at("ok").as_bool()) return Value::none();
                    return Value::some(Value::some(env.at("n").at(0)));
                  })))));
  return loop(attempt, bound);
}

PhiPtr hidden_stack(const TreiberStack& s, const std::vector<Value>& contents) {
  auto phi = std::make_shared<PhiSpec>();
  Loc snt = s.snt;
  phi->name = "stack";
  phi->concurroid = s.concurroid;
  Value l = Value::list(contents);
  phi->g0 = PcmElement(make_history(HistKind::Stack, {{0, Entry{l, l}}}));
  phi->member = [snt](const PcmElement& g, const State& w) {
    if (!g.is_history() || !w.self.count(labels::tb) || w.self.size() != 1) return false;
    if (!(self_of(w, labels::tb) == g) || !is_unit(other_of(w, labels::tb))) return false;
    return stack_invariant(g.history(), joint_of(w, labels::tb).heap, snt);
  };
  phi->install = [snt](const PcmElement& g, const Heap& mine) -> std::optional<std::pair<Heap, State>> {
    if (!g.is_history() || !mine.count(snt)) return std::nullopt;
    std::set<Loc> reached;
    auto l = read_stack(mine, snt, &reached);
    if (!l || *l != stack_contents(g.history())) return std::nullopt;
    reached.insert(snt);
    Heap k = heap_restrict(mine, reached);
    return std::pair{k, treiber_state(k, g.history(), make_history(HistKind::Stack))};
  };
  phi->abstraction = [](const State& w) -> std::optional<PcmElement> {
    if (!w.self.count(labels::tb) || !is_unit(other_of(w, labels::tb))) return std::nullopt;
    return self_of(w, labels::tb);
  };
  return phi;
}

}  // namespace histrio
