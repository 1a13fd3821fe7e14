#include "histrio/structures/flat_combiner.hpp"

#include "histrio/structures/private_heap.hpp"

namespace histrio {

namespace {

constexpr Label pv = labels::pv;

struct Layout {
  Label label;
  Loc lk, ap, snt_r;
  std::size_t n;
  std::shared_ptr<const std::map<std::string, FcFunction>> functions;

  Loc slot(std::size_t i) const { return Loc{ap.id + i}; }
};

struct Parts {
  Triple self, other;
  History gs, go;
  bool locked = false;
  std::vector<Value> stat;
  std::vector<History> gp;
  Heap hr;
};

bool stat_ok(const Value& v) { return v.is(Value::Kind::Init) || v.is(Value::Kind::Req) || v.is(Value::Kind::Resp); }

std::optional<Parts> parts(const State& w, const Layout& L) {
  if (labels_of(w) != std::set<Label>{L.label} || !validate(w)) return std::nullopt;
  const auto& s = w.self.at(L.label);
  const auto& o = w.other.at(L.label);
  if (!s.is_triple() || !o.is_triple() || !s.aux().is_history() || !o.aux().is_history()) return std::nullopt;
  if (s.aux().history().kind != HistKind::Stack) return std::nullopt;
  Parts p{s.triple(), o.triple(), s.aux().history(), o.aux().history(), false, {}, {}, {}};
  const Joint& j = w.joint.at(L.label);
  if (j.aux.size() != L.n) return std::nullopt;
  Heap h = j.heap;
  auto b = h.find(L.lk);
  if (b == h.end() || !b->second.is(Value::Kind::Bool)) return std::nullopt;
  p.locked = b->second.as_bool();
  h.erase(b);
  for (std::size_t i = 0; i < L.n; ++i) {
    auto it = h.find(L.slot(i));
    if (it == h.end() || !stat_ok(it->second)) return std::nullopt;
    p.stat.push_back(it->second);
    h.erase(it);
    if (!j.aux[i].is_history() || j.aux[i].history().kind != HistKind::Stack) return std::nullopt;
    p.gp.push_back(j.aux[i].history());
  }
  p.hr = std::move(h);
  return p;
}

std::optional<History> g_all(const Parts& p) {
  auto g = history_join(p.gs, p.go);
  for (const auto& x : p.gp) {
    if (!g) return std::nullopt;
    g = history_join(*g, x);
  }
  return g;
}

bool coherent(const State& w, const Layout& L) {
  auto p = parts(w, L);
  if (!p) return false;
  for (ThreadId t : p->self.ids) {
    if (t >= L.n) return false;
  }
  for (ThreadId t : p->other.ids) {
    if (t >= L.n) return false;
  }
  for (std::size_t i = 0; i < L.n; ++i) {
    if (!p->gp[i].empty() && !p->stat[i].is(Value::Kind::Resp)) return false;
  }
  auto g = g_all(*p);
  if (!g) return false;
  bool owned = p->self.mutex == Mutex::Own || p->other.mutex == Mutex::Own;
  if (p->locked) return p->hr.empty() && owned;
  return !owned && stack_invariant(*g, p->hr, L.snt_r);
}

PcmElement side(const IdSet& ids, Mutex m, History g) { return PcmElement(ids, m, PcmElement(std::move(g))); }

State assemble(const Layout& L, const Parts& p) {
  Heap h = p.hr;
  h[L.lk] = Value::boolean(p.locked);
  std::vector<PcmElement> aux;
  for (std::size_t i = 0; i < L.n; ++i) {
    h[L.slot(i)] = p.stat[i];
    aux.emplace_back(p.gp[i]);
  }
  State w;
  w.self[L.label] = side(p.self.ids, p.self.mutex, p.gs);
  w.joint[L.label] = Joint{std::move(h), std::move(aux)};
  w.other[L.label] = side(p.other.ids, p.other.mutex, p.go);
  return w;
}

History delta_to(const History& all, const std::vector<Value>& contents) {
  std::vector<Value> last = stack_contents(all);
  if (last == contents) return make_history(HistKind::Stack);
  return singleton(HistKind::Stack, fresh(all), Value::list(last), Value::list(contents));
}

// holder: 0 free, 1 self, 2 other. With `resource`, h_r is that heap and the history reaches it.
std::optional<State> sample(Gen& g, const Layout& L, int holder, const Heap* resource = nullptr) {
  History tau;
  if (resource) {
    auto contents = read_stack(*resource, L.snt_r);
    if (!contents) return std::nullopt;
    tau = history_reaching(*contents);
  } else {
    std::uint64_t next_elem = 1;
    tau = random_stack_history(g, {}, g.below(4), next_elem);
  }
  Parts p;
  p.locked = holder != 0;
  p.self.mutex = holder == 1 ? Mutex::Own : Mutex::NotOwn;
  p.other.mutex = holder == 2 ? Mutex::Own : Mutex::NotOwn;
  p.gs = make_history(HistKind::Stack);
  p.go = make_history(HistKind::Stack);
  for (std::size_t i = 0; i < L.n; ++i) {
    (g.coin() ? p.self.ids : p.other.ids).insert(static_cast<ThreadId>(i));
    switch (g.below(3)) {
      case 0: p.stat.push_back(Value::init()); break;
      case 1: p.stat.push_back(Value::req("push", Value::nat(20 + g.below(10)))); break;
      default: p.stat.push_back(Value::resp(Value::unit())); break;
    }
    p.gp.push_back(make_history(HistKind::Stack));
  }
  for (const auto& [t, e] : tau.entries) {
    std::size_t k = g.below(L.n + 2);
    History* target = k == 0 ? &p.gs : k == 1 ? &p.go : &p.gp[k - 2];
    if (k >= 2 && !p.stat[k - 2].is(Value::Kind::Resp)) target = &p.go;
    target->entries[t] = e;
  }
  if (!p.locked) p.hr = resource ? *resource : build_stack(g, L.snt_r, stack_contents(tau), g.below(2));
  return assemble(L, p);
}

bool same_except_stat(const Parts& a, const Parts& b, bool gp_too = true) {
  return a.locked == b.locked && a.hr == b.hr && (!gp_too || a.gp == b.gp) && a.stat.size() == b.stat.size();
}

std::optional<std::size_t> single_diff(const Parts& a, const Parts& b) {
  std::optional<std::size_t> at;
  for (std::size_t i = 0; i < a.stat.size(); ++i) {
    if (a.stat[i] != b.stat[i]) {
      if (at) return std::nullopt;
      at = i;
    }
  }
  return at;
}

using Member2 = std::function<bool(const Parts&, const Parts&, const State&, const State&)>;

Transition fc_internal(const Layout& L, std::string name, Member2 m,
                       std::function<std::optional<Sampled>(Gen&)> samp) {
  return internal_transition(
      std::move(name),
      [L, m](const State& pre, const State& post) {
        if (!coherent(pre, L) || !coherent(post, L) || !(pre.other == post.other)) return false;
        return m(*parts(pre, L), *parts(post, L), pre, post);
      },
      std::move(samp));
}

Transition req_transition(const Layout& L) {
  auto m = [](const Parts& a, const Parts& b, const State& pre, const State& post) {
    if (!(pre.self == post.self) || !same_except_stat(a, b)) return false;
    auto i = single_diff(a, b);
    return i && a.self.ids.count(static_cast<ThreadId>(*i)) && a.stat[*i].is(Value::Kind::Init) &&
           b.stat[*i].is(Value::Kind::Req);
  };
  auto samp = [L](Gen& g) -> std::optional<Sampled> {
    auto pre = sample(g, L, static_cast<int>(g.below(3)));
    if (!pre) return std::nullopt;
    Parts p = *parts(*pre, L);
    for (ThreadId i : p.self.ids) {
      if (!p.stat[i].is(Value::Kind::Init)) continue;
      Parts q = p;
      q.stat[i] = Value::req("push", Value::nat(30 + g.below(10)));
      return Sampled{{}, *pre, assemble(L, q)};
    }
    return std::nullopt;
  };
  return fc_internal(L, "req", m, samp);
}

Transition help_transition(const Layout& L) {
  auto fns = L.functions;
  auto m = [fns](const Parts& a, const Parts& b, const State& pre, const State& post) {
    if (!(pre.self == post.self) || !same_except_stat(a, b, false) || a.self.mutex != Mutex::Own) return false;
    auto i = single_diff(a, b);
    if (!i || !a.stat[*i].is(Value::Kind::Req) || !b.stat[*i].is(Value::Kind::Resp)) return false;
    for (std::size_t k = 0; k < a.gp.size(); ++k) {
      if (k != *i && !(a.gp[k] == b.gp[k])) return false;
    }
    auto f = fns->find(a.stat[*i].fn());
    auto g = g_all(a);
    return a.gp[*i].empty() && f != fns->end() && g &&
           f->second.spec(a.stat[*i].at(0), b.stat[*i].at(0), *g, b.gp[*i]);
  };
  auto samp = [L](Gen& g) -> std::optional<Sampled> {
    auto pre = sample(g, L, 1);
    if (!pre) return std::nullopt;
    Parts p = *parts(*pre, L);
    std::size_t i = g.below(L.n);
    Value x = Value::nat(40 + g.below(10));
    p.stat[i] = Value::req("push", x);
    if (!p.gp[i].empty()) {
      auto moved = history_join(p.go, p.gp[i]);
      p.go = *moved;
      p.gp[i] = make_history(HistKind::Stack);
    }
    State before = assemble(L, p);
    auto all = g_all(p);
    std::vector<Value> next = stack_contents(*all);
    next.insert(next.begin(), x);
    Parts q = p;
    q.stat[i] = Value::resp(Value::unit());
    q.gp[i] = delta_to(*all, next);
    return Sampled{{}, before, assemble(L, q)};
  };
  return fc_internal(L, "help", m, samp);
}

Transition coll_transition(const Layout& L) {
  auto m = [](const Parts& a, const Parts& b, const State&, const State&) {
    if (a.locked != b.locked || !(a.hr == b.hr)) return false;
    if (a.self.ids != b.self.ids || a.self.mutex != b.self.mutex) return false;
    auto i = single_diff(a, b);
    if (!i || !a.self.ids.count(static_cast<ThreadId>(*i))) return false;
    if (!a.stat[*i].is(Value::Kind::Resp) || !b.stat[*i].is(Value::Kind::Init) || !b.gp[*i].empty()) return false;
    for (std::size_t k = 0; k < a.gp.size(); ++k) {
      if (k != *i && !(a.gp[k] == b.gp[k])) return false;
    }
    auto grown = history_join(a.gs, a.gp[*i]);
    return grown && *grown == b.gs;
  };
  auto samp = [L](Gen& g) -> std::optional<Sampled> {
    auto pre = sample(g, L, static_cast<int>(g.below(3)));
    if (!pre) return std::nullopt;
    Parts p = *parts(*pre, L);
    for (ThreadId i : p.self.ids) {
      if (!p.stat[i].is(Value::Kind::Resp)) continue;
      Parts q = p;
      q.stat[i] = Value::init();
      q.gs = *history_join(p.gs, p.gp[i]);
      q.gp[i] = make_history(HistKind::Stack);
      return Sampled{{}, *pre, assemble(L, q)};
    }
    return std::nullopt;
  };
  return fc_internal(L, "coll", m, samp);
}

bool same_slots(const Parts& a, const Parts& b) {
  return a.stat == b.stat && a.gp == b.gp && a.self.ids == b.self.ids && a.gs == b.gs;
}

Transition unlock_transition(const Layout& L) {
  Transition t;
  t.name = "fc.unlock";
  t.kind = TransitionKind::Acquire;
  t.member = [L](const Heap& h, const State& pre, const State& post) {
    if (!coherent(pre, L) || !coherent(post, L) || !(pre.other == post.other)) return false;
    Parts a = *parts(pre, L), b = *parts(post, L);
    return same_slots(a, b) && a.locked && !b.locked && a.self.mutex == Mutex::Own &&
           b.self.mutex == Mutex::NotOwn && a.hr.empty() && b.hr == h;
  };
  t.sample = [L](Gen& g, const Heap* want) -> std::optional<Sampled> {
    Heap h;
    if (want) {
      h = *want;
    } else {
      std::uint64_t next_elem = 1;
      History tau = random_stack_history(g, {}, g.below(4), next_elem);
      h = build_stack(g, L.snt_r, stack_contents(tau), g.below(2));
    }
    auto pre = sample(g, L, 1, &h);
    if (!pre) return std::nullopt;
    Parts q = *parts(*pre, L);
    q.locked = false;
    q.self.mutex = Mutex::NotOwn;
    q.hr = h;
    State post = assemble(L, q);
    if (!coherent(post, L)) return std::nullopt;
    return Sampled{h, *pre, post};
  };
  return t;
}

Transition lock_transition(const Layout& L) {
  Transition t;
  t.name = "fc.lock";
  t.kind = TransitionKind::Release;
  t.member = [L](const Heap& h, const State& pre, const State& post) {
    if (!coherent(pre, L) || !coherent(post, L) || !(pre.other == post.other)) return false;
    Parts a = *parts(pre, L), b = *parts(post, L);
    return same_slots(a, b) && !a.locked && b.locked && a.self.mutex == Mutex::NotOwn &&
           b.self.mutex == Mutex::Own && b.hr.empty() && a.hr == h;
  };
  t.sample = [L](Gen& g, const Heap* want) -> std::optional<Sampled> {
    auto pre = sample(g, L, 0, want);
    if (!pre) return std::nullopt;
    Parts p = *parts(*pre, L);
    Parts q = p;
    q.locked = true;
    q.self.mutex = Mutex::Own;
    q.hr.clear();
    return Sampled{p.hr, *pre, assemble(L, q)};
  };
  return t;
}

std::optional<std::size_t> nat_arg(const Args& args, std::size_t k, std::size_t n) {
  if (args.size() <= k || !args[k].is(Value::Kind::Nat) || args[k].as_nat() >= n) return std::nullopt;
  return static_cast<std::size_t>(args[k].as_nat());
}

// The sentinel and the nodes reachable from it.
Heap resource_part(const Heap& h, Loc snt) {
  std::set<Loc> reached;
  if (!read_stack(h, snt, &reached)) return {};
  reached.insert(snt);
  return heap_restrict(h, reached);
}

Prog push_program(Loc snt) {
  using namespace prog;
  return let(alloc(), "fc_p",
             let(read(lit(Value::loc(snt))), "fc_top",
                 seq({write(var("fc_p"), [](const Env& e) { return node(e.at("fc_arg"), e.at("fc_top").as_loc()); }),
                      write(lit(Value::loc(snt)), var("fc_p")), ret_unit()})));
}

Prog pop_program(Loc snt) {
  using namespace prog;
  return let(read(lit(Value::loc(snt))), "fc_top",
             if_([](const Env& e) { return e.at("fc_top").as_loc().null(); }, ret_value(Value::none()),
                 let(read(var("fc_top")), "fc_node",
                     seq({write(lit(Value::loc(snt)), [](const Env& e) { return e.at("fc_node").at(1); }),
                          act(private_heap().dealloc, args({var("fc_top")})),
                          ret([](const Env& e) { return Value::some(e.at("fc_node").at(0)); })}))));
}

}  // namespace

bool fspec_push(const Value& x, const Value& result, const History& g, const History& delta) {
  if (result != Value::unit() || g.empty()) return false;
  std::vector<Value> l = stack_contents(g);
  std::vector<Value> l2 = l;
  l2.insert(l2.begin(), x);
  return delta == singleton(HistKind::Stack, fresh(g), Value::list(l), Value::list(l2));
}

bool fspec_pop(const Value&, const Value& result, const History& g, const History& delta) {
  if (g.empty()) return false;
  std::vector<Value> l = stack_contents(g);
  if (l.empty()) return result == Value::none() && delta.empty();
  std::vector<Value> l2(l.begin() + 1, l.end());
  return result == Value::some(l.front()) &&
         delta == singleton(HistKind::Stack, fresh(g), Value::list(l), Value::list(l2));
}

FlatCombiner make_flat_combiner(std::size_t n, Loc lk, Loc ap, Loc snt_r) {
  FlatCombiner fc;
  fc.lk = lk;
  fc.ap = ap;
  fc.snt_r = snt_r;
  fc.n = n;
  fc.functions["push"] = FcFunction{"push", fspec_push, push_program(snt_r)};
  fc.functions["pop"] = FcFunction{"pop", fspec_pop, pop_program(snt_r)};
  auto fns = std::make_shared<const std::map<std::string, FcFunction>>(fc.functions);
  Layout L{fc.label, lk, ap, snt_r, n, fns};

  auto c = std::make_shared<Concurroid>();
  c->name = "F";
  c->labels = {L.label};
  c->coherent = [L](const State& w) { return coherent(w, L); };
  c->sample_state = [L](Gen& g) { return sample(g, L, static_cast<int>(g.below(3))); };
  c->internals.push_back(identity_transition(c->sample_state));
  c->internals.push_back(req_transition(L));
  c->internals.push_back(help_transition(L));
  c->internals.push_back(coll_transition(L));
  c->externals.push_back(ExternalPair{unlock_transition(L), lock_transition(L)});
  fc.concurroid = c;
  fc.entangled = entangle(private_heap().concurroid, fc.concurroid);
  ConcurroidPtr pf = fc.entangled;

  auto view = [L](const State& w) { return *parts(restrict(w, {L.label}), L); };
  auto sample_pf = [pf](Gen& g) { return pf->sample_state(g); };

  AtomicAction rq;
  rq.name = "reqHelp";
  rq.concurroid = pf;
  rq.result_type = ResultType::Unit;
  rq.safe = [pf, L, view, fns](const State& w, const Args& args) {
    auto i = nat_arg(args, 0, L.n);
    if (!i || args.size() != 2 || !args[1].is(Value::Kind::Req) || !pf->coherent(w)) return false;
    Parts p = view(w);
    return p.self.ids.count(static_cast<ThreadId>(*i)) && p.stat[*i].is(Value::Kind::Init) &&
           fns->count(args[1].fn());
  };
  rq.step = [L, view](const State& w, const Args& args, Allocator&) {
    Parts p = view(w);
    p.stat[args[0].as_nat()] = args[1];
    return outcome(*merge(restrict(w, {pv}), assemble(L, p)), Value::unit(), "req");
  };
  rq.claimed = {"req"};
  rq.erasure = [L](const Args& args) { return prim_write(L.slot(args.at(0).as_nat()), args.at(1)); };
  rq.sample = [sample_pf, L](Gen& g) -> std::optional<std::pair<State, Args>> {
    auto w = sample_pf(g);
    if (!w) return std::nullopt;
    return std::pair{*w, Args{Value::nat(g.below(L.n)), Value::req("push", Value::nat(g.below(9)))}};
  };
  fc.req_help = make_action(std::move(rq));

  AtomicAction rr;
  rr.name = "readReq";
  rr.concurroid = pf;
  rr.result_type = ResultType::Value;
  rr.safe = [pf, L](const State& w, const Args& args) {
    return args.size() == 1 && nat_arg(args, 0, L.n) && pf->coherent(w);
  };
  rr.step = [L](const State& w, const Args& args, Allocator&) {
    return outcome(w, w.joint.at(L.label).heap.at(L.slot(args[0].as_nat())), "id");
  };
  rr.claimed = {"id"};
  rr.erasure = [L](const Args& args) { return prim_read(L.slot(args.at(0).as_nat())); };
  rr.sample = [sample_pf, L](Gen& g) -> std::optional<std::pair<State, Args>> {
    auto w = sample_pf(g);
    if (!w) return std::nullopt;
    return std::pair{*w, Args{Value::nat(g.below(L.n + 1))}};
  };
  fc.read_req = make_action(std::move(rr));

  AtomicAction tl;
  tl.name = "tryLock";
  tl.concurroid = pf;
  tl.result_type = ResultType::Bool;
  tl.safe = [pf](const State& w, const Args& args) { return args.empty() && pf->coherent(w); };
  tl.step = [L, view](const State& w, const Args&, Allocator&) {
    Parts p = view(w);
    if (p.locked) return outcome(w, Value::boolean(false), "id");
    auto mine = heap_union(self_heap(w, pv), p.hr);
    if (!mine) throw SafetyFault("resource overlaps private heap");
    p.locked = true;
    p.self.mutex = Mutex::Own;
    p.hr.clear();
    return outcome(*merge(private_state(*mine, w.other.at(pv).heap()), assemble(L, p)), Value::boolean(true),
                   "pv.acquire⋈fc.lock");
  };
  tl.claimed = {"id", "pv.acquire⋈fc.lock"};
  tl.erasure = [lk](const Args&) { return cas(lk, Value::boolean(false), Value::boolean(true)); };
  tl.sample = [sample_pf](Gen& g) -> std::optional<std::pair<State, Args>> {
    auto w = sample_pf(g);
    if (!w) return std::nullopt;
    return std::pair{*w, Args{}};
  };
  fc.try_lock = make_action(std::move(tl));

  // A P ⋊ F state whose caller holds the lock and the resource heap privately.
  auto sample_combiner = [L](Gen& g) -> std::optional<State> {
    auto f = sample(g, L, 1);
    if (!f) return std::nullopt;
    Parts p = *parts(*f, L);
    auto all = g_all(p);
    Heap mine = build_stack(g, L.snt_r, stack_contents(*all), g.below(2));
    return merge(private_state(mine, random_heap(g, 1)), *f);
  };

  AtomicAction dh;
  dh.name = "doHelp";
  dh.concurroid = pf;
  dh.result_type = ResultType::Unit;
  dh.safe = [pf, L, view, fns](const State& w, const Args& args) {
    auto i = nat_arg(args, 0, L.n);
    if (!i || args.size() != 2 || !pf->coherent(w)) return false;
    Parts p = view(w);
    if (p.self.mutex != Mutex::Own || !p.stat[*i].is(Value::Kind::Req) || !fns->count(p.stat[*i].fn())) return false;
    auto contents = read_stack(self_heap(w, pv), L.snt_r);
    auto all = g_all(p);
    if (!contents || !all) return false;
    return fns->at(p.stat[*i].fn()).spec(p.stat[*i].at(0), args[1], *all, delta_to(*all, *contents));
  };
  dh.step = [L, view](const State& w, const Args& args, Allocator&) {
    Parts p = view(w);
    std::size_t i = args[0].as_nat();
    auto all = g_all(p);
    p.stat[i] = Value::resp(args[1]);
    p.gp[i] = delta_to(*all, *read_stack(self_heap(w, pv), L.snt_r));
    return outcome(*merge(restrict(w, {pv}), assemble(L, p)), Value::unit(), "help");
  };
  dh.claimed = {"help"};
  dh.erasure = [L](const Args& args) { return prim_write(L.slot(args.at(0).as_nat()), Value::resp(args.at(1))); };
  dh.sample = [sample_combiner, L, view](Gen& g) -> std::optional<std::pair<State, Args>> {
    auto w = sample_combiner(g);
    if (!w) return std::nullopt;
    Parts p = view(*w);
    std::size_t i = g.below(L.n);
    Value x = Value::nat(70 + g.below(9));
    if (!p.stat[i].is(Value::Kind::Req)) {
      if (!p.gp[i].empty()) {
        p.go = *history_join(p.go, p.gp[i]);
        p.gp[i] = make_history(HistKind::Stack);
      }
      p.stat[i] = Value::req("push", x);
    }
    State pre = *merge(restrict(*w, {pv}), assemble(L, p));
    // Run the push on the private copy so the helped result is the one f_spec expects.
    Heap mine = self_heap(pre, pv);
    if (g.chance(4, 5)) {
      Loc q = g.fresh_loc();
      mine[q] = node(p.stat[i].at(0), mine.at(L.snt_r).as_loc());
      mine[L.snt_r] = Value::loc(q);
    }
    pre = set_self(pre, pv, PcmElement(mine));
    return std::pair{pre, Args{Value::nat(i), Value::unit()}};
  };
  fc.do_help = make_action(std::move(dh));

  AtomicAction ul;
  ul.name = "unlock";
  ul.concurroid = pf;
  ul.result_type = ResultType::Unit;
  ul.safe = [pf, L, view](const State& w, const Args& args) {
    if (!args.empty() || !pf->coherent(w)) return false;
    Parts p = view(w);
    auto all = g_all(p);
    return p.self.mutex == Mutex::Own && all && stack_invariant(*all, resource_part(self_heap(w, pv), L.snt_r), L.snt_r);
  };
  ul.step = [L, view](const State& w, const Args&, Allocator&) {
    Parts p = view(w);
    Heap h = resource_part(self_heap(w, pv), L.snt_r);
    p.locked = false;
    p.self.mutex = Mutex::NotOwn;
    p.hr = h;
    return outcome(*merge(private_state(*heap_subtract(self_heap(w, pv), h), w.other.at(pv).heap()), assemble(L, p)),
                   Value::unit(), "fc.unlock⋈pv.release");
  };
  ul.claimed = {"fc.unlock⋈pv.release"};
  ul.erasure = [lk](const Args&) { return prim_write(lk, Value::boolean(false)); };
  ul.sample = [sample_combiner](Gen& g) -> std::optional<std::pair<State, Args>> {
    auto w = sample_combiner(g);
    if (!w) return std::nullopt;
    return std::pair{*w, Args{}};
  };
  fc.unlock = make_action(std::move(ul));

  AtomicAction tc;
  tc.name = "tryCollect";
  tc.concurroid = pf;
  tc.result_type = ResultType::Option;
  tc.safe = [pf, L, view](const State& w, const Args& args) {
    auto i = nat_arg(args, 0, L.n);
    return i && args.size() == 1 && pf->coherent(w) && view(w).self.ids.count(static_cast<ThreadId>(*i));
  };
  tc.step = [L, view](const State& w, const Args& args, Allocator&) {
    Parts p = view(w);
    std::size_t i = args[0].as_nat();
    if (!p.stat[i].is(Value::Kind::Resp)) return outcome(w, Value::none(), "id");
    Value r = p.stat[i].at(0);
    p.stat[i] = Value::init();
    p.gs = *history_join(p.gs, p.gp[i]);
    p.gp[i] = make_history(HistKind::Stack);
    return outcome(*merge(restrict(w, {pv}), assemble(L, p)), Value::some(r), "coll");
  };
  tc.claimed = {"id", "coll"};
  tc.erasure = [L](const Args& args) {
    return prim_rmw(
        L.slot(args.at(0).as_nat()), "collect",
        [](const Value& v) { return v.is(Value::Kind::Resp) ? Value::init() : v; },
        [](const Value& v) { return v.is(Value::Kind::Resp) ? Value::some(v.at(0)) : Value::none(); });
  };
  tc.sample = [sample_pf, L](Gen& g) -> std::optional<std::pair<State, Args>> {
    auto w = sample_pf(g);
    if (!w) return std::nullopt;
    return std::pair{*w, Args{Value::nat(g.below(L.n))}};
  };
  fc.try_collect = make_action(std::move(tc));
  return fc;
}

State FlatCombiner::initial(const std::vector<Value>& contents, Loc first_node) const {
  Heap hr;
  Loc next = kNull;
  std::uint64_t id = first_node.id + contents.size();
  for (auto it = contents.rbegin(); it != contents.rend(); ++it) {
    Loc p{--id};
    hr[p] = node(*it, next);
    next = p;
  }
  hr[snt_r] = Value::loc(next);
  Value l = Value::list(contents);
  Parts p;
  for (std::size_t i = 0; i < n; ++i) {
    p.self.ids.insert(static_cast<ThreadId>(i));
    p.stat.push_back(Value::init());
    p.gp.push_back(make_history(HistKind::Stack));
  }
  p.gs = make_history(HistKind::Stack);
  p.go = make_history(HistKind::Stack, {{0, Entry{l, l}}});
  p.hr = hr;
  Layout L{label, lk, ap, snt_r, n, nullptr};
  return *merge(private_state({}), assemble(L, p));
}

std::optional<FcView> FlatCombiner::inspect(const State& w) const {
  Layout L{label, lk, ap, snt_r, n, nullptr};
  auto p = parts(restrict(w, {label}), L);
  if (!p) return std::nullopt;
  return FcView{p->self.ids, p->self.mutex, p->gs, p->locked, p->stat, g_all(*p)};
}

Prog FlatCombiner::flat_combine(ThreadId tid, const std::string& f, Expr x, std::uint32_t bound) const {
  using namespace prog;
  std::vector<Prog> help_all;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s = "fc_s" + std::to_string(i);
    Prog dispatch = ret_unit();
    for (const auto& [name, fn] : functions) {
      std::string fname = name;
      Prog run = let(ret([s](const Env& e) { return e.at(s).at(0); }), "fc_arg",
                     let(fn.program, "fc_w", act(do_help, args({lit(Value::nat(i)), var("fc_w")}))));
      dispatch = if_([s, fname](const Env& e) { return e.at(s).is(Value::Kind::Req) && e.at(s).fn() == fname; }, run,
                     dispatch);
    }
    help_all.push_back(let(act(read_req, args({lit(Value::nat(i))})), s, dispatch));
  }
  help_all.push_back(act(unlock));
  Prog combine = seq(help_all);
  Prog attempt = let(act(try_lock), "fc_ok",
                     seq(if_([](const Env& e) { return e.at("fc_ok").as_bool(); }, combine, ret_unit()),
                         act(try_collect, args({lit(Value::nat(tid))}))));
  std::string fname = f;
  return seq(act(req_help, args({lit(Value::nat(tid)), [fname, x](const Env& e) { return Value::req(fname, x(e)); }})),
             loop(attempt, bound));
}

}  // namespace histrio
