#include "histrio/structures/pair_snapshot.hpp"

namespace histrio {

namespace {

constexpr Label sp = labels::sp;

struct Cells {
  Value cx, cy;
  std::uint64_t vx = 0, vy = 0;
};

bool cell_ok(const Value& v) { return v.is(Value::Kind::Tuple) && v.size() == 2 && v.at(1).is(Value::Kind::Nat); }

std::optional<Cells> cells(const Heap& h, Loc x, Loc y) {
  if (h.size() != 2 || !h.count(x) || !h.count(y)) return std::nullopt;
  const Value& a = h.at(x);
  const Value& b = h.at(y);
  if (!cell_ok(a) || !cell_ok(b)) return std::nullopt;
  return Cells{a.at(0), b.at(0), a.at(1).as_nat(), b.at(1).as_nat()};
}

Heap make_cells(Loc x, Loc y, const Cells& c) {
  return Heap{{x, Value::pair(c.cx, Value::nat(c.vx))}, {y, Value::pair(c.cy, Value::nat(c.vy))}};
}

bool coherent(const State& w, Loc x, Loc y) {
  if (labels_of(w) != std::set<Label>{sp} || !validate(w)) return false;
  const auto& s = w.self.at(sp);
  const auto& o = w.other.at(sp);
  if (!s.is_history() || !o.is_history() || s.history().kind != HistKind::Pair) return false;
  const Joint& j = w.joint.at(sp);
  auto c = cells(j.heap, x, y);
  if (!c || !j.aux.empty()) return false;
  auto tau = total_history(w, sp);
  if (!tau || !is_complete(*tau) || !is_continuous(*tau) || !snapshot_history_ok(*tau)) return false;
  return *last_post(*tau) == snapshot(c->cx, c->cy, c->vx);
}

State make_state(Loc x, Loc y, const Cells& c, History self, History other) {
  State w;
  w.self[sp] = PcmElement(std::move(self));
  w.joint[sp] = Joint{make_cells(x, y, c), {}};
  w.other[sp] = PcmElement(std::move(other));
  return w;
}

Value letter(Gen& g) { return Value::nat(g.below(4)); }

// Runs k random writes from a fresh initial state and splits the history at random.
State sample(Gen& g, Loc x, Loc y) {
  Cells c{letter(g), letter(g), 0, 0};
  History tau = make_history(HistKind::Pair);
  tau.entries[0] = Entry{snapshot(c.cx, c.cy, 0), snapshot(c.cx, c.cy, 0)};
  std::size_t k = g.below(5);
  for (Timestamp t = 1; t <= k; ++t) {
    Value pre = snapshot(c.cx, c.cy, c.vx);
    if (g.coin()) {
      c.cx = letter(g);
      ++c.vx;
    } else {
      c.cy = letter(g);
      ++c.vy;
    }
    tau.entries[t] = Entry{pre, snapshot(c.cx, c.cy, c.vx)};
  }
  auto [s, o] = random_split(g, PcmElement(tau));
  return make_state(x, y, c, s.history(), o.history());
}

// Expected post-state of wr_x (on_x) or wr_y with new contents c.
std::optional<State> write_step(const State& pre, Loc x, Loc y, bool on_x, const Value& c) {
  auto cur = cells(pre.joint.at(sp).heap, x, y);
  auto tau = total_history(pre, sp);
  if (!cur || !tau) return std::nullopt;
  Cells next = *cur;
  if (on_x) {
    next.cx = c;
    ++next.vx;
  } else {
    next.cy = c;
    ++next.vy;
  }
  History delta = singleton(HistKind::Pair, fresh(*tau), snapshot(cur->cx, cur->cy, cur->vx),
                            snapshot(next.cx, next.cy, next.vx));
  auto self = history_join(self_history(pre, sp), delta);
  if (!self) return std::nullopt;
  State post = set_self(pre, sp, PcmElement(*self));
  return set_joint_heap(post, sp, make_cells(x, y, next));
}

Transition write_transition(Loc x, Loc y, bool on_x) {
  std::string name = on_x ? "wr_x" : "wr_y";
  auto member = [x, y, on_x](const State& pre, const State& post) {
    if (!coherent(pre, x, y) || !(pre.other == post.other)) return false;
    auto c = cells(post.joint.at(sp).heap, x, y);
    if (!c) return false;
    auto expect = write_step(pre, x, y, on_x, on_x ? c->cx : c->cy);
    return expect && *expect == post;
  };
  auto samp = [x, y, on_x](Gen& g) -> std::optional<Sampled> {
    State pre = sample(g, x, y);
    auto post = write_step(pre, x, y, on_x, letter(g));
    if (!post) return std::nullopt;
    return Sampled{{}, pre, *post};
  };
  return internal_transition(name, member, samp);
}

}  // namespace

Value snapshot(Value cx, Value cy, std::uint64_t vx) {
  return Value::tuple({std::move(cx), std::move(cy), Value::nat(vx)});
}

bool snapshot_history_ok(const History& tau) {
  auto ok = [](const Value& s) { return s.is(Value::Kind::Tuple) && s.size() == 3 && s.at(2).is(Value::Kind::Nat); };
  std::map<std::uint64_t, Value> contents;
  std::uint64_t prev = 0;
  bool first = true;
  for (const auto& [t, e] : tau.entries) {
    if (!ok(e.pre) || !ok(e.post)) return false;
    std::uint64_t v = e.post.at(2).as_nat();
    if (!first && v < prev) return false;
    first = false;
    prev = v;
    auto [it, inserted] = contents.emplace(v, e.post.at(0));
    if (!inserted && it->second != e.post.at(0)) return false;
  }
  return true;
}

PairSnapshot make_pair_snapshot(Loc x, Loc y) {
  PairSnapshot s;
  s.x = x;
  s.y = y;
  auto c = std::make_shared<Concurroid>();
  c->name = "S";
  c->labels = {sp};
  c->coherent = [x, y](const State& w) { return coherent(w, x, y); };
  c->sample_state = [x, y](Gen& g) -> std::optional<State> { return sample(g, x, y); };
  c->internals.push_back(identity_transition(c->sample_state));
  c->internals.push_back(write_transition(x, y, true));
  c->internals.push_back(write_transition(x, y, false));
  s.concurroid = c;
  ConcurroidPtr cp = c;

  auto safe_any = [x, y](const State& w, const Args& args) { return args.empty() && coherent(w, x, y); };
  auto safe_write = [x, y](const State& w, const Args& args) { return args.size() == 1 && coherent(w, x, y); };
  auto sample_read = [x, y](Gen& g) -> std::optional<std::pair<State, Args>> { return std::pair{sample(g, x, y), Args{}}; };
  auto sample_write = [x, y](Gen& g) -> std::optional<std::pair<State, Args>> {
    return std::pair{sample(g, x, y), Args{letter(g)}};
  };

  for (bool on_x : {true, false}) {
    Loc at = on_x ? x : y;
    AtomicAction r;
    r.name = on_x ? "readX" : "readY";
    r.concurroid = cp;
    r.result_type = ResultType::Pair;
    r.safe = safe_any;
    r.step = [at](const State& w, const Args&, Allocator&) { return outcome(w, w.joint.at(sp).heap.at(at), "id"); };
    r.claimed = {"id"};
    r.erasure = [at](const Args&) { return prim_read(at); };
    r.sample = sample_read;
    (on_x ? s.read_x : s.read_y) = make_action(std::move(r));

    AtomicAction wr;
    wr.name = on_x ? "writeX" : "writeY";
    wr.concurroid = cp;
    wr.result_type = ResultType::Unit;
    wr.safe = safe_write;
    wr.step = [x, y, on_x](const State& w, const Args& args, Allocator&) {
      auto post = write_step(w, x, y, on_x, args[0]);
      if (!post) throw SafetyFault("write on malformed snapshot state");
      return outcome(*post, Value::unit(), on_x ? "wr_x" : "wr_y");
    };
    wr.claimed = {on_x ? "wr_x" : "wr_y"};
    wr.erasure = [at](const Args& args) {
      Value c = args.at(0);
      return prim_rmw(
          at, "set-bump(" + c.render() + ")",
          [c](const Value& v) { return Value::pair(c, Value::nat(v.at(1).as_nat() + 1)); },
          [](const Value&) { return Value::unit(); });
    };
    wr.sample = sample_write;
    (on_x ? s.write_x : s.write_y) = make_action(std::move(wr));
  }
  return s;
}

State PairSnapshot::initial(Value cx, Value cy) const {
  Value s0 = snapshot(cx, cy, 0);
  History other = make_history(HistKind::Pair, {{0, Entry{s0, s0}}});
  return make_state(x, y, Cells{std::move(cx), std::move(cy), 0, 0}, make_history(HistKind::Pair), other);
}

Prog PairSnapshot::read_pair(std::uint32_t bound) const {
  using namespace prog;
  auto first = [](const char* v, std::size_t i) { return [v, i](const Env& e) { return e.at(v).at(i); }; };
  Prog attempt = let(
      act(read_x), "rx",
      let(act(read_y), "ry",
           let(act(read_x), "rx2",
                ret([first](const Env& e) {
                  if (first("rx", 1)(e) != first("rx2", 1)(e)) return Value::none();
                  return Value::some(Value::pair(first("rx", 0)(e), first("ry", 0)(e)));
                }))));
  return loop(attempt, bound);
}

}  // namespace histrio
