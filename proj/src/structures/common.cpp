#include "histrio/structures/common.hpp"

namespace histrio {

ActionPtr make_action(AtomicAction a) {
  auto safe = a.safe;
  auto inner = a.step;
  std::string name = a.name;
  a.step = [safe, inner, name](const State& w, const Args& args, Allocator& alloc) {
    if (!safe(w, args)) throw SafetyFault(name + " stepped from an unsafe state");
    return inner(w, args, alloc);
  };
  return std::make_shared<const AtomicAction>(std::move(a));
}

StepOutcome outcome(State post, Value result, std::string transition, Heap exchanged) {
  return StepOutcome{std::move(post), std::move(result), std::move(transition), std::move(exchanged)};
}

static const History* history_in(const PcmElement& e) {
  if (e.is_history()) return &e.history();
  if (e.is_triple() && e.aux().is_history()) return &e.aux().history();
  return nullptr;
}

std::optional<History> total_history(const State& w, Label l) {
  auto s = w.self.find(l);
  auto o = w.other.find(l);
  if (s == w.self.end() || o == w.other.end()) return std::nullopt;
  const History* a = history_in(s->second);
  const History* b = history_in(o->second);
  if (!a || !b || a->kind != b->kind) return std::nullopt;
  return history_join(*a, *b);
}

const History& self_history(const State& w, Label l) {
  const History* h = history_in(self_of(w, l));
  if (!h) throw PcmUsageError("label " + label_name(l) + " carries no history");
  return *h;
}

const Heap& self_heap(const State& w, Label l) { return self_of(w, l).heap(); }

State set_self(State w, Label l, PcmElement e) {
  w.self[l] = std::move(e);
  return w;
}

State set_joint_heap(State w, Label l, Heap h) {
  w.joint[l].heap = std::move(h);
  return w;
}

History singleton(HistKind kind, Timestamp t, Value pre, Value post) {
  return make_history(kind, {{t, Entry{std::move(pre), std::move(post)}}});
}

bool is_node(const Value& v) {
  return v.is(Value::Kind::Tuple) && v.size() == 2 && v.at(1).is(Value::Kind::Loc);
}

Value node(Value e, Loc next) { return Value::pair(std::move(e), Value::loc(next)); }

std::optional<std::vector<Value>> read_stack(const Heap& h, Loc snt, std::set<Loc>* reached) {
  auto s = h.find(snt);
  if (s == h.end() || !s->second.is(Value::Kind::Loc)) return std::nullopt;
  std::vector<Value> out;
  std::set<Loc> seen;
  Loc p = s->second.as_loc();
  while (!p.null()) {
    if (!seen.insert(p).second) return std::nullopt;
    auto it = h.find(p);
    if (it == h.end() || !is_node(it->second)) return std::nullopt;
    out.push_back(it->second.at(0));
    p = it->second.at(1).as_loc();
  }
  if (reached) *reached = std::move(seen);
  return out;
}

Value list_value(const std::vector<Value>& items) { return Value::list(items); }

std::vector<Value> stack_contents(const History& tau) {
  auto last = last_post(tau);
  if (!last || !last->is(Value::Kind::List)) return {};
  return last->items();
}

bool stack_invariant(const History& tau, const Heap& h, Loc snt) {
  if (!is_complete(tau) || !is_continuous(tau) || !is_stacklike(tau)) return false;
  auto l = read_stack(h, snt);
  if (!l || Value::list(*l) != *last_post(tau)) return false;
  for (const auto& [loc, v] : h) {
    if (loc != snt && !is_node(v)) return false;
  }
  return true;
}

Heap build_stack(Gen& g, Loc snt, const std::vector<Value>& contents, std::size_t garbage) {
  Heap h;
  Loc next = kNull;
  for (auto it = contents.rbegin(); it != contents.rend(); ++it) {
    Loc p = g.fresh_loc();
    h[p] = node(*it, next);
    next = p;
  }
  h[snt] = Value::loc(next);
  for (std::size_t i = 0; i < garbage; ++i) h[g.fresh_loc()] = node(Value::nat(900 + g.below(50)), g.fresh_loc());
  return h;
}

History history_reaching(const std::vector<Value>& contents) {
  History tau = make_history(HistKind::Stack);
  std::vector<Value> cur;
  tau.entries[0] = Entry{Value::list({}), Value::list({})};
  Timestamp t = 1;
  for (auto it = contents.rbegin(); it != contents.rend(); ++it) {
    std::vector<Value> next = cur;
    next.insert(next.begin(), *it);
    tau.entries[t++] = Entry{Value::list(cur), Value::list(next)};
    cur = std::move(next);
  }
  return tau;
}

}  // namespace histrio
