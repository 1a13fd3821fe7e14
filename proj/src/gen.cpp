#include "histrio/gen.hpp"

namespace histrio {

Value random_value(Gen& g) {
  switch (g.below(4)) {
    case 0: return Value::nat(g.below(4));
    case 1: return Value::boolean(g.coin());
    case 2: return Value::pair(Value::nat(g.below(3)), Value::nat(g.below(3)));
    default: return Value::list({Value::nat(g.below(3))});
  }
}

Heap random_heap(Gen& g, std::size_t max_cells, bool fresh_locs) {
  Heap h;
  std::size_t n = g.below(max_cells + 1);
  for (std::size_t i = 0; i < n; ++i) {
    Loc l = fresh_locs ? g.fresh_loc() : Loc{1 + g.below(6)};
    h[l] = random_value(g);
  }
  return h;
}

static Value random_snapshot(Gen& g, HistKind kind) {
  if (kind == HistKind::Pair) return Value::tuple({Value::nat(g.below(3)), Value::nat(g.below(3)), Value::nat(g.below(4))});
  std::vector<Value> items;
  std::size_t n = g.below(3);
  for (std::size_t i = 0; i < n; ++i) items.push_back(Value::nat(g.below(3)));
  return Value::list(std::move(items));
}

History random_history(Gen& g, HistKind kind, std::size_t max_entries) {
  History h = make_history(kind);
  std::size_t n = g.below(max_entries + 1);
  for (std::size_t i = 0; i < n; ++i) {
    h.entries[g.below(8)] = Entry{random_snapshot(g, kind), random_snapshot(g, kind)};
  }
  return h;
}

IdSet random_idset(Gen& g, ThreadId universe) {
  IdSet s;
  for (ThreadId t = 0; t < universe; ++t) {
    if (g.chance(1, 3)) s.insert(t);
  }
  return s;
}

PcmElement random_element_like(Gen& g, const PcmElement& shape) {
  if (shape.is_heap()) return random_heap(g, 3, false);
  if (shape.is_history()) return random_history(g, shape.history().kind, 3);
  if (shape.is_mutex()) return g.coin() ? Mutex::Own : Mutex::NotOwn;
  if (shape.is_idset()) return random_idset(g, 6);
  if (shape.is_triple()) {
    return PcmElement(random_idset(g, 6), g.chance(1, 3) ? Mutex::Own : Mutex::NotOwn,
                      random_element_like(g, shape.aux()));
  }
  return PcmElement();
}

History random_stack_history(Gen& g, std::vector<Value> init, std::size_t ops, std::uint64_t& next_elem) {
  History h = make_history(HistKind::Stack);
  Value cur = Value::list(init);
  h.entries[0] = Entry{cur, cur};
  for (std::size_t t = 1; t <= ops; ++t) {
    std::vector<Value> items = cur.items();
    if (!items.empty() && g.coin()) {
      items.erase(items.begin());
    } else {
      items.insert(items.begin(), Value::nat(next_elem++));
    }
    Value next = Value::list(std::move(items));
    h.entries[t] = Entry{cur, next};
    cur = next;
  }
  return h;
}

std::pair<PcmElement, PcmElement> random_split(Gen& g, const PcmElement& a) {
  if (a.is_heap()) {
    Heap part, rest;
    for (const auto& kv : a.heap()) (g.coin() ? part : rest).insert(kv);
    return {PcmElement(std::move(part)), PcmElement(std::move(rest))};
  }
  if (a.is_history()) {
    History part = make_history(a.history().kind), rest = part;
    for (const auto& kv : a.history().entries) (g.coin() ? part : rest).entries.insert(kv);
    return {PcmElement(std::move(part)), PcmElement(std::move(rest))};
  }
  if (a.is_mutex()) {
    if (a.mutex() == Mutex::NotOwn) return {a, a};
    return g.coin() ? std::pair{a, PcmElement(Mutex::NotOwn)} : std::pair{PcmElement(Mutex::NotOwn), a};
  }
  if (a.is_idset()) {
    IdSet part, rest;
    for (auto t : a.idset()) (g.coin() ? part : rest).insert(t);
    return {PcmElement(std::move(part)), PcmElement(std::move(rest))};
  }
  if (a.is_triple()) {
    const auto& t = a.triple();
    IdSet part, rest;
    for (auto id : t.ids) (g.coin() ? part : rest).insert(id);
    bool own_to_part = g.coin();
    Mutex mp = t.mutex == Mutex::Own && own_to_part ? Mutex::Own : Mutex::NotOwn;
    Mutex mr = t.mutex == Mutex::Own && !own_to_part ? Mutex::Own : Mutex::NotOwn;
    auto [gp, gr] = random_split(g, *t.aux);
    return {PcmElement(std::move(part), mp, std::move(gp)), PcmElement(std::move(rest), mr, std::move(gr))};
  }
  return {a, a};
}

std::pair<PcmMap, PcmMap> random_split(Gen& g, const PcmMap& m) {
  PcmMap part, rest;
  for (const auto& [l, x] : m) {
    auto [p, r] = random_split(g, x);
    part.emplace(l, std::move(p));
    rest.emplace(l, std::move(r));
  }
  return {std::move(part), std::move(rest)};
}

}  // namespace histrio
