#include "histrio/state.hpp"

namespace histrio {

std::set<Label> labels_of(const State& w) {
  std::set<Label> out;
  for (const auto& kv : w.self) out.insert(kv.first);
  for (const auto& kv : w.joint) out.insert(kv.first);
  for (const auto& kv : w.other) out.insert(kv.first);
  return out;
}

static bool same_domains(const State& w) {
  if (w.self.size() != w.joint.size() || w.self.size() != w.other.size()) return false;
  auto j = w.joint.begin();
  auto o = w.other.begin();
  for (const auto& kv : w.self) {
    if (j->first != kv.first || o->first != kv.first) return false;
    ++j;
    ++o;
  }
  return true;
}

std::optional<Heap> flatten(const State& w) {
  Heap out;
  auto add = [&](const Heap& h) {
    for (const auto& kv : h) {
      if (!out.insert(kv).second) return false;
    }
    return true;
  };
  for (const auto& kv : w.self) {
    if (kv.second.is_heap() && !add(kv.second.heap())) return std::nullopt;
  }
  for (const auto& kv : w.joint) {
    if (!add(kv.second.heap)) return std::nullopt;
  }
  for (const auto& kv : w.other) {
    if (kv.second.is_heap() && !add(kv.second.heap())) return std::nullopt;
  }
  return out;
}

bool validate(const State& w) {
  if (!same_domains(w)) return false;
  try {
    if (!map_pointwise_join(w.self, w.other)) return false;
  } catch (const PcmUsageError&) {
    return false;
  }
  return flatten(w).has_value();
}

State transpose(const State& w) { return State{w.other, w.joint, w.self}; }

std::optional<State> realign_acquire(const State& w, const PcmMap& t) {
  auto s = map_pointwise_join(t, w.self);
  if (!s) return std::nullopt;
  return State{std::move(*s), w.joint, w.other};
}

std::optional<State> realign_release(const State& w, const PcmMap& t) {
  auto o = map_pointwise_join(t, w.other);
  if (!o) return std::nullopt;
  return State{w.self, w.joint, std::move(*o)};
}

std::pair<State, State> subjective_split(const State& w, const PcmMap& a, const PcmMap& b) {
  auto ab = map_pointwise_join(a, b);
  if (!ab || !(*ab == w.self)) throw StateError("split does not decompose self: " + render(w.self));
  auto o1 = map_pointwise_join(b, w.other);
  auto o2 = map_pointwise_join(a, w.other);
  if (!o1 || !o2) throw StateError("split parts incompatible with other");
  return {State{a, w.joint, std::move(*o1)}, State{b, w.joint, std::move(*o2)}};
}

State subjective_join(const State& c1, const State& c2) {
  if (!(c1.joint == c2.joint)) throw StateError("sibling views disagree on joint");
  auto c = map_subtract(c1.other, c2.self);
  if (!c) throw StateError("no common other: sibling self not contained in other");
  auto back = map_pointwise_join(c1.self, *c);
  if (!back || !(*back == c2.other)) throw StateError("no common other for sibling views");
  auto self = map_pointwise_join(c1.self, c2.self);
  if (!self) throw StateError("sibling selves incompatible");
  return State{std::move(*self), c1.joint, std::move(*c)};
}

PcmMap restrict(const PcmMap& m, const std::set<Label>& keep) {
  PcmMap out;
  for (const auto& kv : m) {
    if (keep.count(kv.first)) out.insert(kv);
  }
  return out;
}

State restrict(const State& w, const std::set<Label>& keep) {
  State out;
  out.self = restrict(w.self, keep);
  out.other = restrict(w.other, keep);
  for (const auto& kv : w.joint) {
    if (keep.count(kv.first)) out.joint.insert(kv);
  }
  return out;
}

std::optional<State> merge(const State& a, const State& b) {
  auto s = map_disjoint_union(a.self, b.self);
  auto j = map_disjoint_union(a.joint, b.joint);
  auto o = map_disjoint_union(a.other, b.other);
  if (!s || !j || !o) return std::nullopt;
  return State{std::move(*s), std::move(*j), std::move(*o)};
}

const PcmElement& self_of(const State& w, Label l) {
  auto it = w.self.find(l);
  if (it == w.self.end()) throw StateError("label " + label_name(l) + " missing from self");
  return it->second;
}

const PcmElement& other_of(const State& w, Label l) {
  auto it = w.other.find(l);
  if (it == w.other.end()) throw StateError("label " + label_name(l) + " missing from other");
  return it->second;
}

const Joint& joint_of(const State& w, Label l) {
  auto it = w.joint.find(l);
  if (it == w.joint.end()) throw StateError("label " + label_name(l) + " missing from joint");
  return it->second;
}

std::string render(const State& w) {
  std::string out;
  for (Label l : labels_of(w)) {
    auto s = w.self.find(l);
    auto j = w.joint.find(l);
    auto o = w.other.find(l);
    out += label_name(l) + ": ⟨" + (s == w.self.end() ? "-" : s->second.render()) + " | " +
           (j == w.joint.end() ? "-" : render(j->second)) + " | " +
           (o == w.other.end() ? "-" : o->second.render()) + "⟩\n";
  }
  return out;
}

void encode(std::string& out, const State& w) {
  encode(out, w.self);
  encode_u64(out, w.joint.size());
  for (const auto& [l, j] : w.joint) {
    encode_u64(out, l);
    encode(out, j);
  }
  encode(out, w.other);
}

}  // namespace histrio
