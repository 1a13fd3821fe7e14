#include "histrio/actions.hpp"

#include <algorithm>

namespace histrio {

std::string PrimitiveAtomic::render() const {
  switch (kind) {
    case Kind::Read: return "Read(" + histrio::render(loc) + ")";
    case Kind::Write: return "Write(" + histrio::render(loc) + ", " + value.render() + ")";
    case Kind::Skip: return "Skip";
    case Kind::Rmw: return "RMW(" + histrio::render(loc) + ", " + shape + ")";
    case Kind::Alloc: return "Alloc";
    case Kind::Free: return "Free(" + histrio::render(loc) + ")";
  }
  return "?";
}

PrimitiveAtomic prim_read(Loc l) {
  PrimitiveAtomic p;
  p.kind = PrimitiveAtomic::Kind::Read;
  p.loc = l;
  return p;
}

PrimitiveAtomic prim_write(Loc l, Value v) {
  PrimitiveAtomic p;
  p.kind = PrimitiveAtomic::Kind::Write;
  p.loc = l;
  p.value = std::move(v);
  return p;
}

PrimitiveAtomic prim_skip() { return PrimitiveAtomic{}; }

PrimitiveAtomic prim_rmw(Loc l, std::string shape, std::function<Value(const Value&)> f,
                         std::function<Value(const Value&)> g) {
  PrimitiveAtomic p;
  p.kind = PrimitiveAtomic::Kind::Rmw;
  p.loc = l;
  p.shape = std::move(shape);
  p.f = std::move(f);
  p.g = std::move(g);
  return p;
}

PrimitiveAtomic prim_alloc() {
  PrimitiveAtomic p;
  p.kind = PrimitiveAtomic::Kind::Alloc;
  return p;
}

PrimitiveAtomic prim_free(Loc l) {
  PrimitiveAtomic p;
  p.kind = PrimitiveAtomic::Kind::Free;
  p.loc = l;
  return p;
}

PrimitiveAtomic cas(Loc l, Value expected, Value desired) {
  return prim_rmw(
      l, "cas(" + expected.render() + ", " + desired.render() + ")",
      [expected, desired](const Value& v) { return v == expected ? desired : v; },
      [expected](const Value& v) { return Value::boolean(v == expected); });
}

Value apply_primitive(const PrimitiveAtomic& p, Heap& heap, std::uint64_t& next_loc) {
  using K = PrimitiveAtomic::Kind;
  if (p.kind == K::Skip) return Value::unit();
  if (p.kind == K::Alloc) {
    Loc l{next_loc++};
    if (heap.count(l)) throw MemoryFault("allocator returned a live location " + render(l));
    heap[l] = Value::unit();
    return Value::loc(l);
  }
  auto it = heap.find(p.loc);
  if (it == heap.end()) throw MemoryFault("access to unallocated location " + render(p.loc));
  switch (p.kind) {
    case K::Free: heap.erase(it); return Value::unit();
    case K::Read: return it->second;
    case K::Write: it->second = p.value; return Value::unit();
    default: {
      Value old = it->second;
      it->second = p.f(old);
      return p.g(old);
    }
  }
}

PrimitiveAtomic erase(const AtomicAction& a, const Args& args) { return a.erasure(args); }

bool transition_member(const Concurroid& c, const std::string& name, const Heap& h, const State& pre,
                       const State& post) {
  const Transition* t = c.find(name);
  return t && t->member(h, pre, post);
}

AtomicEvent run_atomic(const AtomicAction& a, const State& w, const Args& args, Allocator& alloc) {
  if (!a.safe(w, args)) throw SafetyFault(a.name + " is unsafe in\n" + render(w));
  StepOutcome out = a.step(w, args, alloc);
  return AtomicEvent{w, std::move(out.post), std::move(out.result), std::move(out.transition),
                     std::move(out.exchanged)};
}

bool ActionReport::ok() const {
  return std::all_of(properties.begin(), properties.end(), [](const CheckReport& r) { return r.ok(); });
}

namespace {

std::optional<StepOutcome> try_step(const AtomicAction& a, const State& w, const Args& args, std::uint64_t loc) {
  Allocator alloc{loc};
  try {
    return a.step(w, args, alloc);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// States outside W built from a coherent one.
std::vector<State> perturb(const State& w) {
  std::vector<State> out;
  if (!w.self.empty()) {
    State a = w;
    a.self.erase(a.self.begin());
    out.push_back(std::move(a));
  }
  for (const auto& [l, j] : w.joint) {
    if (j.heap.empty()) continue;
    for (auto& [l2, x] : w.self) {
      if (!x.is_heap()) continue;
      State b = w;
      Heap h = x.heap();
      h.insert(*j.heap.begin());
      b.self[l2] = PcmElement(std::move(h));
      out.push_back(std::move(b));
      break;
    }
    break;
  }
  return out;
}

}  // namespace

ActionReport check_action_properties(const AtomicAction& a, Gen& g, std::size_t n) {
  const Concurroid& c = *a.concurroid;
  ActionReport rep{a.name, {}};
  CheckReport coherence{"coherence", a.name, n, 0, {}};
  CheckReport monotone{"safety-monotonicity", a.name, n, 0, {}};
  CheckReport step_safety{"step-safety", a.name, n, 0, {}};
  CheckReport stepping{"internal-stepping", a.name, n, 0, {}};
  CheckReport framing{"framing", a.name, n, 0, {}};
  CheckReport totality{"totality", a.name, n, 0, {}};
  CheckReport erasure{"erasure", a.name, n, 0, {}};

  for (std::size_t i = 0; i < n; ++i) {
    auto sample = a.sample(g);
    if (!sample) continue;
    const auto& [w, args] = *sample;
    std::uint64_t loc = g.next_loc;
    g.next_loc += 64;
    bool safe = a.safe(w, args);

    ++coherence.applicable;
    if (safe && !c.coherent(w)) coherence.violations.push_back("safe but incoherent:\n" + render(w));
    for (const State& bad : perturb(w)) {
      if (a.safe(bad, args)) coherence.violations.push_back("safe outside W:\n" + render(bad));
      ++step_safety.applicable;
      if (try_step(a, bad, args, loc)) step_safety.violations.push_back("stepped from an unsafe state:\n" + render(bad));
    }
    if (!safe) {
      ++step_safety.applicable;
      if (try_step(a, w, args, loc)) step_safety.violations.push_back("stepped from an unsafe state:\n" + render(w));
      continue;
    }

    ++totality.applicable;
    auto out = try_step(a, w, args, loc);
    if (!out) {
      totality.violations.push_back("safe state does not step:\n" + render(w));
      continue;
    }

    ++stepping.applicable;
    if (std::find(a.claimed.begin(), a.claimed.end(), out->transition) == a.claimed.end()) {
      stepping.violations.push_back("unclaimed transition " + out->transition);
    } else if (!transition_member(c, out->transition, out->exchanged, w, out->post)) {
      stepping.violations.push_back("step is not in " + out->transition + ":\n" + render(w) + "=>\n" + render(out->post));
    } else if (!c.coherent(out->post)) {
      stepping.violations.push_back("post-state leaves W:\n" + render(out->post));
    }

    // w = b ▷ t for b = ⟨s | j | rest⟩; compare with b ◁ t.
    auto [t, rest] = random_split(g, w.other);
    State b{w.self, w.joint, rest};
    auto moved = realign_acquire(b, t);
    if (moved) {
      ++monotone.applicable;
      if (!a.safe(*moved, args)) {
        monotone.violations.push_back("unsafe after moving " + render(t) + " into self:\n" + render(*moved));
      } else {
        ++framing.applicable;
        auto framed_out = try_step(a, *moved, args, loc);
        auto base = map_subtract(out->post.other, t);
        if (!framed_out || !base) {
          framing.violations.push_back("framed step failed:\n" + render(*moved));
        } else {
          State inner{out->post.self, out->post.joint, *base};
          auto expect = realign_acquire(inner, t);
          if (!expect || !(*expect == framed_out->post) || !(framed_out->result == out->result)) {
            framing.violations.push_back("framed step disagrees:\n" + render(*moved) + "=>\n" + render(framed_out->post));
          }
        }
      }
    }

    auto flat = flatten(w);
    auto flat_post = flatten(out->post);
    if (!flat || !flat_post) {
      erasure.violations.push_back("state does not flatten");
      continue;
    }
    ++erasure.applicable;
    Heap concrete = *flat;
    std::uint64_t next = loc;
    try {
      Value r = apply_primitive(a.erasure(args), concrete, next);
      if (!(r == out->result) || !(concrete == *flat_post)) {
        erasure.violations.push_back("erased " + a.erasure(args).render() + " gives " + r.render() + " vs " +
                                     out->result.render());
      }
    } catch (const MemoryFault& e) {
      erasure.violations.push_back(std::string("erased action faults: ") + e.what());
    }
    auto [s1, s2] = random_split(g, w.self);
    auto shifted = realign_release(State{s2, w.joint, w.other}, s1);
    if (shifted && a.safe(*shifted, args)) {
      auto alt = try_step(a, *shifted, args, loc);
      auto alt_flat = alt ? flatten(alt->post) : std::nullopt;
      if (!alt || !alt_flat || !(alt->result == out->result) || !(*alt_flat == *flat_post)) {
        erasure.violations.push_back("result depends on auxiliary partition: " + out->result.render() + " vs " +
                                     (alt ? alt->result.render() : std::string("no step")));
      }
    }
  }
  rep.properties = {coherence, monotone, step_safety, stepping, framing, totality, erasure};
  return rep;
}

}  // namespace histrio
