#include "histrio/scheduler.hpp"

#include <functional>
#include <random>
#include <string_view>
#include <unordered_map>

namespace histrio {

namespace {

using K = Node::Kind;

bool live(const Thread& t) { return t.status == Thread::Status::Running || t.status == Thread::Status::Done; }

StepResult ok() { return {}; }
StepResult cut() { return StepResult{StepStatus::Cut, std::nullopt}; }
StepResult bad(Violation v) { return StepResult{StepStatus::Violation, std::move(v)}; }

bool subset(const std::set<Label>& a, const std::set<Label>& b) {
  for (Label l : a) {
    if (!b.count(l)) return false;
  }
  return true;
}

std::string render_labels(const std::set<Label>& ls) {
  std::string out = "{";
  for (Label l : ls) out += (out.size() > 1 ? ", " : "") + label_name(l);
  return out + "}";
}

const History* history_part(const PcmElement& e) {
  if (e.is_history()) return &e.history();
  if (e.is_triple() && e.aux().is_history()) return &e.aux().history();
  return nullptr;
}

void encode_str(std::string& out, const std::string& s) {
  encode_u64(out, s.size());
  out += s;
}

Frame frame(Frame::Kind kind, const Node* n, std::uint32_t iteration = 0) {
  Frame f;
  f.kind = kind;
  f.node = n;
  f.iteration = iteration;
  return f;
}

void encode_ptr(std::string& out, const void* p) { encode_u64(out, reinterpret_cast<std::uintptr_t>(p)); }

}  // namespace

Machine::Machine(const Scenario& s, MachineOptions opts) : s_(s), opts_(opts) {}

Violation Machine::fail(const World& w, int t, std::string check, std::string expected, std::string actual) const {
  return Violation{w.steps, t, std::move(check), std::move(expected), std::move(actual), {}};
}

State Machine::view(const World& w, int t) const {
  const Thread& T = w.threads[t];
  State v;
  for (Label l : T.visible) {
    v.self[l] = T.self.at(l);
    v.joint[l] = w.joint.at(l);
    PcmElement o = w.root_other.at(l);
    for (std::size_t u = 0; u < w.threads.size(); ++u) {
      const Thread& U = w.threads[u];
      if (static_cast<int>(u) == t || !live(U) || !U.visible.count(l)) continue;
      auto j = histrio::join(o, U.self.at(l));
      if (!j) throw StateError("self of thread " + std::to_string(u) + " does not compose on " + label_name(l));
      o = std::move(*j);
    }
    v.other[l] = std::move(o);
  }
  return v;
}

PcmMap Machine::total_aux(const World& w) const {
  PcmMap out = w.root_other;
  for (const Thread& U : w.threads) {
    if (!live(U)) continue;
    for (const auto& [l, e] : U.self) {
      auto j = histrio::join(out.at(l), e);
      if (!j) throw StateError("thread selves do not compose on " + label_name(l));
      out[l] = std::move(*j);
    }
  }
  return out;
}

std::pair<World, StepResult> Machine::start() const {
  if (!s_.concurroid->coherent(s_.init)) throw std::invalid_argument("initial state of " + s_.name + " is incoherent");
  World w;
  w.erased = opts_.erased;
  w.next_loc = s_.first_loc;
  Thread root;
  root.control = s_.program.get();
  root.visible = labels_of(s_.init);
  root.conc = s_.concurroid;
  if (w.erased) {
    w.concrete = *flatten(s_.init);
  } else {
    w.joint = s_.init.joint;
    w.root_other = s_.init.other;
    root.self = s_.init.self;
  }
  w.threads.push_back(std::move(root));
  StepResult r = settle(w, 0, nullptr);
  return {std::move(w), std::move(r)};
}

std::vector<int> Machine::enabled(const World& w) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < w.threads.size(); ++i) {
    const Thread& T = w.threads[i];
    if (T.status == Thread::Status::Running && T.control && T.control->kind == K::Act) out.push_back(static_cast<int>(i));
  }
  return out;
}

bool Machine::complete(const World& w) const { return w.threads[0].status == Thread::Status::Done; }

Heap Machine::final_heap(const World& w) const {
  if (w.erased) return w.concrete;
  State g;
  g.self = total_aux(w);
  g.joint = w.joint;
  g.other = unit_map(g.self);
  auto h = flatten(g);
  return h ? *h : Heap{};
}

std::optional<Violation> Machine::finish(const World& w) const {
  if (!s_.final_check || w.erased) return std::nullopt;
  State v = view(w, 0);
  if (auto e = s_.final_check(v, w.threads[0].ret)) return fail(w, 0, "final", "scenario oracle holds", *e);
  return std::nullopt;
}

StepResult Machine::step(World& w, int t, std::vector<Event>* events, std::vector<MethodReturn>* returns) const {
  Thread& T = w.threads[t];
  const Node* n = T.control;
  const AtomicAction& A = *n->action;
  Args args = n->args(T.env);
  const std::set<Label>& L = A.concurroid->labels;

  if (!subset(L, T.visible)) {
    return bad(fail(w, t, "label-scope", "labels " + render_labels(L) + " visible", render_labels(T.visible)));
  }
  for (const Frame& f : T.kont) {
    if (f.kind == Frame::Kind::Inject && !subset(L, f.node->frame)) {
      return bad(fail(w, t, "inject-frame", A.name + " within " + render_labels(f.node->frame), render_labels(L)));
    }
  }

  if (w.erased) {
    Value result;
    try {
      result = apply_primitive(A.erasure(args), w.concrete, w.next_loc);
    } catch (const MemoryFault& e) {
      ++w.steps;
      return bad(fail(w, t, "memory-fault", A.erasure(args).render() + " in bounds", e.what()));
    }
    ++w.steps;
    if (events) events->push_back(Event{w.steps, t, A.name, A.erasure(args).render(), result, ""});
    T.ret = std::move(result);
    T.control = nullptr;
    return settle(w, t, returns);
  }

  State pre;
  std::vector<std::optional<State>> before(w.threads.size());
  try {
    pre = restrict(view(w, t), L);
    if (opts_.check_rely) {
      for (std::size_t u = 0; u < w.threads.size(); ++u) {
        if (static_cast<int>(u) != t && live(w.threads[u])) before[u] = view(w, static_cast<int>(u));
      }
    }
  } catch (const StateError& e) {
    return bad(fail(w, t, "accounting", "thread views compose", e.what()));
  }

  if (!A.safe(pre, args)) {
    ++w.steps;
    return bad(fail(w, t, "safety", A.name + " safe", render(pre)));
  }
  Allocator alloc{w.next_loc};
  StepOutcome out;
  try {
    out = A.step(pre, args, alloc);
  } catch (const std::exception& e) {
    ++w.steps;
    return bad(fail(w, t, "step-fault", A.name + " steps", e.what()));
  }
  w.next_loc = alloc.next;
  ++w.steps;

  if (std::find(A.claimed.begin(), A.claimed.end(), out.transition) == A.claimed.end()) {
    return bad(fail(w, t, "transition", "one of the transitions claimed by " + A.name, out.transition));
  }
  if (!transition_member(*A.concurroid, out.transition, out.exchanged, pre, out.post)) {
    return bad(fail(w, t, "transition", A.name + " step is a member of " + out.transition,
                    render(pre) + "=>\n" + render(out.post)));
  }
  if (!(pre.other == out.post.other)) {
    return bad(fail(w, t, "guarantee", "other unchanged by own step", render(out.post.other)));
  }
  for (Label l : L) {
    T.self[l] = out.post.self.at(l);
    w.joint[l] = out.post.joint.at(l);
  }

  State post_view;
  try {
    post_view = view(w, t);
  } catch (const StateError& e) {
    return bad(fail(w, t, "accounting", "thread views compose", e.what()));
  }
  if (!T.conc->coherent(post_view)) {
    return bad(fail(w, t, "coherence", "post-state in W of " + T.conc->name, render(post_view)));
  }

  if (opts_.check_rely) {
    for (std::size_t u = 0; u < w.threads.size(); ++u) {
      if (!before[u]) continue;
      const Thread& U = w.threads[u];
      std::set<Label> shared;
      for (Label l : L) {
        if (U.visible.count(l)) shared.insert(l);
      }
      if (shared.empty()) continue;
      State after = view(w, static_cast<int>(u));
      State a = restrict(*before[u], shared), b = restrict(after, shared);
      if (!(a.self == b.self)) {
        return bad(fail(w, static_cast<int>(u), "rely", "self unchanged by thread " + std::to_string(t), render(b.self)));
      }
      if (shared == L && !transition_member(*A.concurroid, out.transition, out.exchanged, transpose(a), transpose(b))) {
        return bad(fail(w, static_cast<int>(u), "rely", "environment step is a transposed " + out.transition,
                        render(a) + "=>\n" + render(b)));
      }
      for (Label l : shared) {
        const History* h0 = history_part(a.other.at(l));
        const History* h1 = history_part(b.other.at(l));
        if (h0 && h1 && !is_subset(*h0, *h1)) {
          return bad(fail(w, static_cast<int>(u), "rely-monotonicity", "other history only grows on " + label_name(l),
                          render(*h1)));
        }
      }
      if (!U.conc->coherent(after)) {
        return bad(fail(w, static_cast<int>(u), "coherence", "view in W of " + U.conc->name, render(after)));
      }
    }
  }

  if (events) {
    events->push_back(Event{w.steps, t, A.name, out.transition, out.result, render(restrict(post_view, L))});
  }
  T.ret = std::move(out.result);
  T.control = nullptr;
  return settle(w, t, returns);
}

StepResult Machine::settle(World& w, int t, std::vector<MethodReturn>* returns) const {
  for (;;) {
    Thread& T = w.threads[t];
    if (T.control) {
      const Node* n = T.control;
      switch (n->kind) {
        case K::Act: return ok();
        case K::Return:
          T.ret = n->value(T.env);
          T.control = nullptr;
          break;
        case K::Bind:
          T.kont.push_back(frame(Frame::Kind::Bind, n));
          T.control = n->first.get();
          break;
        case K::If: T.control = (n->cond(T.env) ? n->first : n->rest).get(); break;
        case K::Loop:
          if (n->bound == 0) return cut();
          T.kont.push_back(frame(Frame::Kind::Loop, n, 1));
          T.control = n->first.get();
          break;
        case K::Inject:
          T.kont.push_back(frame(Frame::Kind::Inject, n));
          T.control = n->first.get();
          break;
        case K::Spec: {
          Frame f = frame(Frame::Kind::Spec, n);
          f.args = n->args(T.env);
          if (!w.erased) {
            State entry = view(w, t);
            if (n->spec->pre) {
              if (auto e = n->spec->pre(entry, f.args)) {
                return bad(fail(w, t, "spec-pre:" + n->spec->name, "precondition of " + n->spec->name, *e));
              }
            }
            f.entry = std::make_shared<const State>(std::move(entry));
          }
          T.kont.push_back(std::move(f));
          T.control = n->first.get();
          break;
        }
        case K::Hide: {
          StepResult r = enter_hide(w, t, n);
          if (r.status != StepStatus::Ok) return r;
          break;
        }
        case K::Par: return fork(w, t, n, returns);
      }
      continue;
    }
    if (T.kont.empty()) {
      T.status = Thread::Status::Done;
      int p = T.parent;
      if (p < 0) return ok();
      const Thread& P = w.threads[p];
      int sib = P.left == t ? P.right : P.left;
      if (w.threads[sib].status != Thread::Status::Done) return ok();
      return join(w, p, returns);
    }
    Frame f = T.kont.back();
    switch (f.kind) {
      case Frame::Kind::Bind:
        T.kont.pop_back();
        if (!f.node->var.empty()) T.env[f.node->var] = T.ret;
        T.control = f.node->rest.get();
        break;
      case Frame::Kind::Loop:
        if (!T.ret.is(Value::Kind::Opt)) throw std::logic_error("loop body must return an option");
        if (T.ret.is_some()) {
          T.kont.pop_back();
          T.ret = Value(T.ret.at(0));
        } else if (f.iteration < f.node->bound) {
          ++T.kont.back().iteration;
          T.control = f.node->first.get();
        } else {
          return cut();
        }
        break;
      case Frame::Kind::Inject: T.kont.pop_back(); break;
      case Frame::Kind::Spec: {
        T.kont.pop_back();
        const MethodSpec& sp = *f.node->spec;
        if (!w.erased && sp.post) {
          State exit = view(w, t);
          if (auto e = sp.post(*f.entry, f.args, exit, T.ret)) {
            return bad(fail(w, t, "spec-post:" + sp.name, "postcondition of " + sp.name, *e));
          }
        }
        if (returns) returns->push_back(MethodReturn{w.steps, t, sp.name, f.args, T.ret});
        break;
      }
      case Frame::Kind::Hide: {
        T.kont.pop_back();
        StepResult r = exit_hide(w, t, f);
        if (r.status != StepStatus::Ok) return r;
        break;
      }
    }
  }
}

StepResult Machine::fork(World& w, int t, const Node* n, std::vector<MethodReturn>* returns) const {
  PcmMap a, b;
  State parent_view;
  std::pair<State, State> children;
  PcmMap before;
  if (!w.erased) {
    const Thread& T = w.threads[t];
    std::tie(a, b) = n->split(T.self, T.env);
    auto ab = map_pointwise_join(a, b);
    if (!ab || !(*ab == T.self)) {
      return bad(fail(w, t, "fork", "self = a ∘ b", render(a) + " / " + render(b) + " vs " + render(T.self)));
    }
    try {
      parent_view = view(w, t);
      children = subjective_split(parent_view, a, b);
      before = total_aux(w);
    } catch (const StateError& e) {
      return bad(fail(w, t, "fork", "valid subjective split", e.what()));
    }
  }
  Thread proto;
  {
    const Thread& T = w.threads[t];
    proto.parent = t;
    proto.env = T.env;
    proto.visible = T.visible;
    proto.conc = T.conc;
  }
  int l = static_cast<int>(w.threads.size());
  int r = l + 1;
  Thread left = proto, right = proto;
  left.control = n->first.get();
  right.control = n->rest.get();
  left.self = std::move(a);
  right.self = std::move(b);
  w.threads.push_back(std::move(left));
  w.threads.push_back(std::move(right));
  Thread& P = w.threads[t];
  P.left = l;
  P.right = r;
  P.status = Thread::Status::Waiting;
  P.self.clear();

  if (!w.erased) {
    try {
      if (!(view(w, l) == children.first) || !(view(w, r) == children.second)) {
        return bad(fail(w, t, "fork-join", "children views are the subjective split", render(view(w, l))));
      }
      if (!(subjective_join(children.first, children.second) == parent_view)) {
        return bad(fail(w, t, "fork-join", "join of split children restores parent", render(parent_view)));
      }
      if (!(total_aux(w) == before)) {
        return bad(fail(w, t, "accounting", render(before), render(total_aux(w))));
      }
    } catch (const StateError& e) {
      return bad(fail(w, t, "fork-join", "split children compose", e.what()));
    }
  }
  StepResult sr = settle(w, l, returns);
  if (sr.status != StepStatus::Ok) return sr;
  return settle(w, r, returns);
}

StepResult Machine::join(World& w, int p, std::vector<MethodReturn>* returns) const {
  int l = w.threads[p].left, r = w.threads[p].right;
  Value result = Value::pair(w.threads[l].ret, w.threads[r].ret);
  const Node* par = w.threads[p].control;
  if (w.erased) {
    w.threads[l].status = w.threads[r].status = Thread::Status::Joined;
    Thread& P = w.threads[p];
    P.status = Thread::Status::Running;
    P.ret = std::move(result);
    P.control = nullptr;
    return settle(w, p, returns);
  }
  State c1, c2, joined;
  PcmMap before;
  try {
    c1 = view(w, l);
    c2 = view(w, r);
    before = total_aux(w);
    joined = subjective_join(c1, c2);
  } catch (const StateError& e) {
    return bad(fail(w, p, "join", "sibling views share a common frame", e.what()));
  }
  auto self = map_pointwise_join(w.threads[l].self, w.threads[r].self);
  if (!self) return bad(fail(w, p, "join", "child selves compose", render(c1.self) + " / " + render(c2.self)));
  Value lres = w.threads[l].ret, rres = w.threads[r].ret;
  for (int c : {l, r}) {
    w.threads[c].status = Thread::Status::Joined;
    w.threads[c].self.clear();
  }
  Thread& P = w.threads[p];
  P.self = std::move(*self);
  P.status = Thread::Status::Running;
  P.ret = std::move(result);
  P.control = nullptr;
  try {
    if (!(view(w, p) == joined)) {
      return bad(fail(w, p, "fork-join", render(joined), render(view(w, p))));
    }
    if (!(total_aux(w) == before)) return bad(fail(w, p, "accounting", render(before), render(total_aux(w))));
  } catch (const StateError& e) {
    return bad(fail(w, p, "join", "joined view composes", e.what()));
  }
  if (par->join_check) {
    if (auto e = par->join_check(c1, c2, lres, rres)) return bad(fail(w, p, "par-join", "join oracle holds", *e));
  }
  return settle(w, p, returns);
}

StepResult Machine::enter_hide(World& w, int t, const Node* n) const {
  Thread& T = w.threads[t];
  Frame f = frame(Frame::Kind::Hide, n);
  f.saved_conc = T.conc;
  f.saved_visible = T.visible;
  if (w.erased) {
    T.visible.insert(n->inner->labels.begin(), n->inner->labels.end());
    T.conc = n->inner;
    T.kont.push_back(std::move(f));
    T.control = n->first.get();
    return ok();
  }
  const PhiSpec& phi = *n->phi;
  if (!T.visible.count(labels::pv)) return bad(fail(w, t, "hide-entry", "private heap visible", render_labels(T.visible)));
  Heap mine = T.self.at(labels::pv).heap();
  auto inst = phi.install(phi.g0, mine);
  if (!inst) return bad(fail(w, t, "hide-entry", "private heap holds the erasure of g0 for " + phi.name, render(mine)));
  const auto& [k, installed] = *inst;
  std::set<Label> hidden = labels_of(installed);
  for (Label l : hidden) {
    if (T.visible.count(l) || w.joint.count(l)) return bad(fail(w, t, "hide-entry", "fresh label", label_name(l)));
  }
  if (!phi.member(phi.g0, installed)) {
    return bad(fail(w, t, "hide-entry", "installed state in Φ(g0)", render(installed)));
  }
  auto flat = flatten(installed);
  auto rest = heap_subtract(mine, k);
  if (!flat || !(*flat == k) || !rest) {
    return bad(fail(w, t, "hide-erasure", render(k), flat ? render(*flat) : std::string("no flattening")));
  }
  T.self[labels::pv] = PcmElement(std::move(*rest));
  for (Label l : hidden) {
    T.self[l] = installed.self.at(l);
    w.joint[l] = installed.joint.at(l);
    w.root_other[l] = installed.other.at(l);
  }
  T.visible.insert(hidden.begin(), hidden.end());
  T.conc = n->inner;
  T.kont.push_back(std::move(f));
  T.control = n->first.get();
  State v = view(w, t);
  if (!T.conc->coherent(v)) return bad(fail(w, t, "coherence", "view in W of " + T.conc->name, render(v)));
  return ok();
}

StepResult Machine::exit_hide(World& w, int t, const Frame& f) const {
  Thread& T = w.threads[t];
  if (w.erased) {
    T.conc = f.saved_conc;
    T.visible = f.saved_visible;
    return ok();
  }
  const Node* n = f.node;
  const PhiSpec& phi = *n->phi;
  std::set<Label> hidden;
  for (Label l : T.visible) {
    if (!f.saved_visible.count(l)) hidden.insert(l);
  }
  State installed;
  for (Label l : hidden) {
    installed.self[l] = T.self.at(l);
    installed.joint[l] = w.joint.at(l);
    installed.other[l] = w.root_other.at(l);
  }
  auto g = phi.abstraction(installed);
  if (!g || !phi.member(*g, installed)) {
    return bad(fail(w, t, "hide-exit", "final state in Φ(g') for some g'", render(installed)));
  }
  auto flat = flatten(installed);
  auto merged = flat ? heap_union(T.self.at(labels::pv).heap(), *flat) : std::nullopt;
  if (!merged) return bad(fail(w, t, "hide-exit", "erasure disjoint from private heap", render(installed)));
  T.self[labels::pv] = PcmElement(std::move(*merged));
  for (Label l : hidden) {
    T.self.erase(l);
    w.joint.erase(l);
    w.root_other.erase(l);
  }
  T.visible = f.saved_visible;
  T.conc = f.saved_conc;
  if (n->hide_check) {
    if (auto e = n->hide_check(*g, *flat)) return bad(fail(w, t, "hide-check", phi.name + " recovery", *e));
  }
  return ok();
}

std::string Machine::key(const World& w) const {
  std::string out;
  encode_u64(out, w.steps);
  encode_u64(out, w.next_loc);
  encode_u64(out, w.joint.size());
  for (const auto& [l, j] : w.joint) {
    encode_u64(out, l);
    encode(out, j);
  }
  encode(out, w.root_other);
  if (w.erased) encode(out, w.concrete);
  encode_u64(out, w.threads.size());
  for (const Thread& T : w.threads) {
    out.push_back(static_cast<char>(T.status));
    if (T.status == Thread::Status::Joined) continue;
    encode_u64(out, static_cast<std::uint64_t>(T.parent + 1));
    encode_ptr(out, T.control);
    T.ret.encode(out);
    encode_u64(out, T.env.size());
    for (const auto& [k, v] : T.env) {
      encode_str(out, k);
      v.encode(out);
    }
    encode_u64(out, T.kont.size());
    for (const Frame& f : T.kont) {
      out.push_back(static_cast<char>(f.kind));
      encode_ptr(out, f.node);
      encode_u64(out, f.iteration);
      if (f.entry) encode(out, *f.entry);
      encode_u64(out, f.args.size());
      for (const auto& a : f.args) a.encode(out);
    }
    encode(out, T.self);
    encode_u64(out, T.visible.size());
    for (Label l : T.visible) encode_u64(out, l);
    encode_ptr(out, T.conc.get());
  }
  return out;
}

std::string ExplorationReport::verdict() const {
  if (violating > 0 || !violations.empty()) return "violation";
  if (complete > 0) return "pass";
  return "inconclusive";
}

namespace {

struct Counts {
  BigCount complete = 0, cut = 0, bad = 0;

  Counts& operator+=(const Counts& o) {
    complete += o.complete;
    cut += o.cut;
    bad += o.bad;
    return *this;
  }
};

struct KeyHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const { return k.first ^ (k.second * 31); }
};

std::pair<std::uint64_t, std::uint64_t> digest(const std::string& s) {
  std::uint64_t a = std::hash<std::string_view>{}(s);
  std::uint64_t b = 1469598103934665603ULL;
  for (unsigned char c : s) {
    b ^= c;
    b *= 1099511628211ULL;
  }
  return {a, b};
}

class Explorer {
 public:
  Explorer(const Scenario& s, const ExploreOptions& o) : m_(s, MachineOptions{false, o.check_rely}), o_(o) {}

  ExplorationReport run() {
    auto [w, r] = m_.start();
    Counts c;
    if (r.status == StepStatus::Violation) {
      record(*r.violation);
      c.bad = 1;
    } else if (r.status == StepStatus::Cut) {
      c.cut = 1;
    } else {
      c = dfs(w);
    }
    rep_.complete = c.complete;
    rep_.inconclusive = c.cut;
    rep_.violating = c.bad;
    rep_.states = memo_.size();
    return std::move(rep_);
  }

 private:
  void record(Violation v) {
    if (rep_.violations.size() >= o_.max_violations) return;
    v.schedule = path_;
    rep_.violations.push_back(std::move(v));
  }

  Counts dfs(const World& w) {
    if (m_.complete(w)) {
      if (auto v = m_.finish(w)) {
        record(*v);
        return Counts{0, 0, 1};
      }
      if (rep_.final_states.size() < o_.max_final_states) {
        std::string fs = render(m_.final_heap(w)) + " ⇒ " + w.threads[0].ret.render();
        if (std::find(rep_.final_states.begin(), rep_.final_states.end(), fs) == rep_.final_states.end()) {
          rep_.final_states.push_back(std::move(fs));
        }
      }
      return Counts{1, 0, 0};
    }
    auto en = m_.enabled(w);
    if (en.empty() || w.steps >= o_.step_bound) return Counts{0, 1, 0};
    auto k = digest(m_.key(w));
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    Counts total;
    for (int t : en) {
      World next = w;
      path_.push_back(t);
      ++rep_.transitions;
      StepResult r = m_.step(next, t);
      if (r.status == StepStatus::Violation) {
        record(*r.violation);
        total.bad += 1;
      } else if (r.status == StepStatus::Cut) {
        total.cut += 1;
      } else {
        total += dfs(next);
      }
      path_.pop_back();
    }
    memo_.emplace(k, total);
    return total;
  }

  Machine m_;
  ExploreOptions o_;
  ExplorationReport rep_;
  std::vector<int> path_;
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, Counts, KeyHash> memo_;
};

void finish_trace(const Machine& m, const World& w, Trace& tr) {
  tr.final_heap = m.final_heap(w);
  if (!w.erased && m.complete(w)) {
    try {
      tr.final_view = m.view(w, 0);
    } catch (const StateError&) {
    }
  }
  tr.result = w.threads[0].ret;
}

void settle_outcome(const Machine& m, const World& w, StepResult r, Trace& tr) {
  if (r.status == StepStatus::Violation) {
    tr.violation = std::move(r.violation);
    tr.violation->schedule = tr.schedule;
    tr.verdict = "violation";
  } else if (r.status == StepStatus::Cut) {
    tr.verdict = "inconclusive";
  } else if (m.complete(w)) {
    if (auto v = m.finish(w)) {
      tr.violation = std::move(v);
      tr.violation->schedule = tr.schedule;
      tr.verdict = "violation";
    } else {
      tr.verdict = "pass";
    }
  }
}

}  // namespace

ExplorationReport explore(const Scenario& s, const ExploreOptions& opts) { return Explorer(s, opts).run(); }

Trace run_random(const Scenario& s, std::uint64_t seed, std::size_t budget, bool check_rely) {
  Machine m(s, MachineOptions{false, check_rely});
  Trace tr;
  auto [w, r] = m.start();
  std::mt19937_64 rng(seed);
  while (r.status == StepStatus::Ok && !m.complete(w)) {
    auto en = m.enabled(w);
    if (en.empty() || tr.schedule.size() >= budget) break;
    int t = en[rng() % en.size()];
    tr.schedule.push_back(t);
    r = m.step(w, t, &tr.events, &tr.returns);
  }
  settle_outcome(m, w, std::move(r), tr);
  finish_trace(m, w, tr);
  return tr;
}

Trace run_schedule(const Scenario& s, const std::vector<int>& schedule, bool erased, bool check_rely) {
  Machine m(s, MachineOptions{erased, check_rely});
  Trace tr;
  auto [w, r] = m.start();
  for (int t : schedule) {
    if (r.status != StepStatus::Ok || m.complete(w)) break;
    auto en = m.enabled(w);
    if (std::find(en.begin(), en.end(), t) == en.end()) {
      r = StepResult{StepStatus::Violation,
                     Violation{w.steps, t, "schedule", "thread " + std::to_string(t) + " enabled", "disabled", {}}};
      break;
    }
    tr.schedule.push_back(t);
    r = m.step(w, t, &tr.events, &tr.returns);
  }
  settle_outcome(m, w, std::move(r), tr);
  finish_trace(m, w, tr);
  return tr;
}

ErasureComparison compare_erasure(const Scenario& s, const std::vector<int>& schedule) {
  Trace full = run_schedule(s, schedule, false);
  Trace bare = run_schedule(s, schedule, true);
  auto differ = [](std::string d) { return ErasureComparison{false, std::move(d)}; };
  if (full.events.size() != bare.events.size()) {
    return differ("step counts differ: " + std::to_string(full.events.size()) + " vs " +
                  std::to_string(bare.events.size()));
  }
  for (std::size_t i = 0; i < full.events.size(); ++i) {
    const Event& a = full.events[i];
    const Event& b = bare.events[i];
    if (a.thread != b.thread || !(a.result == b.result)) {
      return differ("step " + std::to_string(a.step) + ": " + a.action + " gives " + a.result.render() + " vs " +
                    b.result.render());
    }
  }
  if (!(full.result == bare.result)) return differ("results " + full.result.render() + " vs " + bare.result.render());
  if (!(full.final_heap == bare.final_heap)) {
    return differ("final heaps " + render(full.final_heap) + " vs " + render(bare.final_heap));
  }
  return {};
}

std::string render(const Violation& v) {
  std::string out = "step " + std::to_string(v.step) + ", thread " + std::to_string(v.thread) + ": " + v.check +
                    "\n  expected: " + v.expected + "\n  actual: " + v.actual + "\n  schedule:";
  for (int t : v.schedule) out += " " + std::to_string(t);
  return out;
}

}  // namespace histrio
