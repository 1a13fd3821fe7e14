#include "histrio/concurroid.hpp"

#include <stdexcept>

namespace histrio {

const Transition* Concurroid::find(const std::string& transition) const {
  for (const auto& t : internals) {
    if (t.name == transition) return &t;
  }
  for (const auto& e : externals) {
    if (e.acquire && e.acquire->name == transition) return &*e.acquire;
    if (e.release && e.release->name == transition) return &*e.release;
  }
  return nullptr;
}

Transition identity_transition(std::function<std::optional<State>(Gen&)> sample_state) {
  Transition t;
  t.name = "id";
  t.is_id = true;
  t.member = [](const Heap&, const State& pre, const State& post) { return pre == post; };
  t.sample = [sample_state](Gen& g, const Heap*) -> std::optional<Sampled> {
    auto w = sample_state(g);
    if (!w) return std::nullopt;
    return Sampled{{}, *w, *w};
  };
  return t;
}

Transition internal_transition(std::string name, std::function<bool(const State&, const State&)> member,
                               std::function<std::optional<Sampled>(Gen&)> sample) {
  Transition t;
  t.name = std::move(name);
  t.member = [member](const Heap& h, const State& pre, const State& post) { return h.empty() && member(pre, post); };
  t.sample = [sample](Gen& g, const Heap* want) -> std::optional<Sampled> {
    if (want) return std::nullopt;
    return sample(g);
  };
  return t;
}

static std::vector<const Transition*> all_transitions(const Concurroid& c) {
  std::vector<const Transition*> out;
  for (const auto& t : c.internals) out.push_back(&t);
  for (const auto& e : c.externals) {
    if (e.acquire) out.push_back(&*e.acquire);
    if (e.release) out.push_back(&*e.release);
  }
  return out;
}

CheckReport check_guarantee(const Concurroid& c, const Transition& t, Gen& g, std::size_t n) {
  CheckReport r{"guarantee", c.name + "/" + t.name, n, 0, {}};
  for (std::size_t i = 0; i < n; ++i) {
    auto s = t.sample(g, nullptr);
    if (!s) continue;
    ++r.applicable;
    if (!(s->pre.other == s->post.other)) {
      r.violations.push_back("step changes other:\n" + render(s->pre) + "=>\n" + render(s->post));
    } else if (!(transpose(s->pre).self == transpose(s->post).self)) {
      r.violations.push_back("transposed step changes self");
    }
    if (!t.member(s->h, s->pre, s->post)) r.violations.push_back("sampled pair is not a member:\n" + render(s->pre));
    if (!c.coherent(s->pre) || !c.coherent(s->post)) {
      r.violations.push_back("sampled pair leaves W:\n" + render(s->pre) + "=>\n" + render(s->post));
    }
  }
  return r;
}

CheckReport check_locality(const Concurroid& c, const Transition& t, Gen& g, std::size_t n) {
  CheckReport r{"locality", c.name + "/" + t.name, n, 0, {}};
  for (std::size_t i = 0; i < n; ++i) {
    auto s = t.sample(g, nullptr);
    if (!s) continue;
    auto [frame, rest] = random_split(g, s->pre.other);
    auto post_rest = map_subtract(s->post.other, frame);
    if (!post_rest) continue;
    State w_pre{s->pre.self, s->pre.joint, rest};
    State w_post{s->post.self, s->post.joint, *post_rest};
    auto a = realign_acquire(w_pre, frame);
    auto b = realign_acquire(w_post, frame);
    if (!a || !b) {
      r.violations.push_back("frame cannot be moved into self");
      continue;
    }
    if (!is_unit_map(frame)) ++r.applicable;
    if (!t.member(s->h, *a, *b)) {
      r.violations.push_back("step not preserved when frame " + render(frame) + " moves to self:\n" + render(*a));
    }
  }
  return r;
}

CheckReport check_footprints(const Concurroid& c, Gen& g, std::size_t n) {
  CheckReport r{"footprint", c.name, n, 0, {}};
  for (const Transition* t : all_transitions(c)) {
    for (std::size_t i = 0; i < n; ++i) {
      auto s = t->sample(g, nullptr);
      if (!s) continue;
      ++r.applicable;
      auto before = flatten(s->pre);
      auto after = flatten(s->post);
      if (!before || !after) {
        r.violations.push_back(t->name + ": state does not flatten");
        continue;
      }
      std::set<Loc> db = heap_dom(*before), da = heap_dom(*after), dh = heap_dom(s->h);
      bool ok = true;
      if (t->kind == TransitionKind::Internal) {
        ok = db == da;
      } else if (t->kind == TransitionKind::Acquire) {
        auto u = heap_union(*before, s->h);
        ok = u && heap_dom(*u) == da;
      } else {
        auto u = heap_union(*after, s->h);
        ok = u && heap_dom(*u) == db;
      }
      if (!ok) r.violations.push_back(t->name + ": footprint " + render(*before) + " => " + render(*after));
    }
  }
  return r;
}

CheckReport check_fork_join_closure(const Concurroid& c, Gen& g, std::size_t n) {
  CheckReport r{"fork-join-closure", c.name, n, 0, {}};
  for (std::size_t i = 0; i < n; ++i) {
    auto u = c.sample_state(g);
    if (!u) continue;
    ++r.applicable;
    {
      auto [t, rest] = random_split(g, u->self);
      State w{rest, u->joint, u->other};
      auto moved = realign_release(w, t);
      if (!moved || !c.coherent(*moved)) {
        r.violations.push_back("coherent with " + render(t) + " in self but not in other:\n" + render(*u));
      }
    }
    {
      auto [t, rest] = random_split(g, u->other);
      State w{u->self, u->joint, rest};
      auto moved = realign_acquire(w, t);
      if (!moved || !c.coherent(*moved)) {
        r.violations.push_back("coherent with " + render(t) + " in other but not in self:\n" + render(*u));
      }
    }
  }
  return r;
}

std::vector<CheckReport> check_concurroid(const Concurroid& c, Gen& g, std::size_t n) {
  std::vector<CheckReport> out;
  for (const Transition* t : all_transitions(c)) {
    out.push_back(check_guarantee(c, *t, g, n));
    out.push_back(check_locality(c, *t, g, n));
  }
  out.push_back(check_footprints(c, g, n));
  out.push_back(check_fork_join_closure(c, g, n));
  return out;
}

namespace {

std::set<Label> label_union(const std::set<Label>& a, const std::set<Label>& b) {
  std::set<Label> out = a;
  out.insert(b.begin(), b.end());
  return out;
}

std::optional<State> merge_disjoint(const State& a, const State& b) {
  auto m = merge(a, b);
  if (!m || !flatten(*m)) return std::nullopt;
  return m;
}

// Heap given away by the releasing side of a step.
Heap released_heap(const State& pre, const State& post) {
  auto before = flatten(pre);
  auto after = flatten(post);
  if (!before || !after) return {};
  Heap h;
  for (const auto& kv : *before) {
    if (!after->count(kv.first)) h.insert(kv);
  }
  return h;
}

Transition framed(const Transition& t, ConcurroidPtr own, ConcurroidPtr idle) {
  Transition out;
  out.name = t.name;
  out.kind = t.kind;
  out.is_id = t.is_id;
  std::set<Label> own_labels = own->labels;
  std::set<Label> idle_labels = idle->labels;
  auto inner_member = t.member;
  out.member = [inner_member, own_labels, idle_labels](const Heap& h, const State& pre, const State& post) {
    return restrict(pre, idle_labels) == restrict(post, idle_labels) &&
           inner_member(h, restrict(pre, own_labels), restrict(post, own_labels));
  };
  auto inner_sample = t.sample;
  out.sample = [inner_sample, idle](Gen& g, const Heap* want) -> std::optional<Sampled> {
    for (int attempt = 0; attempt < 4; ++attempt) {
      auto s = inner_sample(g, want);
      if (!s) return std::nullopt;
      auto other = idle->sample_state(g);
      if (!other) return std::nullopt;
      auto pre = merge_disjoint(s->pre, *other);
      auto post = merge_disjoint(s->post, *other);
      if (pre && post) return Sampled{s->h, std::move(*pre), std::move(*post)};
    }
    return std::nullopt;
  };
  return out;
}

Transition interconnect(const Transition& acq, ConcurroidPtr acq_side, const Transition& rel, ConcurroidPtr rel_side) {
  Transition out;
  out.name = acq.name + "⋈" + rel.name;
  std::set<Label> al = acq_side->labels, rl = rel_side->labels;
  auto am = acq.member, rm = rel.member;
  out.member = [am, rm, al, rl](const Heap& h, const State& pre, const State& post) {
    if (!h.empty()) return false;
    State rp = restrict(pre, rl), rq = restrict(post, rl);
    Heap moved = released_heap(rp, rq);
    return rm(moved, rp, rq) && am(moved, restrict(pre, al), restrict(post, al));
  };
  auto as = acq.sample, rs = rel.sample;
  out.sample = [as, rs](Gen& g, const Heap* want) -> std::optional<Sampled> {
    if (want) return std::nullopt;
    for (int attempt = 0; attempt < 4; ++attempt) {
      std::optional<Sampled> a, r;
      r = rs(g, nullptr);
      if (r) a = as(g, &r->h);
      if (!a || !r) {
        a = as(g, nullptr);
        r = a ? rs(g, &a->h) : std::nullopt;
      }
      if (!a || !r || !(a->h == r->h)) continue;
      auto pre = merge_disjoint(a->pre, r->pre);
      auto post = merge_disjoint(a->post, r->post);
      if (pre && post) return Sampled{{}, std::move(*pre), std::move(*post)};
    }
    return std::nullopt;
  };
  return out;
}

}  // namespace

ConcurroidPtr entangle(ConcurroidPtr u, ConcurroidPtr v) {
  for (Label l : v->labels) {
    if (u->labels.count(l)) throw std::invalid_argument("entangle: label overlap on " + label_name(l));
  }
  auto c = std::make_shared<Concurroid>();
  c->name = u->name + "⋊" + v->name;
  c->labels = label_union(u->labels, v->labels);
  std::set<Label> all = c->labels, ul = u->labels, vl = v->labels;
  c->coherent = [u, v, all, ul, vl](const State& w) {
    return labels_of(w) == all && validate(w) && u->coherent(restrict(w, ul)) && v->coherent(restrict(w, vl));
  };
  c->sample_state = [u, v](Gen& g) -> std::optional<State> {
    for (int attempt = 0; attempt < 4; ++attempt) {
      auto a = u->sample_state(g);
      auto b = v->sample_state(g);
      if (!a || !b) return std::nullopt;
      if (auto m = merge_disjoint(*a, *b)) return m;
    }
    return std::nullopt;
  };
  c->internals.push_back(identity_transition(c->sample_state));
  for (const auto& t : u->internals) {
    if (!t.is_id) c->internals.push_back(framed(t, u, v));
  }
  for (const auto& t : v->internals) {
    if (!t.is_id) c->internals.push_back(framed(t, v, u));
  }
  for (const auto& eu : u->externals) {
    for (const auto& ev : v->externals) {
      if (eu.acquire && ev.release) c->internals.push_back(interconnect(*eu.acquire, u, *ev.release, v));
      if (ev.acquire && eu.release) c->internals.push_back(interconnect(*ev.acquire, v, *eu.release, u));
    }
  }
  for (const auto& eu : u->externals) {
    ExternalPair p;
    if (eu.acquire) p.acquire = framed(*eu.acquire, u, v);
    if (eu.release) p.release = framed(*eu.release, u, v);
    c->externals.push_back(std::move(p));
  }
  return c;
}

ConcurroidPtr empty_concurroid() {
  auto c = std::make_shared<Concurroid>();
  c->name = "E";
  c->coherent = [](const State& w) { return w.self.empty() && w.joint.empty() && w.other.empty(); };
  c->sample_state = [](Gen&) -> std::optional<State> { return State{}; };
  c->internals.push_back(identity_transition(c->sample_state));
  return c;
}

bool member_of_some(const Concurroid& c, const State& pre, const State& post) {
  for (const auto& t : c.internals) {
    if (t.member(Heap{}, pre, post)) return true;
  }
  return false;
}

static std::set<std::string> names(const std::vector<Transition>& ts) {
  std::set<std::string> out;
  for (const auto& t : ts) out.insert(t.name);
  return out;
}

static std::set<std::string> external_names(const Concurroid& c) {
  std::set<std::string> out;
  for (const auto& e : c.externals) {
    if (e.acquire) out.insert(e.acquire->name);
    if (e.release) out.insert(e.release->name);
  }
  return out;
}

bool accepts_same(const Concurroid& a, const Concurroid& b, Gen& g, std::size_t n, std::string* why) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (a.labels != b.labels) return fail("label sets differ");
  if (names(a.internals) != names(b.internals)) return fail("internal transition names differ");
  if (external_names(a) != external_names(b)) return fail("external transition names differ");
  for (const Concurroid* x : {&a, &b}) {
    const Concurroid* y = x == &a ? &b : &a;
    for (std::size_t i = 0; i < n; ++i) {
      auto w = x->sample_state(g);
      if (w && !y->coherent(*w)) return fail(y->name + " rejects state of " + x->name + ":\n" + render(*w));
    }
    for (const auto& t : x->internals) {
      for (std::size_t i = 0; i < n; ++i) {
        auto s = t.sample(g, nullptr);
        if (s && !member_of_some(*y, s->pre, s->post)) {
          return fail(y->name + " rejects step " + t.name + " of " + x->name);
        }
      }
    }
  }
  return true;
}

}  // namespace histrio
