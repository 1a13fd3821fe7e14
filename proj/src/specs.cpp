#include "histrio/specs.hpp"

namespace histrio {

namespace {

Failure fail(std::string s) { return s; }

std::optional<Timestamp> max_stamp(const History& h) { return last_stamp(h); }

bool at_or_after(Timestamp t, const History& tau) {
  auto m = max_stamp(tau);
  return !m || t >= *m;
}

std::optional<History> grown_by(const History& before, const History& after) {
  if (!is_subset(before, after)) return std::nullopt;
  return history_subtract(after, before);
}

const PcmElement& self_elem(const State& w, Label l) { return self_of(w, l); }

}  // namespace

std::string render_stamp_bound(const History& tau) {
  auto m = max_stamp(tau);
  return m ? std::to_string(*m) : std::string("-");
}

SpecPtr spec_read_pair(Label l) {
  auto s = std::make_shared<MethodSpec>();
  s->name = "readPair";
  s->post = [l](const State& entry, const Args&, const State& exit, const Value& r) -> Failure {
    if (!(self_elem(entry, l) == self_elem(exit, l))) return fail("self history changed");
    auto tau = total_history(entry, l);
    auto chi = total_history(exit, l);
    if (!tau || !chi || !is_subset(*tau, *chi)) return fail("entry history is not a prefix of the exit history");
    if (!r.is(Value::Kind::Tuple) || r.size() != 2) return fail("result " + r.render() + " is not a pair");
    for (const auto& [t, e] : chi->entries) {
      if (at_or_after(t, *tau) && e.post.at(0) == r.at(0) && e.post.at(1) == r.at(1)) return std::nullopt;
    }
    return fail("no stamp ≥ " + render_stamp_bound(*tau) + " houses " + r.render() + " in\n" + render(*chi));
  };
  return s;
}

static SpecPtr read_cell_spec(Label l, bool on_x) {
  auto s = std::make_shared<MethodSpec>();
  s->name = on_x ? "readX" : "readY";
  s->post = [l, on_x](const State& entry, const Args&, const State& exit, const Value& r) -> Failure {
    if (!(self_elem(entry, l) == self_elem(exit, l))) return fail("self history changed");
    auto tau = total_history(entry, l);
    auto chi = total_history(exit, l);
    if (!tau || !chi || !is_subset(*tau, *chi)) return fail("entry history is not a prefix of the exit history");
    for (const auto& [t, e] : chi->entries) {
      if (!at_or_after(t, *tau)) continue;
      if (on_x && e.post.at(0) == r.at(0) && e.post.at(2) == r.at(1)) return std::nullopt;
      if (!on_x && e.post.at(1) == r.at(0)) return std::nullopt;
    }
    return fail("no stamp ≥ " + render_stamp_bound(*tau) + " houses " + r.render());
  };
  return s;
}

SpecPtr spec_read_x(Label l) { return read_cell_spec(l, true); }
SpecPtr spec_read_y(Label l) { return read_cell_spec(l, false); }

SpecPtr spec_write(bool on_x, Label l) {
  auto s = std::make_shared<MethodSpec>();
  s->name = on_x ? "writeX" : "writeY";
  s->post = [l, on_x](const State& entry, const Args& args, const State& exit, const Value&) -> Failure {
    auto tau = total_history(entry, l);
    auto delta = grown_by(self_history(entry, l), self_history(exit, l));
    if (!tau || !delta || delta->size() != 1) return fail("self history did not grow by one entry");
    const auto& [t, e] = *delta->entries.begin();
    if (!at_or_after(t, *tau) || tau->contains(t)) return fail("entry stamp " + std::to_string(t) + " is not fresh");
    if (e.post.at(on_x ? 0 : 1) != args.at(0)) return fail("entry " + e.post.render() + " misses " + args.at(0).render());
    return std::nullopt;
  };
  return s;
}

Failure check_read_pair_monolithic(const History& chi, const Value& result) {
  for (const auto& [t, e] : chi.entries) {
    if (e.post.at(0) == result.at(0) && e.post.at(1) == result.at(1)) return std::nullopt;
  }
  return fail(result.render() + " never coexisted");
}

Failure oracle_snapshot_validity(const Trace& trace, Label l) {
  if (!trace.final_view.self.count(l)) return fail("trace has no final snapshot history");
  auto chi = total_history(trace.final_view, l);
  if (!chi) return fail("final snapshot history undefined");
  for (const auto& r : trace.returns) {
    if (r.method != "readPair") continue;
    if (auto e = check_read_pair_monolithic(*chi, r.result)) return fail("readPair at step " + std::to_string(r.step) + ": " + *e);
  }
  return std::nullopt;
}

SpecPtr spec_push(Label l) {
  auto s = std::make_shared<MethodSpec>();
  s->name = "push";
  s->post = [l](const State& entry, const Args& args, const State& exit, const Value& r) -> Failure {
    if (r != Value::unit()) return fail("push returned " + r.render());
    if (entry.self.count(labels::pv) && !(self_elem(entry, labels::pv) == self_elem(exit, labels::pv))) {
      return fail("private heap changed");
    }
    auto tau = total_history(entry, l);
    auto delta = grown_by(self_history(entry, l), self_history(exit, l));
    if (!tau || !delta || delta->size() != 1) return fail("self history did not grow by a singleton");
    const auto& [t, e] = *delta->entries.begin();
    if (tau->contains(t) || !at_or_after(t, *tau) || t == 0) return fail("stamp " + std::to_string(t) + " not after τ");
    std::vector<Value> l2 = e.pre.items();
    l2.insert(l2.begin(), args.at(0));
    if (e.post != Value::list(l2)) return fail("entry " + e.pre.render() + " -> " + e.post.render() + " is not a push of " + args.at(0).render());
    return std::nullopt;
  };
  return s;
}

SpecPtr spec_pop(Label l) {
  auto s = std::make_shared<MethodSpec>();
  s->name = "pop";
  s->post = [l](const State& entry, const Args&, const State& exit, const Value& r) -> Failure {
    auto tau = total_history(entry, l);
    auto chi = total_history(exit, l);
    auto delta = grown_by(self_history(entry, l), self_history(exit, l));
    if (!tau || !chi || !delta || !is_subset(*tau, *chi)) return fail("histories do not grow");
    if (r.is_some()) {
      if (delta->size() != 1) return fail("Some-pop did not add exactly one entry");
      const auto& [t, e] = *delta->entries.begin();
      if (tau->contains(t) || !at_or_after(t, *tau) || t == 0) return fail("stamp " + std::to_string(t) + " not after τ");
      if (e.pre.items().empty() || e.pre.items().front() != r.at(0)) return fail("popped " + r.render() + " from " + e.pre.render());
      std::vector<Value> rest(e.pre.items().begin() + 1, e.pre.items().end());
      if (e.post != Value::list(rest)) return fail("entry is not a pop");
      return std::nullopt;
    }
    if (!r.is_none()) return fail("pop returned " + r.render());
    if (!delta->empty()) return fail("None-pop changed self");
    for (const auto& [t, e] : chi->entries) {
      if (at_or_after(t, *tau) && e.post == Value::list({})) return std::nullopt;
    }
    return fail("no nil at a stamp ≥ " + render_stamp_bound(*tau));
  };
  return s;
}

static std::vector<Value> cells(const Heap& h, Loc base, std::size_t n) {
  std::vector<Value> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = h.find(Loc{base.id + i});
    out.push_back(it == h.end() ? Value::none() : it->second);
  }
  return out;
}

SpecPtr spec_produce(Loc ap, std::size_t n, Label l) {
  auto s = std::make_shared<MethodSpec>();
  s->name = "produce";
  s->post = [ap, n, l](const State& entry, const Args&, const State& exit, const Value&) -> Failure {
    auto delta = grown_by(self_history(entry, l), self_history(exit, l));
    if (!delta) return fail("self history shrank");
    auto elems = cells(self_heap(exit, labels::pv), ap, n);
    if (elems != cells(self_heap(entry, labels::pv), ap, n)) return fail("ap changed");
    if (pushed(*delta) != multiset_of(elems)) return fail("pushed " + render(pushed(*delta)) + " ≠ ap " + render(multiset_of(elems)));
    if (!popped(*delta).empty()) return fail("producer popped");
    return std::nullopt;
  };
  return s;
}

SpecPtr spec_consume(Loc ac, std::size_t n, Label l) {
  auto s = std::make_shared<MethodSpec>();
  s->name = "consume";
  s->post = [ac, n, l](const State& entry, const Args&, const State& exit, const Value&) -> Failure {
    auto delta = grown_by(self_history(entry, l), self_history(exit, l));
    if (!delta) return fail("self history shrank");
    auto elems = cells(self_heap(exit, labels::pv), ac, n);
    if (popped(*delta) != multiset_of(elems)) return fail("popped " + render(popped(*delta)) + " ≠ ac " + render(multiset_of(elems)));
    if (multiset_size(popped(*delta)) != n) return fail("consumer popped the wrong number of elements");
    if (!pushed(*delta).empty()) return fail("consumer pushed");
    return std::nullopt;
  };
  return s;
}

JoinCheck lemma_join_check(Label l) {
  return [l](const State& left, const State& right, const Value&, const Value&) -> Failure {
    const History& h1 = self_history(left, l);
    const History& h2 = self_history(right, l);
    if (!lemma1_oracle(h1, h2)) return fail("pushed/popped do not distribute over the join");
    auto h = history_join(h1, h2);
    if (!h || !is_complete(*h) || !is_stacklike(*h)) return fail("joined history is not complete and stacklike");
    if (multiset_size(pushed(*h)) != multiset_size(popped(*h))) return fail("pushed and popped sizes differ");
    if (!lemma2_oracle(*h)) return fail("pushed ≠ popped on " + render(*h));
    return std::nullopt;
  };
}

Failure oracle_exchange(const Heap& h, Loc ap, Loc ac, std::size_t n) {
  auto a = multiset_of(cells(h, ap, n));
  auto c = multiset_of(cells(h, ac, n));
  if (a != c) return fail("ac " + render(c) + " is not a permutation of ap " + render(a));
  return std::nullopt;
}

SpecPtr spec_flat_combine(const FlatCombiner& fc, ThreadId tid, std::string f) {
  auto s = std::make_shared<MethodSpec>();
  s->name = "flatCombine(" + f + ")";
  FlatCombiner shape = fc;
  auto spec = fc.functions.at(f).spec;
  s->pre = [shape, tid](const State& entry, const Args&) -> Failure {
    auto v = shape.inspect(entry);
    if (!v) return fail("no fc component");
    if (!v->ids.count(tid)) return fail("caller does not hold slot " + std::to_string(tid));
    if (v->mutex != Mutex::NotOwn) return fail("caller holds the lock");
    if (!v->stat.at(tid).is(Value::Kind::Init)) return fail("slot already requests help");
    return std::nullopt;
  };
  s->post = [shape, tid, spec, f](const State& entry, const Args& args, const State& exit, const Value& r) -> Failure {
    auto a = shape.inspect(entry);
    auto b = shape.inspect(exit);
    if (!a || !b || !a->total || !b->total) return fail("no fc component");
    if (!b->stat.at(tid).is(Value::Kind::Init)) return fail("slot not restored to Init");
    if (b->mutex != Mutex::NotOwn) return fail("lock still held");
    if (!(self_of(entry, labels::pv) == self_of(exit, labels::pv))) return fail("private heap changed");
    auto delta = grown_by(a->self_aux, b->self_aux);
    if (!delta) return fail("self auxiliary did not grow");
    const History& tau = *a->total;
    const History& chi = *b->total;
    if (!is_subset(tau, chi)) return fail("total auxiliary shrank");
    const Value& x = args.at(0);
    bool found = false;
    for (std::size_t k = tau.size(); k <= chi.size() && !found; ++k) {
      History g = make_history(HistKind::Stack);
      for (const auto& [t, e] : chi.entries) {
        if (t < k) g.entries[t] = e;
      }
      found = is_subset(tau, g) && spec(x, r, g, *delta);
    }
    if (!found) return fail("no g' ⊒ g satisfies f_spec for gΔ =\n" + render(*delta));
    if (f == "push" || (f == "pop" && r.is_some())) {
      if (delta->size() != 1) return fail("gΔ is not a singleton");
      Timestamp t = delta->entries.begin()->first;
      if (!at_or_after(t, tau) || tau.contains(t)) return fail("gΔ stamp " + std::to_string(t) + " not fresh");
    }
    return std::nullopt;
  };
  return s;
}

}  // namespace histrio
