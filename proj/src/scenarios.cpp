#include "histrio/scenarios.hpp"

#include "histrio/specs.hpp"
#include "histrio/structures/private_heap.hpp"

namespace histrio {

namespace {

using namespace prog;

Failure fail(std::string s) { return s; }

// par(p₀, par(p₁, … p_k)) where level i hands thread i its share through split(i).
Prog nest(std::vector<Prog> threads, const std::function<SplitFn(std::size_t)>& split,
          const std::function<JoinCheck(std::size_t)>& check = nullptr) {
  Prog out = threads.back();
  for (std::size_t i = threads.size() - 1; i-- > 0;) {
    out = par(threads[i], out, split(i), check ? check(i) : nullptr);
  }
  return out;
}

SplitFn all_left(std::size_t) { return split_all_left(); }

// Left takes the given private cells, right keeps the rest; other labels go right.
SplitFn split_cells(std::set<Loc> cells) {
  return [cells](const PcmMap& self, const Env&) {
    PcmMap a = unit_map(self), b = self;
    const Heap& h = self.at(labels::pv).heap();
    Heap mine = heap_restrict(h, cells);
    a[labels::pv] = PcmElement(mine);
    b[labels::pv] = PcmElement(*heap_subtract(h, mine));
    return std::pair{a, b};
  };
}

Value nested_at(const Value& v, std::size_t i, std::size_t n) {
  const Value* cur = &v;
  for (std::size_t k = 0; k < i; ++k) cur = &cur->at(1);
  return i + 1 == n ? *cur : cur->at(0);
}

Failure check_stack_history(const History& h) {
  if (!is_complete(h)) return fail("history not complete:\n" + render(h));
  if (!is_continuous(h)) return fail("history not continuous:\n" + render(h));
  if (!is_stacklike(h)) return fail("history not stacklike:\n" + render(h));
  return std::nullopt;
}

}  // namespace

Value pushed_element(std::size_t thread, std::size_t k) { return Value::nat(10 * (thread + 1) + k + 1); }
Value written_value(std::size_t writer, std::size_t k) { return Value::nat(10 * (writer + 1) + k + 1); }

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"pair-snapshot", "treiber",      "producer-consumer",
                                              "flat-combiner", "seq-recovery", "straight-line",
                                              "racy-snapshot"};
  return names;
}

ScenarioConfig default_config(const std::string& name) {
  if (name == "pair-snapshot" || name == "racy-snapshot") return {3, 2, 3};
  if (name == "treiber") return {3, 1, 3};
  if (name == "producer-consumer") return {2, 3, 3};
  if (name == "flat-combiner") return {3, 1, 3};
  if (name == "seq-recovery") return {1, 2, 3};
  return {2, 2, 3};
}

std::size_t default_step_bound(const std::string& name) { return name == "producer-consumer" ? 60 : 40; }

namespace {

Scenario snapshot_scenario(const ScenarioConfig& c, bool racy) {
  PairSnapshot ps = make_pair_snapshot();
  Scenario s;
  s.name = racy ? "racy-snapshot" : "pair-snapshot";
  s.concurroid = ps.concurroid;
  s.init = ps.initial(Value::nat(0), Value::nat(0));
  Prog reader = ps.read_pair(c.loop_bound);
  if (racy) {
    reader = let(act(ps.read_x), "rx", let(act(ps.read_y), "ry", ret([](const Env& e) {
                                              return Value::pair(e.at("rx").at(0), e.at("ry").at(0));
                                            })));
  }
  std::vector<Prog> threads{spec(spec_read_pair(), no_args(), reader)};
  for (std::size_t w = 0; w + 1 < std::max<std::size_t>(c.threads, 2); ++w) {
    std::vector<Prog> writes;
    for (std::size_t k = 0; k < c.ops; ++k) {
      bool on_x = k % 2 == 0;
      Value v = written_value(w, k);
      writes.push_back(spec(spec_write(on_x), args({lit(v)}), act(on_x ? ps.write_x : ps.write_y, args({lit(v)}))));
    }
    threads.push_back(writes.empty() ? ret_unit() : seq(writes));
  }
  std::size_t n = threads.size();
  s.program = nest(threads, all_left);
  s.final_check = [n](const State& v, const Value& r) -> Failure {
    auto chi = total_history(v, labels::sp);
    if (!chi || !is_complete(*chi) || !is_continuous(*chi) || !snapshot_history_ok(*chi)) {
      return fail("final snapshot history malformed");
    }
    return check_read_pair_monolithic(*chi, nested_at(r, 0, n));
  };
  return s;
}

}  // namespace

Scenario pair_snapshot_scenario(const ScenarioConfig& c) { return snapshot_scenario(c, false); }
Scenario racy_snapshot_scenario(const ScenarioConfig& c) { return snapshot_scenario(c, true); }

Scenario treiber_scenario(const ScenarioConfig& c) {
  TreiberStack tr = make_treiber();
  Scenario s;
  s.name = "treiber";
  s.concurroid = tr.entangled;
  s.init = tr.initial({}, Loc{200});
  std::vector<Prog> threads;
  Multiset expected;
  std::size_t pushers = std::max<std::size_t>(c.threads, 2) - 1;
  for (std::size_t t = 0; t < pushers; ++t) {
    std::vector<Prog> ops;
    for (std::size_t k = 0; k < c.ops; ++k) {
      Value e = pushed_element(t, k);
      ++expected[e];
      ops.push_back(spec(spec_push(), args({lit(e)}), tr.push(lit(e), c.loop_bound)));
    }
    threads.push_back(ops.empty() ? ret_unit() : seq(ops));
  }
  std::vector<Prog> pops;
  for (std::size_t k = 0; k < c.ops; ++k) pops.push_back(spec(spec_pop(), no_args(), inject({labels::tb}, tr.pop(c.loop_bound))));
  threads.push_back(pops.empty() ? ret_unit() : seq(pops));
  s.program = nest(threads, all_left);
  Loc snt = tr.snt;
  s.final_check = [expected, snt](const State& v, const Value&) -> Failure {
    auto h = total_history(v, labels::tb);
    if (!h) return fail("final history undefined");
    if (auto e = check_stack_history(*h)) return e;
    if (!stack_invariant(*h, joint_of(v, labels::tb).heap, snt)) return fail("final list differs from the last history entry");
    if (pushed(*h) != expected) return fail("pushed " + render(pushed(*h)) + " expected " + render(expected));
    Multiset pu = pushed(*h);
    for (const auto& [e, k] : popped(*h)) {
      if (pu[e] < k) return fail("popped " + e.render() + " more often than pushed");
    }
    return std::nullopt;
  };
  return s;
}

Scenario producer_consumer_scenario(const ScenarioConfig& c) {
  TreiberStack tr = make_treiber();
  std::size_t n = c.ops;
  Loc ap{20}, ac{30};
  Heap mine;
  std::set<Loc> ap_cells;
  for (std::size_t i = 0; i < n; ++i) {
    mine[Loc{ap.id + i}] = Value::nat(i + 1);
    mine[Loc{ac.id + i}] = Value::nat(0);
    ap_cells.insert(Loc{ap.id + i});
  }
  State init = tr.initial({}, Loc{200}, mine);
  std::swap(init.self[labels::tb], init.other[labels::tb]);

  std::vector<Prog> produce, consume;
  for (std::size_t i = 0; i < n; ++i) {
    produce.push_back(let(inject({labels::pv}, read(lit(Value::loc(Loc{ap.id + i})))), "e", tr.push(var("e"), c.loop_bound)));
    consume.push_back(let(loop(inject({labels::tb}, tr.pop(c.loop_bound)), c.loop_bound), "r",
                          inject({labels::pv}, write(lit(Value::loc(Loc{ac.id + i})), var("r")))));
  }
  Prog producer = spec(spec_produce(ap, n), no_args(), produce.empty() ? ret_unit() : seq(produce));
  Prog consumer = spec(spec_consume(ac, n), no_args(), consume.empty() ? ret_unit() : seq(consume));

  SplitFn split = [ap_cells](const PcmMap& self, const Env& env) {
    auto [a, b] = split_cells(ap_cells)(self, env);
    a[labels::tb] = self.at(labels::tb);
    b[labels::tb] = unit_of(self.at(labels::tb));
    return std::pair{a, b};
  };
  Scenario s;
  s.name = "producer-consumer";
  s.concurroid = tr.entangled;
  s.init = init;
  s.program = par(producer, consumer, split, lemma_join_check());
  s.final_check = [ap, ac, n](const State& v, const Value&) {
    return oracle_exchange(self_heap(v, labels::pv), ap, ac, n);
  };
  return s;
}

Scenario flat_combiner_scenario(const ScenarioConfig& c) {
  std::size_t k = std::max<std::size_t>(c.threads, 1);
  FlatCombiner fc = make_flat_combiner(k);
  Scenario s;
  s.name = "flat-combiner";
  s.concurroid = fc.entangled;
  s.init = fc.initial({}, Loc{200});
  std::vector<Prog> threads;
  Multiset expected;
  for (std::size_t t = 0; t < k; ++t) {
    std::vector<Prog> ops;
    for (std::size_t j = 0; j < c.ops; ++j) {
      Value e = pushed_element(t, j);
      ++expected[e];
      ThreadId tid = static_cast<ThreadId>(t);
      ops.push_back(spec(spec_flat_combine(fc, tid, "push"), args({lit(e)}), fc.flat_combine(tid, "push", lit(e), c.loop_bound)));
    }
    threads.push_back(ops.empty() ? ret_unit() : seq(ops));
  }
  Label fl = fc.label;
  s.program = nest(threads, [fl](std::size_t i) -> SplitFn {
    return [fl, i](const PcmMap& self, const Env&) {
      PcmMap a = unit_map(self), b = self;
      const Triple& tr = self.at(fl).triple();
      IdSet rest = tr.ids;
      rest.erase(static_cast<ThreadId>(i));
      a[fl] = PcmElement(IdSet{static_cast<ThreadId>(i)}, Mutex::NotOwn, unit_of(*tr.aux));
      b[fl] = PcmElement(rest, tr.mutex, *tr.aux);
      return std::pair{a, b};
    };
  });
  s.final_check = [fc, expected](const State& v, const Value&) -> Failure {
    auto view = fc.inspect(v);
    if (!view || !view->total) return fail("final fc state malformed");
    if (auto e = check_stack_history(*view->total)) return e;
    if (pushed(*view->total) != expected) return fail("pushed " + render(pushed(*view->total)) + " expected " + render(expected));
    if (!popped(*view->total).empty()) return fail("unexpected pops");
    return std::nullopt;
  };
  return s;
}

Scenario seq_recovery_scenario(const ScenarioConfig& c) {
  TreiberStack tr = make_treiber();
  std::vector<Value> l;
  for (std::size_t i = 0; i < c.ops; ++i) l.push_back(Value::nat(i + 1));
  Value e = pushed_element(0, 8);
  std::vector<Value> el = l;
  el.insert(el.begin(), e);
  Heap stack = joint_of(tr.initial(l, Loc{200}), labels::tb).heap;

  History expected = make_history(HistKind::Stack, {{0, Entry{Value::list(l), Value::list(l)}}, {1, Entry{Value::list(l), Value::list(el)}}});
  Loc snt = tr.snt;
  HideCheck check = [expected, snt, el](const PcmElement& g, const Heap& h) -> Failure {
    if (!g.is_history() || !(g.history() == expected)) return fail("recovered history\n" + g.render() + "\nexpected\n" + render(expected));
    auto got = read_stack(h, snt);
    if (!got || *got != el) return fail("returned heap " + render(h) + " does not hold " + Value::list(el).render());
    for (const auto& [loc, v] : h) {
      if (loc != snt && !is_node(v)) return fail("stray cell " + render(loc));
    }
    return std::nullopt;
  };
  Scenario s;
  s.name = "seq-recovery";
  s.concurroid = private_heap().concurroid;
  s.init = private_state(stack);
  s.program = hide(hidden_stack(tr, l), tr.entangled, spec(spec_push(), args({lit(e)}), tr.push(lit(e), c.loop_bound)), check);
  s.final_check = [snt, el](const State& v, const Value&) -> Failure {
    auto got = read_stack(self_heap(v, labels::pv), snt);
    if (!got || *got != el) return fail("final private heap does not hold " + Value::list(el).render());
    return std::nullopt;
  };
  return s;
}

Scenario straight_line_scenario(const ScenarioConfig& c) {
  std::size_t k = std::max<std::size_t>(c.threads, 1);
  Heap mine;
  std::vector<Prog> threads;
  std::vector<std::set<Loc>> cells(k);
  for (std::size_t t = 0; t < k; ++t) {
    std::vector<Prog> writes;
    for (std::size_t j = 0; j < c.ops; ++j) {
      Loc x{20 + t * c.ops + j};
      mine[x] = Value::nat(0);
      cells[t].insert(x);
      writes.push_back(write(lit(Value::loc(x)), lit(Value::nat(j + 1))));
    }
    threads.push_back(writes.empty() ? ret_unit() : seq(writes));
  }
  Scenario s;
  s.name = "straight-line";
  s.concurroid = private_heap().concurroid;
  s.init = private_state(mine);
  s.program = nest(threads, [cells](std::size_t i) { return split_cells(cells[i]); });
  std::size_t ops = c.ops;
  s.final_check = [ops](const State& v, const Value&) -> Failure {
    for (const auto& [x, val] : self_heap(v, labels::pv)) {
      if (val != Value::nat((x.id - 20) % ops + 1)) return fail("cell " + render(x) + " holds " + val.render());
    }
    return std::nullopt;
  };
  return s;
}

std::optional<Scenario> make_scenario(const std::string& name, const ScenarioConfig& c) {
  if (name == "pair-snapshot") return pair_snapshot_scenario(c);
  if (name == "treiber") return treiber_scenario(c);
  if (name == "producer-consumer") return producer_consumer_scenario(c);
  if (name == "flat-combiner") return flat_combiner_scenario(c);
  if (name == "seq-recovery") return seq_recovery_scenario(c);
  if (name == "straight-line") return straight_line_scenario(c);
  if (name == "racy-snapshot") return racy_snapshot_scenario(c);
  return std::nullopt;
}

}  // namespace histrio
