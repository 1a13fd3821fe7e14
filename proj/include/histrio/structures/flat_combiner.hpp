#pragma once

#include <map>

#include "histrio/structures/common.hpp"

namespace histrio {

// A function the combiner may run on behalf of a requester.
struct FcFunction {
  std::string name;
  // f_spec(x, result, g, gΔ)
  std::function<bool(const Value& x, const Value& result, const History& g, const History& delta)> spec;
  // Sequential implementation over P; the argument is bound to `fc_arg`.
  Prog program;
};

// Read-only decomposition of the fc component of a view.
struct FcView {
  IdSet ids;
  Mutex mutex = Mutex::NotOwn;
  History self_aux;
  bool locked = false;
  std::vector<Value> stat;
  std::optional<History> total;  // ⊎g_p • g_S • g_O
};

// Concurroid F over a stack resource: lock, publication array a_p, auxiliary array g_p, resource heap h_r.
struct FlatCombiner {
  Label label = labels::fc;
  Loc lk, ap, snt_r;
  std::size_t n = 0;
  std::map<std::string, FcFunction> functions;
  ConcurroidPtr concurroid;  // F
  ConcurroidPtr entangled;   // P ⋊ F
  ActionPtr req_help;        // (tid, Req(f, x)) -> ()
  ActionPtr read_req;        // (i) -> Stat
  ActionPtr do_help;         // (i, w) -> ()
  ActionPtr try_lock;        // () -> Bool
  ActionPtr unlock;          // () -> ()
  ActionPtr try_collect;     // (tid) -> Opt

  Loc slot(std::size_t i) const { return Loc{ap.id + i}; }
  std::optional<FcView> inspect(const State& w) const;
  // P ⋊ F state: lock free, all slots Init, stack `contents` with nodes from `first_node`,
  // self holding every slot id, history {0 ↦ (l, l)} in the environment.
  State initial(const std::vector<Value>& contents, Loc first_node) const;
  Prog flat_combine(ThreadId tid, const std::string& f, Expr x, std::uint32_t bound) const;
};

FlatCombiner make_flat_combiner(std::size_t n, Loc lk = Loc{5}, Loc ap = Loc{10}, Loc snt_r = Loc{6});

// f_spec for the stack instantiation.
bool fspec_push(const Value& x, const Value& result, const History& g, const History& delta);
bool fspec_pop(const Value& x, const Value& result, const History& g, const History& delta);

}  // namespace histrio
