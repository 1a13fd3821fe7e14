#pragma once

#include "histrio/structures/common.hpp"

namespace histrio {

// Concurroid T: snt ↦ p ⊎ list(p, l) ⊎ grb with stack histories, and its entanglement with P.
struct TreiberStack {
  Label label = labels::tb;
  Loc snt;
  ConcurroidPtr concurroid;  // T
  ConcurroidPtr entangled;   // P ⋊ T
  ActionPtr read_sentinel;   // () -> Loc, over T
  ActionPtr read_node;       // (p) -> (e, next), over T
  ActionPtr try_pop;         // (p, p1) -> Bool, over T
  ActionPtr try_push;        // (p1, p) -> Bool, over P ⋊ T

  // P ⋊ T state: stack `contents` with nodes from `first_node` upward, history {0 ↦ (l, l)} in the environment.
  State initial(const std::vector<Value>& contents, Loc first_node, Heap private_heap = {}) const;
  Prog push(Expr e, std::uint32_t bound) const;
  Prog pop(std::uint32_t bound) const;
};

TreiberStack make_treiber(Loc snt = Loc{3});

// Φ for hiding a stack holding `contents`: the private sub-heap reachable from snt erases a T state whose
// self is g; g₀ = {0 ↦ (l, l)}.
PhiPtr hidden_stack(const TreiberStack& s, const std::vector<Value>& contents);

// T state over the given joint heap and histories.
State treiber_state(Heap joint, History self, History other);

}  // namespace histrio
