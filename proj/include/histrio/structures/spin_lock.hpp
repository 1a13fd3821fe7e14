#pragma once

#include "histrio/structures/common.hpp"

namespace histrio {

// Concurroid L: a lock bit guarding a resource cell r with Inv(g)(h) ≡ h = {r ↦ last(g)}.
struct SpinLock {
  Label label = labels::lk;
  Loc lk, r;
  ConcurroidPtr concurroid;  // L
  ConcurroidPtr entangled;   // P ⋊ L
  ActionPtr trylock;         // () -> Bool, over P ⋊ L
  ActionPtr unlock;          // () -> (), over P ⋊ L

  std::string lock_name() const;    // release transition ρ_L
  std::string unlock_name() const;  // acquire transition α_L
  // P ⋊ L state with the lock free, r ↦ contents, history {0 ↦ (l, l)} in the environment.
  State initial(const std::vector<Value>& contents, Heap private_heap = {}) const;
};

SpinLock make_spin_lock(Label label = labels::lk, Loc lk = Loc{4}, Loc r = Loc{7});

}  // namespace histrio
