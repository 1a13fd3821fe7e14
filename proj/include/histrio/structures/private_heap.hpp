#pragma once

#include "histrio/structures/common.hpp"

namespace histrio {

// Concurroid P of thread-private heaps under label pv.
struct PrivateHeap {
  ConcurroidPtr concurroid;
  ActionPtr alloc;    // () -> Loc
  ActionPtr write;    // (x, v) -> ()
  ActionPtr read;     // (x) -> v
  ActionPtr dealloc;  // (x) -> ()
};

const PrivateHeap& private_heap();

// Coherent P state with the given private heap and an empty environment.
State private_state(Heap self, Heap other = {});

namespace prog {
Prog alloc();
Prog write(Expr x, Expr v);
Prog read(Expr x);
}  // namespace prog

}  // namespace histrio
