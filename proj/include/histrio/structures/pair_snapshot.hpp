#pragma once

#include "histrio/structures/common.hpp"

namespace histrio {

// Concurroid S: x ↦ (c_x, v_x), y ↦ (c_y, v_y) with histories of snapshots ⟨c_x, c_y, v_x⟩.
struct PairSnapshot {
  Label label = labels::sp;
  Loc x, y;
  ConcurroidPtr concurroid;
  ActionPtr read_x;   // () -> (c_x, v_x)
  ActionPtr read_y;   // () -> (c_y, v_y)
  ActionPtr write_x;  // (c) -> ()
  ActionPtr write_y;  // (c) -> ()

  // Initial state: versions 0, history {0 ↦ (s₀, s₀)} held by the environment.
  State initial(Value cx, Value cy) const;
  // Retries until two reads of x agree on the version; yields (c_x, c_y).
  Prog read_pair(std::uint32_t bound) const;
};

PairSnapshot make_pair_snapshot(Loc x = Loc{1}, Loc y = Loc{2});

Value snapshot(Value cx, Value cy, std::uint64_t vx);
// Version agreement and monotone versions on the combined history, plus well-formed snapshot payloads.
bool snapshot_history_ok(const History& tau);

}  // namespace histrio
