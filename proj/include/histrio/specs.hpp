#pragma once

#include "histrio/scheduler.hpp"
#include "histrio/structures/flat_combiner.hpp"
#include "histrio/structures/pair_snapshot.hpp"
#include "histrio/structures/treiber.hpp"

namespace histrio {

// Pair snapshot. τ is the combined history at call entry, χ the one at return.
// readPair: self unchanged, τ ⊑ χ, and ∃t ≥ max dom τ with ⟨c_x, c_y, −⟩ = χ[t].
SpecPtr spec_read_pair(Label l = labels::sp);
// readX: ∃t ≥ max dom τ with χ[t] = ⟨c_x, −, v_x⟩; readY: ∃t ≥ max dom τ with χ[t] = ⟨−, c_y, −⟩.
SpecPtr spec_read_x(Label l = labels::sp);
SpecPtr spec_read_y(Label l = labels::sp);
// writeX(c)/writeY(c): self grows by one fresh entry whose post holds c.
SpecPtr spec_write(bool on_x, Label l = labels::sp);
// The weaker single-history form: some entry of χ houses the pair.
Failure check_read_pair_monolithic(const History& chi, const Value& result);
// Every readPair return equals the post of some entry of the final combined history.
Failure oracle_snapshot_validity(const Trace& trace, Label l = labels::sp);

// Treiber: push(e) grows self by {t ↦ (l, e::l)} with t > max dom τ and leaves the private heap as it was;
// pop grows self by {t ↦ (e::l, l)} on Some e, and on None leaves self unchanged having seen nil at some t ≥ max dom τ.
SpecPtr spec_push(Label l = labels::tb);
SpecPtr spec_pop(Label l = labels::tb);

// Producer/consumer over arrays of n cells at ap and ac.
SpecPtr spec_produce(Loc ap, std::size_t n, Label l = labels::tb);
SpecPtr spec_consume(Loc ac, std::size_t n, Label l = labels::tb);
// Push/pop distribution over the sibling histories, then balanced accounting on their union.
JoinCheck lemma_join_check(Label l = labels::tb);
// The final ac cells are a permutation of the ap cells.
Failure oracle_exchange(const Heap& h, Loc ap, Loc ac, std::size_t n);

// flatCombine(f, x) by slot tid: NoReq restored, private heap unchanged, self auxiliary grown by exactly gΔ
// with f_spec(x, r, g', gΔ) for some g' between the entry total and the exit total.
SpecPtr spec_flat_combine(const FlatCombiner& fc, ThreadId tid, std::string f);

std::string render_stamp_bound(const History& tau);

}  // namespace histrio
