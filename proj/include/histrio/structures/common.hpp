#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "histrio/actions.hpp"
#include "histrio/program.hpp"

namespace histrio {

// Guards the step with the safety predicate so that unsafe states never step.
ActionPtr make_action(AtomicAction a);

StepOutcome outcome(State post, Value result, std::string transition, Heap exchanged = {});

// Self • other of a history-valued label, or of the auxiliary of a triple-valued one.
std::optional<History> total_history(const State& w, Label l);
const History& self_history(const State& w, Label l);
const Heap& self_heap(const State& w, Label l);

State set_self(State w, Label l, PcmElement e);
State set_joint_heap(State w, Label l, Heap h);

History singleton(HistKind kind, Timestamp t, Value pre, Value post);

// Nodes are p ↦ (e, next).
bool is_node(const Value& v);
Value node(Value e, Loc next);
// Follows nodes from the sentinel; nullopt when the chain is malformed or cyclic.
std::optional<std::vector<Value>> read_stack(const Heap& h, Loc snt, std::set<Loc>* reached = nullptr);
// Last post-state of a stack history, or the empty stack.
std::vector<Value> stack_contents(const History& tau);
// I(τ)(h): τ is a complete, continuous, stacklike history whose last state is the list hanging off snt,
// and every other cell of h is a node.
bool stack_invariant(const History& tau, const Heap& h, Loc snt);
// A heap satisfying the stack invariant for `contents`, with fresh nodes and `garbage` unlinked ones.
Heap build_stack(Gen& g, Loc snt, const std::vector<Value>& contents, std::size_t garbage);
// A complete history whose last state is `contents`, built by pushes from [].
History history_reaching(const std::vector<Value>& contents);

Value list_value(const std::vector<Value>& items);

}  // namespace histrio
