#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "histrio/concurroid.hpp"

namespace histrio {

// A heap access of the uninstrumented program.
struct PrimitiveAtomic {
  enum class Kind : std::uint8_t { Read, Write, Skip, Rmw, Alloc, Free };

  Kind kind = Kind::Skip;
  Loc loc;
  Value value;                                   // Write
  std::function<Value(const Value&)> f;          // Rmw update
  std::function<Value(const Value&)> g;          // Rmw result
  std::string shape;                             // human-readable Rmw name

  std::string render() const;
};

PrimitiveAtomic prim_read(Loc l);
PrimitiveAtomic prim_write(Loc l, Value v);
PrimitiveAtomic prim_skip();
PrimitiveAtomic prim_rmw(Loc l, std::string shape, std::function<Value(const Value&)> f,
                         std::function<Value(const Value&)> g);
// Allocation from the run's monotone location counter.
PrimitiveAtomic prim_alloc();
PrimitiveAtomic prim_free(Loc l);
PrimitiveAtomic cas(Loc l, Value expected, Value desired);

struct MemoryFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs a primitive on a concrete heap; throws MemoryFault on a dangling access.
Value apply_primitive(const PrimitiveAtomic& p, Heap& heap, std::uint64_t& next_loc);

enum class ResultType : std::uint8_t { Unit, Bool, Value, Pair, Option };

struct Allocator {
  std::uint64_t next = 1000;
  Loc fresh() { return Loc{next++}; }
};

struct StepOutcome {
  State post;
  Value result;
  std::string transition;
  Heap exchanged;  // heap moved by an external transition
};

struct AtomicAction {
  std::string name;
  ConcurroidPtr concurroid;
  ResultType result_type = ResultType::Unit;
  std::function<bool(const State&, const Args&)> safe;
  std::function<StepOutcome(const State&, const Args&, Allocator&)> step;
  std::vector<std::string> claimed;
  std::function<PrimitiveAtomic(const Args&)> erasure;
  // Produces a coherent state and arguments for property checks.
  std::function<std::optional<std::pair<State, Args>>(Gen&)> sample;
};

using ActionPtr = std::shared_ptr<const AtomicAction>;

struct SafetyFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AtomicEvent {
  State pre;
  State post;
  Value result;
  std::string transition;
  Heap exchanged;
};

PrimitiveAtomic erase(const AtomicAction& a, const Args& args);

// Checks safety, steps, and validates the claimed transition; throws SafetyFault when unsafe.
AtomicEvent run_atomic(const AtomicAction& a, const State& w, const Args& args, Allocator& alloc);

// Whether (pre, post) with exchanged heap h belongs to the named transition of c.
bool transition_member(const Concurroid& c, const std::string& name, const Heap& h, const State& pre,
                       const State& post);

struct ActionReport {
  std::string action;
  std::vector<CheckReport> properties;

  bool ok() const;
};

// Coherence, safety monotonicity, step safety, internal stepping, framing, totality, erasure.
ActionReport check_action_properties(const AtomicAction& a, Gen& g, std::size_t n);

}  // namespace histrio
