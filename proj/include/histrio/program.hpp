#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "histrio/actions.hpp"

namespace histrio {

using Env = std::map<std::string, Value>;
using Expr = std::function<Value(const Env&)>;
using ArgsFn = std::function<Args(const Env&)>;
using Cond = std::function<bool(const Env&)>;
using Failure = std::optional<std::string>;

struct MethodSpec {
  std::string name;
  // Evaluated on the caller's view at entry; the view and arguments become the logical variables.
  std::function<Failure(const State& entry, const Args& args)> pre;
  std::function<Failure(const State& entry, const Args& args, const State& exit, const Value& result)> post;
};

using SpecPtr = std::shared_ptr<const MethodSpec>;

// Abstraction predicate of a hidden concurroid.
struct PhiSpec {
  std::string name;
  ConcurroidPtr concurroid;
  PcmElement g0;
  std::function<bool(const PcmElement& g, const State& installed)> member;
  // Picks the private sub-heap handed to the installed concurroid and the state it becomes.
  std::function<std::optional<std::pair<Heap, State>>(const PcmElement& g, const Heap& private_heap)> install;
  std::function<std::optional<PcmElement>(const State& installed)> abstraction;
};

using PhiPtr = std::shared_ptr<const PhiSpec>;

using SplitFn = std::function<std::pair<PcmMap, PcmMap>(const PcmMap& self, const Env& env)>;
using JoinCheck = std::function<Failure(const State& left, const State& right, const Value& lres, const Value& rres)>;
using HideCheck = std::function<Failure(const PcmElement& g_final, const Heap& returned)>;

struct Node;
using Prog = std::shared_ptr<const Node>;

struct Node {
  enum class Kind : std::uint8_t { Return, Bind, Act, Par, Inject, Hide, Loop, If, Spec };

  Kind kind = Kind::Return;
  Expr value;                 // Return
  Prog first, rest;           // Bind; Par left/right; If then/else
  std::string var;            // Bind target, empty to discard
  ActionPtr action;           // Act
  ArgsFn args;                // Act, Spec
  SplitFn split;              // Par
  JoinCheck join_check;       // Par
  std::set<Label> frame;      // Inject: labels the body may touch
  PhiPtr phi;                 // Hide
  ConcurroidPtr inner;        // Hide: concurroid of the body
  HideCheck hide_check;       // Hide
  std::uint32_t bound = 0;    // Loop
  Cond cond;                  // If
  SpecPtr spec;               // Spec
};

namespace prog {

Prog ret(Expr value);
Prog ret_unit();
Prog ret_value(Value v);
Prog let(Prog first, std::string var, Prog rest);
Prog seq(Prog first, Prog rest);
Prog seq(std::vector<Prog> steps);
Prog act(ActionPtr action, ArgsFn args);
Prog act(ActionPtr action);
Prog par(Prog left, Prog right, SplitFn split, JoinCheck check = nullptr);
Prog inject(std::set<Label> frame, Prog body);
Prog hide(PhiPtr phi, ConcurroidPtr inner, Prog body, HideCheck check = nullptr);
// Runs body until it returns Some(v), at most `bound` times; yields v.
Prog loop(Prog body, std::uint32_t bound);
Prog if_(Cond cond, Prog then, Prog otherwise);
Prog spec(SpecPtr spec, ArgsFn args, Prog body);

Expr var(std::string name);
Expr lit(Value v);
ArgsFn args(std::vector<Expr> exprs);
ArgsFn no_args();

SplitFn split_all_left();
SplitFn split_all_right();

}  // namespace prog

}  // namespace histrio
