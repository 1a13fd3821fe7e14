#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "histrio/gen.hpp"
#include "histrio/state.hpp"

namespace histrio {

enum class TransitionKind : std::uint8_t { Internal, Acquire, Release };

struct Sampled {
  Heap h;  // exchanged heap; empty for internal transitions
  State pre;
  State post;
};

struct Transition {
  std::string name;
  TransitionKind kind = TransitionKind::Internal;
  std::function<bool(const Heap& h, const State& pre, const State& post)> member;
  // `want` asks an external transition to exchange exactly that heap; nullopt if it cannot.
  std::function<std::optional<Sampled>(Gen& g, const Heap* want)> sample;
  bool is_id = false;
};

struct ExternalPair {
  std::optional<Transition> acquire;
  std::optional<Transition> release;
};

struct Concurroid {
  std::string name;
  std::set<Label> labels;
  std::function<bool(const State&)> coherent;
  std::function<std::optional<State>(Gen&)> sample_state;
  std::vector<Transition> internals;
  std::vector<ExternalPair> externals;

  const Transition* find(const std::string& transition) const;
};

using ConcurroidPtr = std::shared_ptr<const Concurroid>;

Transition identity_transition(std::function<std::optional<State>(Gen&)> sample_state);

// Builds a transition from a membership predicate and a step sampler over coherent states.
Transition internal_transition(std::string name, std::function<bool(const State&, const State&)> member,
                               std::function<std::optional<Sampled>(Gen&)> sample);

struct CheckReport {
  std::string check;
  std::string subject;
  std::size_t samples = 0;
  std::size_t applicable = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

CheckReport check_guarantee(const Concurroid& c, const Transition& t, Gen& g, std::size_t n);
CheckReport check_locality(const Concurroid& c, const Transition& t, Gen& g, std::size_t n);
CheckReport check_footprints(const Concurroid& c, Gen& g, std::size_t n);
CheckReport check_fork_join_closure(const Concurroid& c, Gen& g, std::size_t n);
// Every checker over every transition of c.
std::vector<CheckReport> check_concurroid(const Concurroid& c, Gen& g, std::size_t n);

ConcurroidPtr entangle(ConcurroidPtr u, ConcurroidPtr v);
ConcurroidPtr empty_concurroid();

// Same labels and transition names, and each accepts the other's sampled states and steps.
bool accepts_same(const Concurroid& a, const Concurroid& b, Gen& g, std::size_t n, std::string* why = nullptr);
bool member_of_some(const Concurroid& c, const State& pre, const State& post);

}  // namespace histrio
