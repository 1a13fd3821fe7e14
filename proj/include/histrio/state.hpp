#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "histrio/pcm.hpp"

namespace histrio {

struct StateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct State {
  PcmMap self;
  TypeMap joint;
  PcmMap other;

  friend bool operator==(const State&, const State&) = default;
};

std::set<Label> labels_of(const State& w);

bool validate(const State& w);
std::optional<Heap> flatten(const State& w);
State transpose(const State& w);
std::optional<State> realign_acquire(const State& w, const PcmMap& t);
std::optional<State> realign_release(const State& w, const PcmMap& t);
std::pair<State, State> subjective_split(const State& w, const PcmMap& a, const PcmMap& b);
State subjective_join(const State& c1, const State& c2);

State restrict(const State& w, const std::set<Label>& keep);
// Union of two states over disjoint label sets.
std::optional<State> merge(const State& a, const State& b);
PcmMap restrict(const PcmMap& m, const std::set<Label>& keep);

// Components of a single label; throws when missing.
const PcmElement& self_of(const State& w, Label l);
const PcmElement& other_of(const State& w, Label l);
const Joint& joint_of(const State& w, Label l);

std::string render(const State& w);
void encode(std::string& out, const State& w);

}  // namespace histrio
