#pragma once

#include <cstdint>
#include <vector>

#include "histrio/actions.hpp"
#include "histrio/concurroid.hpp"

namespace histrio {

// PCM laws over every instance: Heap, both History kinds, Mutex (exhaustively), IdSet, Triple, and label maps.
std::vector<LawReport> run_law_suites(std::uint64_t seed, std::size_t samples);
// Guarantee, locality, footprint and fork-join closure for P, S, T, L, F and their entanglements with P.
std::vector<CheckReport> run_concurroid_suites(std::uint64_t seed, std::size_t samples);
// The seven action properties for every shipped action.
std::vector<ActionReport> run_action_suites(std::uint64_t seed, std::size_t samples);

// A check that never found its premise sampled nothing and counts as failed.
bool suite_ok(const CheckReport& r);

}  // namespace histrio
