#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "histrio/pcm.hpp"

namespace histrio {

// Seeded source for samplers. Fresh locations never collide within one Gen.
struct Gen {
  explicit Gen(std::uint64_t seed, std::uint64_t first_loc = 1000) : rng(seed), next_loc(first_loc) {}

  std::mt19937_64 rng;
  std::uint64_t next_loc;

  Loc fresh_loc() { return Loc{next_loc++}; }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng() % n; }
  bool coin() { return (rng() & 1) != 0; }
  bool chance(unsigned num, unsigned den) { return below(den) < num; }
};

Value random_value(Gen& g);
Heap random_heap(Gen& g, std::size_t max_cells, bool fresh_locs = true);
History random_history(Gen& g, HistKind kind, std::size_t max_entries);
IdSet random_idset(Gen& g, ThreadId universe);
PcmElement random_element_like(Gen& g, const PcmElement& shape);

// A complete, continuous, stacklike history starting from `init` with `ops` random
// push/pop steps; pushed elements are drawn from `next_elem` upwards.
History random_stack_history(Gen& g, std::vector<Value> init, std::size_t ops, std::uint64_t& next_elem);

// Splits `a` into (part, rest) with part • rest = a.
std::pair<PcmElement, PcmElement> random_split(Gen& g, const PcmElement& a);
std::pair<PcmMap, PcmMap> random_split(Gen& g, const PcmMap& m);

}  // namespace histrio
