#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "histrio/value.hpp"

namespace histrio {

using Timestamp = std::uint64_t;

// Snapshot payload of a history: pair-snapshot triples or stack contents.
enum class HistKind : std::uint8_t { Pair, Stack };

struct Entry {
  Value pre;
  Value post;

  friend bool operator==(const Entry&, const Entry&) = default;
};

struct History {
  HistKind kind = HistKind::Stack;
  std::map<Timestamp, Entry> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  bool contains(Timestamp t) const { return entries.count(t) != 0; }

  friend bool operator==(const History&, const History&) = default;
};

using Multiset = std::map<Value, std::size_t>;

History make_history(HistKind kind, std::map<Timestamp, Entry> entries = {});

// Disjoint union; nullopt when stamps overlap. Throws on kind mismatch.
std::optional<History> history_join(const History& a, const History& b);
// a minus b when b ⊆ a.
std::optional<History> history_subtract(const History& a, const History& b);
bool is_subset(const History& a, const History& b);

const Value& lookup_end(const History& h, Timestamp t);
bool upper_bounds(const History& h, Timestamp t);
Timestamp fresh(const History& h);
std::optional<Timestamp> last_stamp(const History& h);
// Post-state of the largest stamp.
std::optional<Value> last_post(const History& h);

bool is_continuous(const History& h);
bool is_complete(const History& h);
bool is_stacklike(const History& h);

Multiset pushed(const History& h);
Multiset popped(const History& h);
std::size_t multiset_size(const Multiset& m);
Multiset multiset_of(const std::vector<Value>& items);

bool lemma1_oracle(const History& h1, const History& h2);
bool lemma2_oracle(const History& h);

std::string render(const History& h);
std::string render(const Multiset& m);
void encode(std::string& out, const History& h);

}  // namespace histrio
