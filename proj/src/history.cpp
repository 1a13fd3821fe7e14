#include "histrio/history.hpp"

#include <stdexcept>

#include "histrio/pcm.hpp"

namespace histrio {

History make_history(HistKind kind, std::map<Timestamp, Entry> entries) {
  return History{kind, std::move(entries)};
}

static void require_same_kind(const History& a, const History& b) {
  if (a.kind != b.kind) throw PcmUsageError("history join across snapshot kinds");
}

std::optional<History> history_join(const History& a, const History& b) {
  require_same_kind(a, b);
  History out = a;
  for (const auto& [t, e] : b.entries) {
    if (!out.entries.emplace(t, e).second) return std::nullopt;
  }
  return out;
}

std::optional<History> history_subtract(const History& a, const History& b) {
  require_same_kind(a, b);
  History out = a;
  for (const auto& [t, e] : b.entries) {
    auto it = out.entries.find(t);
    if (it == out.entries.end() || !(it->second == e)) return std::nullopt;
    out.entries.erase(it);
  }
  return out;
}

bool is_subset(const History& a, const History& b) { return history_subtract(b, a).has_value(); }

const Value& lookup_end(const History& h, Timestamp t) {
  auto it = h.entries.find(t);
  if (it == h.entries.end()) throw std::out_of_range("timestamp " + std::to_string(t) + " not in history");
  return it->second.post;
}

bool upper_bounds(const History& h, Timestamp t) { return h.entries.empty() || h.entries.rbegin()->first <= t; }

Timestamp fresh(const History& h) {
  Timestamp t = 0;
  for (const auto& kv : h.entries) {
    if (kv.first != t) break;
    ++t;
  }
  return t;
}

std::optional<Timestamp> last_stamp(const History& h) {
  if (h.entries.empty()) return std::nullopt;
  return h.entries.rbegin()->first;
}

std::optional<Value> last_post(const History& h) {
  if (h.entries.empty()) return std::nullopt;
  return h.entries.rbegin()->second.post;
}

bool is_continuous(const History& h) {
  for (auto it = h.entries.begin(); it != h.entries.end(); ++it) {
    auto next = std::next(it);
    if (next == h.entries.end()) break;
    if (next->first == it->first + 1 && !(it->second.post == next->second.pre)) return false;
  }
  return true;
}

bool is_complete(const History& h) {
  auto zero = h.entries.find(0);
  if (zero == h.entries.end() || !(zero->second.pre == zero->second.post)) return false;
  return h.entries.rbegin()->first + 1 == h.entries.size();
}

// (l, e::l) when push, (e::l, l) when pop.
static std::optional<Value> pushed_elem(const Entry& e) {
  if (!e.pre.is(Value::Kind::List) || !e.post.is(Value::Kind::List)) return std::nullopt;
  const auto& a = e.pre.items();
  const auto& b = e.post.items();
  if (b.size() != a.size() + 1) return std::nullopt;
  if (!std::equal(a.begin(), a.end(), b.begin() + 1)) return std::nullopt;
  return b.front();
}

static std::optional<Value> popped_elem(const Entry& e) { return pushed_elem(Entry{e.post, e.pre}); }

bool is_stacklike(const History& h) {
  for (const auto& [t, e] : h.entries) {
    if (t == 0) continue;
    if (!pushed_elem(e) && !popped_elem(e)) return false;
  }
  return true;
}

Multiset pushed(const History& h) {
  Multiset out;
  for (const auto& [t, e] : h.entries) {
    if (t == 0 && e.pre == e.post && e.pre.is(Value::Kind::List)) {
      for (const auto& v : e.pre.items()) ++out[v];
    } else if (auto v = pushed_elem(e)) {
      ++out[*v];
    }
  }
  return out;
}

Multiset popped(const History& h) {
  Multiset out;
  for (const auto& [t, e] : h.entries) {
    if (auto v = popped_elem(e)) ++out[*v];
  }
  return out;
}

std::size_t multiset_size(const Multiset& m) {
  std::size_t n = 0;
  for (const auto& kv : m) n += kv.second;
  return n;
}

Multiset multiset_of(const std::vector<Value>& items) {
  Multiset out;
  for (const auto& v : items) ++out[v];
  return out;
}

bool lemma1_oracle(const History& h1, const History& h2) {
  auto joined = history_join(h1, h2);
  if (!joined) throw std::invalid_argument("lemma1_oracle: histories overlap");
  if (!popped(h1).empty() || !pushed(h2).empty()) return true;
  return pushed(*joined) == pushed(h1) && popped(*joined) == popped(h2);
}

bool lemma2_oracle(const History& h) {
  if (h.entries.empty() || !is_complete(h) || !is_continuous(h) || !is_stacklike(h)) return true;
  auto pu = pushed(h);
  auto po = popped(h);
  if (multiset_size(pu) != multiset_size(po)) return true;
  return pu == po;
}

std::string render(const History& h) {
  std::string out;
  for (const auto& [t, e] : h.entries) {
    out += std::to_string(t) + ": " + e.pre.render() + " -> " + e.post.render() + "\n";
  }
  return out;
}

std::string render(const Multiset& m) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, n] : m) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!first) out += ", ";
      first = false;
      out += v.render();
    }
  }
  return out + "}";
}

void encode(std::string& out, const History& h) {
  out.push_back(static_cast<char>(h.kind));
  encode_u64(out, h.entries.size());
  for (const auto& [t, e] : h.entries) {
    encode_u64(out, t);
    e.pre.encode(out);
    e.post.encode(out);
  }
}

}  // namespace histrio
