#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace histrio {

struct Loc {
  std::uint64_t id = 0;

  bool null() const { return id == 0; }
  friend bool operator==(Loc a, Loc b) { return a.id == b.id; }
  friend auto operator<=>(Loc a, Loc b) { return a.id <=> b.id; }
};

inline constexpr Loc kNull{};

// Closed union of everything a heap cell or an action result can hold.
class Value {
 public:
  enum class Kind : std::uint8_t { Unit, Nat, Bool, Loc, Tuple, List, Opt, Init, Req, Resp };

  Value() = default;

  static Value unit() { return Value(); }
  static Value nat(std::uint64_t n);
  static Value boolean(bool b);
  static Value loc(Loc l);
  static Value tuple(std::vector<Value> items);
  static Value pair(Value a, Value b);
  static Value list(std::vector<Value> items);
  static Value none();
  static Value some(Value v);
  static Value init();
  static Value req(std::string fn, Value arg);
  static Value resp(Value w);

  Kind kind() const { return kind_; }
  bool is(Kind k) const { return kind_ == k; }

  std::uint64_t as_nat() const;
  bool as_bool() const;
  Loc as_loc() const;
  const std::vector<Value>& items() const { return items_; }
  const Value& at(std::size_t i) const;
  std::size_t size() const { return items_.size(); }
  const std::string& fn() const { return tag_; }

  bool is_some() const { return kind_ == Kind::Opt && !items_.empty(); }
  bool is_none() const { return kind_ == Kind::Opt && items_.empty(); }

  std::string render() const;
  void encode(std::string& out) const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator<(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

 private:
  Kind kind_ = Kind::Unit;
  std::uint64_t scalar_ = 0;
  std::string tag_;
  std::vector<Value> items_;
};

using Heap = std::map<Loc, Value>;
using Args = std::vector<Value>;

std::optional<Heap> heap_union(const Heap& a, const Heap& b);
// a minus b, when b is a sub-heap of a.
std::optional<Heap> heap_subtract(const Heap& a, const Heap& b);
std::set<Loc> heap_dom(const Heap& h);
Heap heap_restrict(const Heap& h, const std::set<Loc>& locs);
bool heap_disjoint(const Heap& a, const Heap& b);

std::string render(const Heap& h);
std::string render(Loc l);
void encode(std::string& out, const Heap& h);
void encode_u64(std::string& out, std::uint64_t v);

}  // namespace histrio
