#include "histrio/value.hpp"

#include <stdexcept>

namespace histrio {

Value Value::nat(std::uint64_t n) {
  Value v;
  v.kind_ = Kind::Nat;
  v.scalar_ = n;
  return v;
}

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Bool;
  v.scalar_ = b ? 1 : 0;
  return v;
}

Value Value::loc(Loc l) {
  Value v;
  v.kind_ = Kind::Loc;
  v.scalar_ = l.id;
  return v;
}

Value Value::tuple(std::vector<Value> items) {
  Value v;
  v.kind_ = Kind::Tuple;
  v.items_ = std::move(items);
  return v;
}

Value Value::pair(Value a, Value b) { return tuple({std::move(a), std::move(b)}); }

Value Value::list(std::vector<Value> items) {
  Value v;
  v.kind_ = Kind::List;
  v.items_ = std::move(items);
  return v;
}

Value Value::none() {
  Value v;
  v.kind_ = Kind::Opt;
  return v;
}

Value Value::some(Value x) {
  Value v;
  v.kind_ = Kind::Opt;
  v.items_.push_back(std::move(x));
  return v;
}

Value Value::init() {
  Value v;
  v.kind_ = Kind::Init;
  return v;
}

Value Value::req(std::string fn, Value arg) {
  Value v;
  v.kind_ = Kind::Req;
  v.tag_ = std::move(fn);
  v.items_.push_back(std::move(arg));
  return v;
}

Value Value::resp(Value w) {
  Value v;
  v.kind_ = Kind::Resp;
  v.items_.push_back(std::move(w));
  return v;
}

std::uint64_t Value::as_nat() const {
  if (kind_ != Kind::Nat) throw std::logic_error("value is not a natural: " + render());
  return scalar_;
}

bool Value::as_bool() const {
  if (kind_ != Kind::Bool) throw std::logic_error("value is not a boolean: " + render());
  return scalar_ != 0;
}

Loc Value::as_loc() const {
  if (kind_ != Kind::Loc) throw std::logic_error("value is not a location: " + render());
  return Loc{scalar_};
}

const Value& Value::at(std::size_t i) const {
  if (i >= items_.size()) throw std::logic_error("value index out of range: " + render());
  return items_[i];
}

static void render_items(std::string& out, const std::vector<Value>& items) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i].render();
  }
}

std::string Value::render() const {
  std::string out;
  switch (kind_) {
    case Kind::Unit: return "()";
    case Kind::Nat: return std::to_string(scalar_);
    case Kind::Bool: return scalar_ ? "true" : "false";
    case Kind::Loc: return histrio::render(Loc{scalar_});
    case Kind::Tuple:
      out = "(";
      render_items(out, items_);
      return out + ")";
    case Kind::List:
      out = "[";
      render_items(out, items_);
      return out + "]";
    case Kind::Opt: return items_.empty() ? "None" : "Some(" + items_[0].render() + ")";
    case Kind::Init: return "Init";
    case Kind::Req: return "Req(" + tag_ + ", " + items_[0].render() + ")";
    case Kind::Resp: return "Resp(" + items_[0].render() + ")";
  }
  return out;
}

void encode_u64(std::string& out, std::uint64_t v) {
  do {
    unsigned char b = v & 0x7f;
    v >>= 7;
    if (v) b |= 0x80;
    out.push_back(static_cast<char>(b));
  } while (v);
}

void Value::encode(std::string& out) const {
  out.push_back(static_cast<char>(kind_));
  encode_u64(out, scalar_);
  if (kind_ == Kind::Req) {
    encode_u64(out, tag_.size());
    out += tag_;
  }
  encode_u64(out, items_.size());
  for (const auto& v : items_) v.encode(out);
}

bool operator==(const Value& a, const Value& b) {
  return a.kind_ == b.kind_ && a.scalar_ == b.scalar_ && a.tag_ == b.tag_ && a.items_ == b.items_;
}

bool operator<(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
  if (a.scalar_ != b.scalar_) return a.scalar_ < b.scalar_;
  if (a.tag_ != b.tag_) return a.tag_ < b.tag_;
  return a.items_ < b.items_;
}

std::optional<Heap> heap_union(const Heap& a, const Heap& b) {
  Heap out = a;
  for (const auto& [l, v] : b) {
    if (!out.emplace(l, v).second) return std::nullopt;
  }
  return out;
}

std::optional<Heap> heap_subtract(const Heap& a, const Heap& b) {
  Heap out = a;
  for (const auto& [l, v] : b) {
    auto it = out.find(l);
    if (it == out.end() || it->second != v) return std::nullopt;
    out.erase(it);
  }
  return out;
}

std::set<Loc> heap_dom(const Heap& h) {
  std::set<Loc> out;
  for (const auto& kv : h) out.insert(kv.first);
  return out;
}

Heap heap_restrict(const Heap& h, const std::set<Loc>& locs) {
  Heap out;
  for (const auto& [l, v] : h) {
    if (locs.count(l)) out.emplace(l, v);
  }
  return out;
}

bool heap_disjoint(const Heap& a, const Heap& b) {
  const Heap& small = a.size() < b.size() ? a : b;
  const Heap& large = a.size() < b.size() ? b : a;
  for (const auto& kv : small) {
    if (large.count(kv.first)) return false;
  }
  return true;
}

std::string render(Loc l) { return l.null() ? "null" : "@" + std::to_string(l.id); }

std::string render(const Heap& h) {
  std::string out = "{";
  bool first = true;
  for (const auto& [l, v] : h) {
    if (!first) out += ", ";
    first = false;
    out += render(l) + "↦" + v.render();
  }
  return out + "}";
}

void encode(std::string& out, const Heap& h) {
  encode_u64(out, h.size());
  for (const auto& [l, v] : h) {
    encode_u64(out, l.id);
    v.encode(out);
  }
}

}  // namespace histrio
