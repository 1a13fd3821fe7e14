#include "histrio/pcm.hpp"

#include <algorithm>

namespace histrio {

PcmElement::PcmElement(IdSet s, Mutex m, PcmElement aux)
    : rep_(Triple{std::move(s), m, std::make_shared<const PcmElement>(std::move(aux))}) {}

template <class T>
static const T& get_as(const PcmElement::Rep& rep, const char* what) {
  if (auto p = std::get_if<T>(&rep)) return *p;
  throw PcmUsageError(std::string("element is not a ") + what);
}

const Heap& PcmElement::heap() const { return get_as<Heap>(rep_, "heap"); }
const History& PcmElement::history() const { return get_as<History>(rep_, "history"); }
Mutex PcmElement::mutex() const { return get_as<Mutex>(rep_, "mutex"); }
const IdSet& PcmElement::idset() const { return get_as<IdSet>(rep_, "id set"); }
const Triple& PcmElement::triple() const { return get_as<Triple>(rep_, "triple"); }

bool operator==(const Triple& a, const Triple& b) {
  return a.ids == b.ids && a.mutex == b.mutex && *a.aux == *b.aux;
}

bool operator==(const PcmElement& a, const PcmElement& b) { return a.rep_ == b.rep_; }

bool same_instance(const PcmElement& a, const PcmElement& b) {
  if (a.rep().index() != b.rep().index()) return false;
  if (a.is_history()) return a.history().kind == b.history().kind;
  if (a.is_triple()) return same_instance(a.aux(), b.aux());
  return true;
}

std::string PcmElement::instance_name() const {
  if (is_heap()) return "heap";
  if (is_history()) return history().kind == HistKind::Pair ? "history<pair>" : "history<stack>";
  if (is_mutex()) return "mutex";
  if (is_idset()) return "idset";
  if (is_triple()) return "triple<" + aux().instance_name() + ">";
  return "unit";
}

static void require_same(const PcmElement& a, const PcmElement& b) {
  if (!same_instance(a, b)) {
    throw PcmUsageError("join across instances: " + a.instance_name() + " vs " + b.instance_name());
  }
}

static std::optional<IdSet> idset_join(const IdSet& a, const IdSet& b) {
  IdSet out = a;
  for (auto t : b) {
    if (!out.insert(t).second) return std::nullopt;
  }
  return out;
}

static std::optional<Mutex> mutex_join(Mutex a, Mutex b) {
  if (a == Mutex::Own && b == Mutex::Own) return std::nullopt;
  return a == Mutex::Own ? a : b;
}

std::optional<PcmElement> join(const PcmElement& a, const PcmElement& b) {
  require_same(a, b);
  if (a.is_heap()) {
    auto h = heap_union(a.heap(), b.heap());
    if (!h) return std::nullopt;
    return PcmElement(std::move(*h));
  }
  if (a.is_history()) {
    auto h = history_join(a.history(), b.history());
    if (!h) return std::nullopt;
    return PcmElement(std::move(*h));
  }
  if (a.is_mutex()) {
    auto m = mutex_join(a.mutex(), b.mutex());
    if (!m) return std::nullopt;
    return PcmElement(*m);
  }
  if (a.is_idset()) {
    auto s = idset_join(a.idset(), b.idset());
    if (!s) return std::nullopt;
    return PcmElement(std::move(*s));
  }
  if (a.is_triple()) {
    auto s = idset_join(a.triple().ids, b.triple().ids);
    auto m = mutex_join(a.triple().mutex, b.triple().mutex);
    if (!s || !m) return std::nullopt;
    auto g = join(a.aux(), b.aux());
    if (!g) return std::nullopt;
    return PcmElement(std::move(*s), *m, std::move(*g));
  }
  return a;
}

std::optional<PcmElement> subtract(const PcmElement& a, const PcmElement& b) {
  require_same(a, b);
  if (a.is_heap()) {
    auto h = heap_subtract(a.heap(), b.heap());
    if (!h) return std::nullopt;
    return PcmElement(std::move(*h));
  }
  if (a.is_history()) {
    auto h = history_subtract(a.history(), b.history());
    if (!h) return std::nullopt;
    return PcmElement(std::move(*h));
  }
  auto mutex_sub = [](Mutex x, Mutex y) -> std::optional<Mutex> {
    if (y == Mutex::Own) return x == Mutex::Own ? std::optional<Mutex>(Mutex::NotOwn) : std::nullopt;
    return x;
  };
  auto set_sub = [](const IdSet& x, const IdSet& y) -> std::optional<IdSet> {
    if (!std::includes(x.begin(), x.end(), y.begin(), y.end())) return std::nullopt;
    IdSet out;
    std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::inserter(out, out.end()));
    return out;
  };
  if (a.is_mutex()) {
    auto m = mutex_sub(a.mutex(), b.mutex());
    if (!m) return std::nullopt;
    return PcmElement(*m);
  }
  if (a.is_idset()) {
    auto s = set_sub(a.idset(), b.idset());
    if (!s) return std::nullopt;
    return PcmElement(std::move(*s));
  }
  if (a.is_triple()) {
    auto s = set_sub(a.triple().ids, b.triple().ids);
    auto m = mutex_sub(a.triple().mutex, b.triple().mutex);
    if (!s || !m) return std::nullopt;
    auto g = subtract(a.aux(), b.aux());
    if (!g) return std::nullopt;
    return PcmElement(std::move(*s), *m, std::move(*g));
  }
  return a;
}

bool pcm_order(const PcmElement& g1, const PcmElement& g2) { return subtract(g2, g1).has_value(); }

PcmElement unit_of(const PcmElement& a) {
  if (a.is_heap()) return PcmElement(Heap{});
  if (a.is_history()) return PcmElement(make_history(a.history().kind));
  if (a.is_mutex()) return PcmElement(Mutex::NotOwn);
  if (a.is_idset()) return PcmElement(IdSet{});
  if (a.is_triple()) return PcmElement(IdSet{}, Mutex::NotOwn, unit_of(a.aux()));
  return PcmElement();
}

bool is_unit(const PcmElement& a) { return a == unit_of(a); }

static std::string render_idset(const IdSet& s) {
  std::string out = "{";
  bool first = true;
  for (auto t : s) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(t);
  }
  return out + "}";
}

static std::string render_history_inline(const History& h) {
  std::string out = "{";
  bool first = true;
  for (const auto& [t, e] : h.entries) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(t) + "↦(" + e.pre.render() + ", " + e.post.render() + ")";
  }
  return out + "}";
}

std::string PcmElement::render() const {
  if (is_heap()) return histrio::render(heap());
  if (is_history()) return render_history_inline(history());
  if (is_mutex()) return mutex() == Mutex::Own ? "Own" : "NotOwn";
  if (is_idset()) return render_idset(idset());
  if (is_triple()) {
    const auto& t = triple();
    return "(" + render_idset(t.ids) + ", " + (t.mutex == Mutex::Own ? "Own" : "NotOwn") + ", " +
           t.aux->render() + ")";
  }
  return "()";
}

void PcmElement::encode(std::string& out) const {
  out.push_back(static_cast<char>(rep_.index()));
  if (is_heap()) {
    histrio::encode(out, heap());
  } else if (is_history()) {
    histrio::encode(out, history());
  } else if (is_mutex()) {
    out.push_back(static_cast<char>(mutex()));
  } else if (is_idset()) {
    encode_u64(out, idset().size());
    for (auto t : idset()) encode_u64(out, t);
  } else if (is_triple()) {
    encode_u64(out, triple().ids.size());
    for (auto t : triple().ids) encode_u64(out, t);
    out.push_back(static_cast<char>(triple().mutex));
    aux().encode(out);
  }
}

std::string label_name(Label l) {
  switch (l) {
    case labels::pv: return "pv";
    case labels::sp: return "sp";
    case labels::tb: return "tb";
    case labels::lk: return "lk";
    case labels::fc: return "fc";
    case labels::lk2: return "lk2";
  }
  return "l" + std::to_string(l);
}

std::optional<PcmMap> map_pointwise_join(const PcmMap& a, const PcmMap& b) {
  if (a.size() != b.size()) return std::nullopt;
  PcmMap out;
  auto ib = b.begin();
  for (const auto& [l, x] : a) {
    if (ib->first != l) return std::nullopt;
    auto j = join(x, ib->second);
    if (!j) return std::nullopt;
    out.emplace_hint(out.end(), l, std::move(*j));
    ++ib;
  }
  return out;
}

std::optional<PcmMap> map_subtract(const PcmMap& a, const PcmMap& b) {
  if (a.size() != b.size()) return std::nullopt;
  PcmMap out;
  auto ib = b.begin();
  for (const auto& [l, x] : a) {
    if (ib->first != l) return std::nullopt;
    auto d = subtract(x, ib->second);
    if (!d) return std::nullopt;
    out.emplace_hint(out.end(), l, std::move(*d));
    ++ib;
  }
  return out;
}

bool map_order(const PcmMap& a, const PcmMap& b) { return map_subtract(b, a).has_value(); }

PcmMap unit_map(const PcmMap& m) {
  PcmMap out;
  for (const auto& [l, x] : m) out.emplace_hint(out.end(), l, unit_of(x));
  return out;
}

bool is_unit_map(const PcmMap& m) {
  return std::all_of(m.begin(), m.end(), [](const auto& kv) { return is_unit(kv.second); });
}

std::string render(const PcmMap& m) {
  std::string out = "{";
  bool first = true;
  for (const auto& [l, x] : m) {
    if (!first) out += ", ";
    first = false;
    out += label_name(l) + "↦" + x.render();
  }
  return out + "}";
}

std::string render(const Joint& j) {
  std::string out = render(j.heap);
  if (!j.aux.empty()) {
    out += " aux[";
    for (std::size_t i = 0; i < j.aux.size(); ++i) {
      if (i) out += ", ";
      out += j.aux[i].render();
    }
    out += "]";
  }
  return out;
}

void encode(std::string& out, const PcmMap& m) {
  encode_u64(out, m.size());
  for (const auto& [l, x] : m) {
    encode_u64(out, l);
    x.encode(out);
  }
}

void encode(std::string& out, const Joint& j) {
  encode(out, j.heap);
  encode_u64(out, j.aux.size());
  for (const auto& x : j.aux) x.encode(out);
}

static PcmInstance<PcmElement> element_instance(std::string name, PcmElement unit) {
  return PcmInstance<PcmElement>{
      std::move(name), [](const PcmElement& a, const PcmElement& b) { return join(a, b); }, std::move(unit)};
}

PcmInstance<PcmElement> heap_instance() { return element_instance("heap", PcmElement(Heap{})); }
PcmInstance<PcmElement> history_instance(HistKind kind) {
  PcmElement u{make_history(kind)};
  return element_instance(u.instance_name(), u);
}
PcmInstance<PcmElement> mutex_instance() { return element_instance("mutex", PcmElement(Mutex::NotOwn)); }
PcmInstance<PcmElement> idset_instance() { return element_instance("idset", PcmElement(IdSet{})); }
PcmInstance<PcmElement> triple_instance(const PcmElement& aux_unit) {
  PcmElement u(IdSet{}, Mutex::NotOwn, aux_unit);
  return element_instance(u.instance_name(), u);
}
PcmInstance<PcmElement> unit_instance() { return element_instance("unit", PcmElement()); }

PcmInstance<PcmMap> map_instance(const PcmMap& units) {
  return PcmInstance<PcmMap>{"pcm-map", [](const PcmMap& a, const PcmMap& b) { return map_pointwise_join(a, b); },
                             units};
}

}  // namespace histrio
