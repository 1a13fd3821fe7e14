#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "histrio/history.hpp"
#include "histrio/value.hpp"

namespace histrio {

struct PcmUsageError : std::logic_error {
  using std::logic_error::logic_error;
};

enum class Mutex : std::uint8_t { NotOwn, Own };

using ThreadId = std::uint32_t;
using IdSet = std::set<ThreadId>;

struct UnitElem {
  friend bool operator==(UnitElem, UnitElem) { return true; }
};

class PcmElement;

struct Triple {
  IdSet ids;
  Mutex mutex = Mutex::NotOwn;
  std::shared_ptr<const PcmElement> aux;

  friend bool operator==(const Triple& a, const Triple& b);
};

class PcmElement {
 public:
  using Rep = std::variant<UnitElem, Heap, History, Mutex, IdSet, Triple>;

  PcmElement() = default;
  PcmElement(Heap h) : rep_(std::move(h)) {}
  PcmElement(History h) : rep_(std::move(h)) {}
  PcmElement(Mutex m) : rep_(m) {}
  PcmElement(IdSet s) : rep_(std::move(s)) {}
  PcmElement(IdSet s, Mutex m, PcmElement aux);

  const Rep& rep() const { return rep_; }

  bool is_heap() const { return std::holds_alternative<Heap>(rep_); }
  bool is_history() const { return std::holds_alternative<History>(rep_); }
  bool is_mutex() const { return std::holds_alternative<Mutex>(rep_); }
  bool is_idset() const { return std::holds_alternative<IdSet>(rep_); }
  bool is_triple() const { return std::holds_alternative<Triple>(rep_); }

  const Heap& heap() const;
  const History& history() const;
  Mutex mutex() const;
  const IdSet& idset() const;
  const Triple& triple() const;
  const PcmElement& aux() const { return *triple().aux; }

  std::string instance_name() const;
  std::string render() const;
  void encode(std::string& out) const;

  friend bool operator==(const PcmElement& a, const PcmElement& b);
  friend bool operator!=(const PcmElement& a, const PcmElement& b) { return !(a == b); }

 private:
  Rep rep_;
};

bool same_instance(const PcmElement& a, const PcmElement& b);

// Partial join. nullopt when undefined; throws PcmUsageError across instances.
std::optional<PcmElement> join(const PcmElement& a, const PcmElement& b);
// The unique c with b • c = a, when it exists.
std::optional<PcmElement> subtract(const PcmElement& a, const PcmElement& b);
// g1 ⊑ g2.
bool pcm_order(const PcmElement& g1, const PcmElement& g2);
PcmElement unit_of(const PcmElement& a);
bool is_unit(const PcmElement& a);

using Label = std::uint32_t;

namespace labels {
inline constexpr Label pv = 1;
inline constexpr Label sp = 2;
inline constexpr Label tb = 3;
inline constexpr Label lk = 4;
inline constexpr Label fc = 5;
inline constexpr Label lk2 = 6;
}  // namespace labels

std::string label_name(Label l);

using PcmMap = std::map<Label, PcmElement>;

// Shared component of a label: a heap plus an optional auxiliary array.
struct Joint {
  Heap heap;
  std::vector<PcmElement> aux;

  friend bool operator==(const Joint&, const Joint&) = default;
};

using TypeMap = std::map<Label, Joint>;

template <class M>
std::optional<M> map_disjoint_union(const M& a, const M& b) {
  M out = a;
  for (const auto& kv : b) {
    if (!out.insert(kv).second) return std::nullopt;
  }
  return out;
}

std::optional<PcmMap> map_pointwise_join(const PcmMap& a, const PcmMap& b);
std::optional<PcmMap> map_subtract(const PcmMap& a, const PcmMap& b);
bool map_order(const PcmMap& a, const PcmMap& b);
PcmMap unit_map(const PcmMap& m);
bool is_unit_map(const PcmMap& m);

std::string render(const PcmMap& m);
std::string render(const Joint& j);
void encode(std::string& out, const PcmMap& m);
void encode(std::string& out, const Joint& j);

template <class T>
struct PcmInstance {
  std::string name;
  std::function<std::optional<T>(const T&, const T&)> join;
  T unit;
};

struct LawViolation {
  std::string law;
  std::string detail;
};

struct LawReport {
  std::string instance;
  std::size_t samples = 0;
  std::vector<LawViolation> violations;

  bool ok() const { return violations.empty(); }
};

namespace detail {

template <class T, class Render>
void check_triple(const PcmInstance<T>& inst, const T& a, const T& b, const T& c, Render& render,
                  LawReport& report) {
  auto show = [&](const std::optional<T>& x) { return x ? render(*x) : std::string("undefined"); };
  auto ab = inst.join(a, b);
  auto ba = inst.join(b, a);
  if (ab.has_value() != ba.has_value() || (ab && !(*ab == *ba))) {
    report.violations.push_back({"commutativity", render(a) + " • " + render(b) + " = " + show(ab) +
                                                      " but reversed = " + show(ba)});
  }
  std::optional<T> ab_c = ab ? inst.join(*ab, c) : std::nullopt;
  auto bc = inst.join(b, c);
  std::optional<T> a_bc = bc ? inst.join(a, *bc) : std::nullopt;
  if (ab_c.has_value() != a_bc.has_value() || (ab_c && !(*ab_c == *a_bc))) {
    report.violations.push_back({"associativity", "(" + render(a) + " • " + render(b) + ") • " + render(c) +
                                                      " = " + show(ab_c) + " vs " + show(a_bc)});
  }
  auto au = inst.join(a, inst.unit);
  auto ua = inst.join(inst.unit, a);
  if (!au || !(*au == a) || !ua || !(*ua == a)) {
    report.violations.push_back({"unit", render(a) + " • unit = " + show(au)});
  }
}

}  // namespace detail

template <class T, class Sampler, class Render>
LawReport check_pcm_laws(const PcmInstance<T>& inst, Sampler&& sample, std::size_t n, Render render) {
  LawReport report{inst.name, n, {}};
  for (std::size_t i = 0; i < n; ++i) {
    T a = sample();
    T b = sample();
    T c = sample();
    detail::check_triple(inst, a, b, c, render, report);
  }
  return report;
}

template <class T, class Render>
LawReport check_pcm_laws_exhaustive(const PcmInstance<T>& inst, const std::vector<T>& carrier, Render render) {
  LawReport report{inst.name, 0, {}};
  for (const auto& a : carrier)
    for (const auto& b : carrier)
      for (const auto& c : carrier) {
        ++report.samples;
        detail::check_triple(inst, a, b, c, render, report);
      }
  return report;
}

PcmInstance<PcmElement> heap_instance();
PcmInstance<PcmElement> history_instance(HistKind kind);
PcmInstance<PcmElement> mutex_instance();
PcmInstance<PcmElement> idset_instance();
PcmInstance<PcmElement> triple_instance(const PcmElement& aux_unit);
PcmInstance<PcmElement> unit_instance();
PcmInstance<PcmMap> map_instance(const PcmMap& units);

}  // namespace histrio
