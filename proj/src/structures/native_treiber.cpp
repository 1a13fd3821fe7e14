#include "histrio/structures/native_treiber.hpp"

#include <algorithm>
#include <random>
#include <thread>

namespace histrio {

namespace {

constexpr std::uint64_t pack(std::uint32_t idx, std::uint32_t stamp) {
  return (static_cast<std::uint64_t>(stamp) << 32) | idx;
}
constexpr std::uint32_t index_of(std::uint64_t h) { return static_cast<std::uint32_t>(h); }
constexpr std::uint32_t stamp_of(std::uint64_t h) { return static_cast<std::uint32_t>(h >> 32); }

}  // namespace

NativeTreiber::NativeTreiber(std::size_t capacity) : nodes_(capacity + 1) {}

bool NativeTreiber::push(std::uint64_t elem, std::uint32_t thread, std::vector<NativeEvent>& log) {
  std::uint32_t idx = next_free_.fetch_add(1);
  if (idx >= nodes_.size()) return false;
  nodes_[idx].elem = elem;
  std::uint64_t h = head_.load(std::memory_order_acquire);
  for (;;) {
    nodes_[idx].next = index_of(h);
    std::uint64_t want = pack(idx, stamp_of(h) + 1);
    if (head_.compare_exchange_weak(h, want, std::memory_order_acq_rel, std::memory_order_acquire)) {
      log.push_back({stamp_of(h) + 1u, true, elem, thread});
      return true;
    }
  }
}

bool NativeTreiber::pop(std::uint64_t& elem, std::uint32_t thread, std::vector<NativeEvent>& log) {
  std::uint64_t h = head_.load(std::memory_order_acquire);
  for (;;) {
    std::uint32_t idx = index_of(h);
    if (idx == 0) return false;
    const Node& n = nodes_[idx];
    std::uint64_t want = pack(n.next, stamp_of(h) + 1);
    if (head_.compare_exchange_weak(h, want, std::memory_order_acq_rel, std::memory_order_acquire)) {
      elem = n.elem;
      log.push_back({stamp_of(h) + 1u, false, elem, thread});
      return true;
    }
  }
}

NativeReport validate_native_log(std::vector<NativeEvent> events, const std::vector<std::uint64_t>& pushed_elems,
                                 const std::vector<std::uint64_t>& popped_elems) {
  NativeReport rep;
  rep.events = events.size();
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.stamp < b.stamp; });
  History tau = make_history(HistKind::Stack);
  std::vector<Value> cur;
  tau.entries[0] = Entry{Value::list({}), Value::list({})};
  for (const auto& e : events) {
    if (tau.contains(e.stamp)) {
      rep.violations.push_back("stamp " + std::to_string(e.stamp) + " recorded twice");
      continue;
    }
    std::vector<Value> next = cur;
    if (e.push) {
      next.insert(next.begin(), Value::nat(e.elem));
    } else if (cur.empty() || cur.front() != Value::nat(e.elem)) {
      rep.violations.push_back("pop at stamp " + std::to_string(e.stamp) + " returned " + std::to_string(e.elem) +
                               " which is not the top");
      continue;
    } else {
      next.erase(next.begin());
    }
    tau.entries[e.stamp] = Entry{Value::list(cur), Value::list(next)};
    cur = std::move(next);
  }
  if (!is_complete(tau)) rep.violations.push_back("history is not complete");
  if (!is_continuous(tau)) rep.violations.push_back("history is not continuous");
  if (!is_stacklike(tau)) rep.violations.push_back("history is not stacklike");
  if (!cur.empty()) rep.violations.push_back("stack not empty after drain");
  std::vector<Value> pu, po;
  for (auto x : pushed_elems) pu.push_back(Value::nat(x));
  for (auto x : popped_elems) po.push_back(Value::nat(x));
  if (pushed(tau) != multiset_of(pu)) rep.violations.push_back("logged pushes differ from performed pushes");
  if (popped(tau) != multiset_of(po)) rep.violations.push_back("logged pops differ from returned elements");
  if (!lemma2_oracle(tau)) rep.violations.push_back("pushed and popped multisets differ");
  rep.history = std::move(tau);
  return rep;
}

NativeReport run_native_treiber(std::size_t threads, std::size_t ops, std::uint64_t seed) {
  NativeTreiber stack(threads * ops + 1);
  std::vector<std::vector<NativeEvent>> logs(threads + 1);
  std::vector<std::vector<std::uint64_t>> pushed_by(threads + 1), popped_by(threads + 1);
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      std::mt19937_64 rng(seed + t * 0x9e3779b97f4a7c15ULL);
      auto tid = static_cast<std::uint32_t>(t);
      for (std::size_t i = 0; i < ops; ++i) {
        if (rng() % 2 == 0) {
          std::uint64_t e = (t + 1) * 1000000 + i;
          if (stack.push(e, tid, logs[t])) pushed_by[t].push_back(e);
        } else {
          std::uint64_t e = 0;
          if (stack.pop(e, tid, logs[t])) popped_by[t].push_back(e);
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  std::uint64_t e = 0;
  while (stack.pop(e, static_cast<std::uint32_t>(threads), logs[threads])) popped_by[threads].push_back(e);

  std::vector<NativeEvent> all;
  std::vector<std::uint64_t> pu, po;
  for (std::size_t t = 0; t <= threads; ++t) {
    all.insert(all.end(), logs[t].begin(), logs[t].end());
    pu.insert(pu.end(), pushed_by[t].begin(), pushed_by[t].end());
    po.insert(po.end(), popped_by[t].begin(), popped_by[t].end());
  }
  NativeReport rep = validate_native_log(all, pu, po);
  rep.threads = threads;
  rep.ops = threads * ops;
  // Per-thread self histories must be disjoint.
  std::map<Timestamp, std::size_t> owner;
  for (std::size_t t = 0; t <= threads; ++t) {
    for (const auto& ev : logs[t]) {
      if (!owner.emplace(ev.stamp, t).second) rep.violations.push_back("two threads own stamp " + std::to_string(ev.stamp));
    }
  }
  return rep;
}

}  // namespace histrio
