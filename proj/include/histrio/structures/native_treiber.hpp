#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "histrio/history.hpp"

namespace histrio {

// One successful effectful CAS on the shared head, stamped by the head's version counter.
struct NativeEvent {
  Timestamp stamp = 0;
  bool push = true;
  std::uint64_t elem = 0;
  std::uint32_t thread = 0;
};

// Treiber stack on hardware atomics; the head packs a node index and a version stamp.
class NativeTreiber {
 public:
  explicit NativeTreiber(std::size_t capacity);

  // Returns false when the node pool is exhausted.
  bool push(std::uint64_t elem, std::uint32_t thread, std::vector<NativeEvent>& log);
  // Empty result when the stack is empty.
  bool pop(std::uint64_t& elem, std::uint32_t thread, std::vector<NativeEvent>& log);

 private:
  struct Node {
    std::uint64_t elem = 0;
    std::uint32_t next = 0;
  };

  std::vector<Node> nodes_;
  std::atomic<std::uint64_t> head_{0};
  std::atomic<std::uint32_t> next_free_{1};
};

struct NativeReport {
  std::size_t threads = 0;
  std::size_t ops = 0;
  std::size_t events = 0;
  History history;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

// Runs `threads` OS threads each doing `ops` random push/pop operations, drains the stack,
// and validates the stamped log post-hoc.
NativeReport run_native_treiber(std::size_t threads, std::size_t ops, std::uint64_t seed);

// Rebuilds the stack history from a stamped log and checks it.
NativeReport validate_native_log(std::vector<NativeEvent> events, const std::vector<std::uint64_t>& pushed,
                                 const std::vector<std::uint64_t>& popped);

}  // namespace histrio
