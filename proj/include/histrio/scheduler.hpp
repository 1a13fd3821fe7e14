#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "histrio/program.hpp"

namespace histrio {

using BigCount = boost::multiprecision::cpp_int;

struct Scenario {
  std::string name;
  Prog program;
  ConcurroidPtr concurroid;
  State init;
  std::uint64_t first_loc = 100;
  // Checked on the root view and result of every completed run.
  std::function<Failure(const State& final_view, const Value& result)> final_check;
};

struct Violation {
  std::size_t step = 0;
  int thread = -1;
  std::string check;
  std::string expected;
  std::string actual;
  std::vector<int> schedule;
};

struct Event {
  std::size_t step = 0;
  int thread = 0;
  std::string action;
  std::string transition;
  Value result;
  std::string delta;
};

struct MethodReturn {
  std::size_t step = 0;
  int thread = 0;
  std::string method;
  Args args;
  Value result;
};

struct Frame {
  enum class Kind : std::uint8_t { Bind, Loop, Spec, Inject, Hide };

  Kind kind = Kind::Bind;
  const Node* node = nullptr;
  std::uint32_t iteration = 0;
  std::shared_ptr<const State> entry;  // Spec
  Args args;                           // Spec
  ConcurroidPtr saved_conc;            // Hide
  std::set<Label> saved_visible;       // Hide
};

struct Thread {
  enum class Status : std::uint8_t { Running, Waiting, Done, Joined };

  Status status = Status::Running;
  int parent = -1;
  int left = -1;
  int right = -1;
  const Node* control = nullptr;  // null while returning `ret`
  Value ret;
  Env env;
  std::vector<Frame> kont;
  PcmMap self;
  std::set<Label> visible;
  ConcurroidPtr conc;
};

struct World {
  TypeMap joint;
  PcmMap root_other;
  std::vector<Thread> threads;
  std::uint64_t next_loc = 100;
  std::size_t steps = 0;
  bool erased = false;
  Heap concrete;
};

enum class StepStatus : std::uint8_t { Ok, Violation, Cut };

struct StepResult {
  StepStatus status = StepStatus::Ok;
  std::optional<Violation> violation;
};

struct MachineOptions {
  bool erased = false;
  bool check_rely = true;
};

// Single-step interpreter of a scenario; all state lives in World.
class Machine {
 public:
  Machine(const Scenario& s, MachineOptions opts = {});

  // Initial world with the root thread settled up to its first atomic action.
  std::pair<World, StepResult> start() const;
  std::vector<int> enabled(const World& w) const;
  bool complete(const World& w) const;
  StepResult step(World& w, int thread, std::vector<Event>* events = nullptr,
                  std::vector<MethodReturn>* returns = nullptr) const;
  // Final-check of a completed world.
  std::optional<Violation> finish(const World& w) const;

  State view(const World& w, int thread) const;
  // Root other joined with every live self; unchanged by forks and joins.
  PcmMap total_aux(const World& w) const;
  std::string key(const World& w) const;
  Heap final_heap(const World& w) const;

  const Scenario& scenario() const { return s_; }

 private:
  StepResult settle(World& w, int t, std::vector<MethodReturn>* returns) const;
  StepResult fork(World& w, int t, const Node* n, std::vector<MethodReturn>* returns) const;
  StepResult join(World& w, int parent, std::vector<MethodReturn>* returns) const;
  StepResult enter_hide(World& w, int t, const Node* n) const;
  StepResult exit_hide(World& w, int t, const Frame& f) const;
  Violation fail(const World& w, int t, std::string check, std::string expected, std::string actual) const;

  const Scenario& s_;
  MachineOptions opts_;
};

struct ExploreOptions {
  std::size_t step_bound = 40;
  bool check_rely = true;
  std::size_t max_violations = 8;
  std::size_t max_final_states = 64;
};

struct ExplorationReport {
  BigCount complete = 0;
  BigCount inconclusive = 0;
  BigCount violating = 0;
  std::vector<Violation> violations;
  std::vector<std::string> final_states;
  std::size_t states = 0;
  std::size_t transitions = 0;

  // "violation" if any, else "pass" when some run completed, else "inconclusive".
  std::string verdict() const;
};

// Depth-first enumeration of every schedule up to the step bound, ascending thread ids first.
// Sub-explorations from identical worlds are shared; counts remain exact per schedule.
ExplorationReport explore(const Scenario& s, const ExploreOptions& opts = {});

struct Trace {
  std::vector<Event> events;
  std::vector<MethodReturn> returns;
  std::vector<int> schedule;
  std::optional<Violation> violation;
  std::string verdict = "inconclusive";
  State final_view;
  Heap final_heap;
  Value result;
};

Trace run_random(const Scenario& s, std::uint64_t seed, std::size_t budget, bool check_rely = true);
// Follows `schedule`; a schedule naming a disabled thread ends the trace with a "schedule" violation.
Trace run_schedule(const Scenario& s, const std::vector<int>& schedule, bool erased = false, bool check_rely = true);

struct ErasureComparison {
  bool same = true;
  std::string detail;
};

// Instrumented and auxiliary-stripped runs under the same schedule agree on results and final heap.
ErasureComparison compare_erasure(const Scenario& s, const std::vector<int>& schedule);

std::string render(const Violation& v);

}  // namespace histrio
