#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "histrio/scheduler.hpp"

namespace histrio {

struct ScenarioConfig {
  std::size_t threads = 3;
  std::size_t ops = 1;
  std::uint32_t loop_bound = 3;
};

// Names accepted by make_scenario.
const std::vector<std::string>& scenario_names();
ScenarioConfig default_config(const std::string& name);
std::size_t default_step_bound(const std::string& name);

// pair-snapshot: 1 reader (readPair) against threads−1 writers, each doing `ops` writes alternating x and y.
Scenario pair_snapshot_scenario(const ScenarioConfig& c);
// racy-snapshot: as pair-snapshot, but readPair reads x then y once without validating the version.
Scenario racy_snapshot_scenario(const ScenarioConfig& c);
// treiber: threads−1 pushers with distinct elements, `ops` pushes each, and one popper doing `ops` pops.
Scenario treiber_scenario(const ScenarioConfig& c);
// producer-consumer: n = ops elements moved from ap to ac through a shared stack.
Scenario producer_consumer_scenario(const ScenarioConfig& c);
// flat-combiner: `threads` slots each doing `ops` flatCombine(push, e).
Scenario flat_combiner_scenario(const ScenarioConfig& c);
// seq-recovery: hide-scoped push(e) over a private stack of `ops` elements.
Scenario seq_recovery_scenario(const ScenarioConfig& c);
// straight-line: `threads` threads each doing `ops` private writes; exactly (threads·ops)! / (ops!)^threads runs.
Scenario straight_line_scenario(const ScenarioConfig& c);

std::optional<Scenario> make_scenario(const std::string& name, const ScenarioConfig& c);

// Elements used by the scenarios.
Value pushed_element(std::size_t thread, std::size_t k);
Value written_value(std::size_t writer, std::size_t k);

}  // namespace histrio
