#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "histrio/scenarios.hpp"
#include "histrio/structures/native_treiber.hpp"
#include "histrio/suites.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;
using namespace histrio;

namespace {

constexpr int kPass = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;
constexpr int kInconclusive = 3;
constexpr const char* kVersion = "1.0";

struct RunConfig {
  std::string scenario;
  std::string mode = "exhaustive";
  std::optional<std::size_t> threads;
  std::optional<std::size_t> ops;
  std::optional<std::size_t> step_bound;
  std::optional<std::uint32_t> loop_bound;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::size_t runs = 1;
  std::string output;
  bool emit_trace = false;
  bool no_meta = false;
  std::string replay;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_check_suite(const std::string& s) { return s == "laws" || s == "concurroid-check" || s == "action-check"; }

json count_json(const BigCount& c) {
  if (c <= BigCount(std::numeric_limits<std::uint64_t>::max())) return json(c.convert_to<std::uint64_t>());
  return json(c.str());
}

json value_json(const Value& v) { return v.render(); }

json trace_json(const Trace& t) {
  json events = json::array();
  for (const auto& e : t.events) {
    events.push_back({{"step", e.step},
                      {"thread", e.thread},
                      {"action", e.action},
                      {"transition", e.transition},
                      {"result", value_json(e.result)},
                      {"delta", e.delta}});
  }
  json returns = json::array();
  for (const auto& r : t.returns) {
    json args = json::array();
    for (const auto& a : r.args) args.push_back(value_json(a));
    returns.push_back({{"step", r.step}, {"thread", r.thread}, {"method", r.method}, {"args", args}, {"result", value_json(r.result)}});
  }
  json out{{"schedule", t.schedule}, {"verdict", t.verdict}, {"events", events}, {"returns", returns}};
  out["result"] = t.verdict == "inconclusive" ? json(nullptr) : value_json(t.result);
  if (t.violation) out["violation"] = render(*t.violation);
  return out;
}

json violation_json(const Violation& v, const std::string& ref) {
  return {{"step", v.step},          {"thread", v.thread},      {"check", v.check}, {"expected", v.expected},
          {"actual", v.actual},      {"trace-ref", ref},        {"schedule", v.schedule}};
}

std::string trace_path(const RunConfig& c) { return (c.output.empty() ? std::string("histrio") : c.output) + ".traces.json"; }

std::string trace_ref(const RunConfig& c, std::size_t i) {
  return (c.emit_trace ? trace_path(c) : std::string()) + "#" + std::to_string(i);
}

ScenarioConfig scenario_config(const RunConfig& c) {
  ScenarioConfig sc = default_config(c.scenario);
  if (c.threads) sc.threads = *c.threads;
  if (c.ops) sc.ops = *c.ops;
  if (c.loop_bound) sc.loop_bound = *c.loop_bound;
  return sc;
}

json config_json(const RunConfig& c) {
  json j{{"scenario", c.scenario}, {"mode", c.mode}};
  if (is_check_suite(c.scenario)) {
    j["samples"] = *c.samples;
  } else if (c.mode == "native") {
    j["threads"] = *c.threads;
    j["ops-per-thread"] = *c.ops;
  } else {
    ScenarioConfig sc = scenario_config(c);
    j["threads"] = sc.threads;
    j["ops-per-thread"] = sc.ops;
    j["step-bound"] = *c.step_bound;
    j["loop-bound"] = sc.loop_bound;
  }
  if (c.mode != "exhaustive" || is_check_suite(c.scenario)) j["seed"] = *c.seed;
  if (c.mode == "random") j["runs"] = c.runs;
  return j;
}

struct Outcome {
  json report;
  json traces = json::array();
};

std::string verdict_of(std::size_t violations, const BigCount& complete) {
  if (violations > 0) return "violation";
  return complete > 0 ? "pass" : "inconclusive";
}

void fill(json& r, const std::string& verdict, json interleavings, json inconclusive, json violations, json stats) {
  r["verdict"] = verdict;
  r["interleavings"] = std::move(interleavings);
  r["inconclusive_count"] = std::move(inconclusive);
  r["violations"] = std::move(violations);
  r["stats"] = std::move(stats);
}

Outcome run_exhaustive(const RunConfig& c, const Scenario& s, json report) {
  ExploreOptions opts;
  opts.step_bound = *c.step_bound;
  ExplorationReport rep = explore(s, opts);
  Outcome out;
  json vs = json::array();
  for (std::size_t i = 0; i < rep.violations.size(); ++i) {
    vs.push_back(violation_json(rep.violations[i], trace_ref(c, i)));
    if (c.emit_trace) out.traces.push_back(trace_json(run_schedule(s, rep.violations[i].schedule)));
  }
  json stats{{"states", rep.states},
             {"transitions", rep.transitions},
             {"violating_runs", count_json(rep.violating)},
             {"final_states", rep.final_states.size()}};
  fill(report, rep.verdict(), count_json(rep.complete), count_json(rep.inconclusive), vs, stats);
  out.report = std::move(report);
  return out;
}

Outcome run_random_mode(const RunConfig& c, const Scenario& s, json report) {
  Outcome out;
  json vs = json::array();
  BigCount complete = 0, inconclusive = 0;
  std::size_t steps = 0, violations = 0;
  for (std::size_t i = 0; i < c.runs; ++i) {
    Trace t = run_random(s, *c.seed + i, *c.step_bound);
    steps += t.events.size();
    if (t.verdict == "pass") ++complete;
    if (t.verdict == "inconclusive") ++inconclusive;
    if (t.violation) {
      vs.push_back(violation_json(*t.violation, trace_ref(c, out.traces.size())));
      ++violations;
    }
    if (c.emit_trace) out.traces.push_back(trace_json(t));
  }
  fill(report, verdict_of(violations, complete), count_json(complete), count_json(inconclusive), vs,
       {{"runs", c.runs}, {"steps", steps}});
  out.report = std::move(report);
  return out;
}

Outcome run_native_mode(const RunConfig& c, json report) {
  NativeReport rep = run_native_treiber(*c.threads, *c.ops, *c.seed);
  json vs = json::array();
  for (const auto& v : rep.violations) {
    vs.push_back({{"step", 0}, {"thread", -1}, {"check", "native-log"}, {"expected", "valid stack log"}, {"actual", v},
                  {"trace-ref", nullptr}, {"schedule", json::array()}});
  }
  fill(report, rep.ok() ? "pass" : "violation", 1, 0, vs,
       {{"threads", rep.threads}, {"ops", rep.ops}, {"events", rep.events}, {"history_entries", rep.history.size()}});
  return {std::move(report), json::array()};
}

Outcome run_suite(const RunConfig& c, json report) {
  json suites = json::array();
  json vs = json::array();
  auto add = [&](const std::string& name, const std::string& subject, std::size_t samples, std::size_t applicable,
                 const std::vector<std::string>& violations) {
    suites.push_back({{"check", name}, {"subject", subject}, {"samples", samples}, {"applicable", applicable},
                      {"violations", violations.size()}});
    for (const auto& v : violations) {
      vs.push_back({{"step", 0}, {"thread", -1}, {"check", name + ":" + subject}, {"expected", "law holds"},
                    {"actual", v}, {"trace-ref", nullptr}, {"schedule", json::array()}});
    }
    if (applicable == 0 && name != "locality" && name != "footprint") {
      vs.push_back({{"step", 0}, {"thread", -1}, {"check", name + ":" + subject}, {"expected", "premise sampled"},
                    {"actual", "no applicable samples"}, {"trace-ref", nullptr}, {"schedule", json::array()}});
    }
  };
  if (c.scenario == "laws") {
    for (const auto& r : run_law_suites(*c.seed, *c.samples)) {
      std::vector<std::string> v;
      for (const auto& x : r.violations) v.push_back(x.law + ": " + x.detail);
      add("pcm-laws", r.instance, r.samples, r.samples, v);
    }
  } else if (c.scenario == "concurroid-check") {
    for (const auto& r : run_concurroid_suites(*c.seed, *c.samples)) {
      add(r.check, r.subject, r.samples, r.check == "guarantee" ? r.applicable : std::max<std::size_t>(r.applicable, 1),
          r.violations);
    }
  } else {
    for (const auto& a : run_action_suites(*c.seed, *c.samples)) {
      for (const auto& r : a.properties) add(r.check, a.action, r.samples, r.applicable, r.violations);
    }
  }
  fill(report, vs.empty() ? "pass" : "violation", 0, 0, vs, {{"suites", suites}});
  return {std::move(report), json::array()};
}

Outcome run_replay(const RunConfig& c) {
  std::ifstream in(c.replay);
  if (!in) throw UsageError("cannot open replay file " + c.replay);
  json src;
  try {
    src = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("replay file is not JSON: ") + e.what());
  }
  if (!src.contains("config") || !src["config"].contains("scenario")) throw UsageError("replay file lacks a config");
  const json& cfg = src["config"];
  RunConfig rc;
  rc.scenario = cfg["scenario"].get<std::string>();
  rc.mode = "replay";
  ScenarioConfig sc = default_config(rc.scenario);
  if (cfg.contains("threads")) sc.threads = cfg["threads"].get<std::size_t>();
  if (cfg.contains("ops-per-thread")) sc.ops = cfg["ops-per-thread"].get<std::size_t>();
  if (cfg.contains("loop-bound")) sc.loop_bound = cfg["loop-bound"].get<std::uint32_t>();
  auto s = make_scenario(rc.scenario, sc);
  if (!s) throw UsageError("replay file names an unknown scenario " + rc.scenario);
  std::vector<int> schedule;
  if (src.contains("violations") && !src["violations"].empty()) {
    schedule = src["violations"][0]["schedule"].get<std::vector<int>>();
  } else if (src.contains("schedule")) {
    schedule = src["schedule"].get<std::vector<int>>();
  } else {
    throw UsageError("replay file holds no schedule");
  }
  Trace t = run_schedule(*s, schedule);
  json report{{"version", kVersion}, {"config", cfg}, {"scenario", rc.scenario}, {"mode", "replay"}};
  json vs = json::array();
  if (t.violation) vs.push_back(violation_json(*t.violation, c.emit_trace ? trace_path(c) + "#0" : "#0"));
  fill(report, t.verdict, t.verdict == "pass" ? 1 : 0, t.verdict == "inconclusive" ? 1 : 0, vs,
       {{"steps", t.events.size()}, {"schedule", schedule}});
  Outcome out{std::move(report), json::array()};
  if (c.emit_trace) out.traces.push_back(trace_json(t));
  return out;
}

Outcome run(RunConfig& c) {
  if (!c.replay.empty()) return run_replay(c);
  bool suite = is_check_suite(c.scenario);
  ScenarioConfig sc = default_config(c.scenario);
  if (!suite && !make_scenario(c.scenario, sc)) throw UsageError("unknown scenario '" + c.scenario + "'");
  if (c.mode != "exhaustive" && c.mode != "random" && c.mode != "native") throw UsageError("unknown mode '" + c.mode + "'");
  if (!c.seed) {
    if (const char* env = std::getenv("HISTRIO_SEED")) {
      try {
        c.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw UsageError("HISTRIO_SEED is not a number");
      }
    }
  }
  if (!c.step_bound) c.step_bound = default_step_bound(c.scenario);
  if (suite) {
    if (!c.seed) c.seed = 1;
    if (!c.samples) c.samples = c.scenario == "laws" ? 1000 : 500;
  } else if (c.mode != "exhaustive" && !c.seed) {
    throw UsageError(c.mode + " mode requires --seed or HISTRIO_SEED");
  }
  if (c.mode == "native") {
    if (c.scenario != "treiber") throw UsageError("native mode runs only the treiber scenario");
    if (!c.threads) c.threads = 4;
    if (!c.ops) c.ops = 1000;
  }
  json report{{"version", kVersion}, {"config", config_json(c)}, {"scenario", c.scenario}, {"mode", c.mode}};
  if (suite) return run_suite(c, std::move(report));
  if (c.mode == "native") return run_native_mode(c, std::move(report));
  Scenario s = *make_scenario(c.scenario, scenario_config(c));
  if (c.mode == "random") return run_random_mode(c, s, std::move(report));
  return run_exhaustive(c, s, std::move(report));
}

std::string usage_scenarios() {
  std::string out;
  for (const auto& n : scenario_names()) out += n + ", ";
  return out + "laws, concurroid-check, action-check";
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  CLI::App app{"histrio: interleaving explorer and checker for concurrent objects with auxiliary histories"};
  app.add_option("--scenario", c.scenario, "Scenario: " + usage_scenarios());
  app.add_option("--mode", c.mode, "exhaustive | random | native")->capture_default_str();
  app.add_option("--threads", c.threads, "Thread count");
  app.add_option("--ops-per-thread", c.ops, "Operations per thread");
  app.add_option("--step-bound", c.step_bound, "Atomic steps per run");
  app.add_option("--loop-bound", c.loop_bound, "Iterations per retry loop");
  app.add_option("--seed", c.seed, "Seed for random and native modes (fallback HISTRIO_SEED)");
  app.add_option("--runs", c.runs, "Random schedules to draw")->capture_default_str();
  app.add_option("--samples", c.samples, "Samples per check suite");
  app.add_option("--output", c.output, "Report path (default stdout)");
  app.add_flag("--emit-trace", c.emit_trace, "Write traces to <output>.traces.json");
  app.add_flag("--no-meta", c.no_meta, "Omit timing metadata");
  app.add_option("--replay", c.replay, "Re-run the first violation schedule of a report");
  try {
    app.parse(argc, argv);
    if (c.scenario.empty() && c.replay.empty()) throw CLI::RequiredError("--scenario");
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = run(c);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!c.no_meta) {
    out.report["meta"] = {{"timestamp", static_cast<std::int64_t>(std::time(nullptr))}, {"elapsed_seconds", secs}};
  }
  if (c.emit_trace) {
    std::ofstream tf(trace_path(c));
    tf << out.traces.dump(2) << "\n";
  }
  std::string text = out.report.dump(2) + "\n";
  if (c.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(c.output);
    if (!f) {
      std::cerr << "error: cannot write " << c.output << "\n";
      return kUsage;
    }
    f << text;
  }
  std::string v = out.report["verdict"].get<std::string>();
  if (v == "violation") return kViolation;
  if (v == "inconclusive") return kInconclusive;
  return kPass;
}
