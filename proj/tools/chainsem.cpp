// chainsem: run, explore, typecheck and replay scenario files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "chainsem/explore.hpp"
#include "chainsem/scenario.hpp"
#include "chainsem/scheduler.hpp"

using namespace chainsem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kViolation = 2, kBudget = 3 };

struct Common {
  std::string scenario;
  std::optional<std::string> asserts;
  std::optional<std::size_t> pool_cap;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("scenario", c.scenario, "Scenario JSON file")->required();
  cmd->add_option("--assert", c.asserts, "all, none, or a comma-separated list of checks")
      ->envname("CHAINSEM_ASSERT");
  cmd->add_option("--pool-cap", c.pool_cap, "Maximum number of pending operations")
      ->envname("CHAINSEM_POOL_CAP");
}

std::optional<Scenario> load(const Common& c) {
  try {
    Scenario s = load_scenario_file(c.scenario);
    if (c.asserts) s.asserts = CheckSet::parse(*c.asserts);
    if (c.pool_cap) s.config.chain.params.pool_cap = *c.pool_cap;
    return s;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::nullopt;
  }
}

bool report_diagnostics(const Scenario& s) {
  const auto diags = validate_scenario(s);
  for (const auto& d : diags) {
    std::cerr << "invalid scenario [" << d.check << "] " << d.where << ": " << d.message << "\n";
  }
  return diags.empty();
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  out << text;
  return true;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int do_replay(const Scenario& s, const std::string& trace_path) {
  auto text = read_file(trace_path);
  if (!text) {
    std::cerr << "error: cannot read " << trace_path << "\n";
    return kInvalid;
  }
  const ReplayResult r = replay(s.config, *text);
  std::cout << json{{"replayed", r.steps}, {"ok", r.ok}, {"digest", r.final_digest}, {"message", r.message}}.dump()
            << "\n";
  return r.ok ? kOk : kViolation;
}

struct RunArgs {
  Common common;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_steps;
  std::optional<std::string> policy;
  std::optional<std::string> trace;
  std::optional<std::string> snapshot;
  std::optional<std::string> replay;
};

int cmd_run(const RunArgs& a) {
  auto s = load(a.common);
  if (!s) return kInvalid;
  if (!report_diagnostics(*s)) return kInvalid;
  if (a.replay) return do_replay(*s, *a.replay);

  RunOptions opts;
  opts.seed = a.seed.value_or(s->seed);
  opts.max_steps = a.max_steps.value_or(s->max_steps);
  opts.policy = s->policy;
  if (a.policy) {
    auto p = policy_from_name(*a.policy);
    if (!p) {
      std::cerr << "error: unknown policy '" << *a.policy << "'\n";
      return kInvalid;
    }
    opts.policy = *p;
  }
  opts.checks = s->asserts;

  RunResult r;
  try {
    r = run(s->config, opts);
  } catch (const std::exception& e) {
    std::cerr << "model fault: " << e.what() << "\n";
    return kViolation;
  }
  const std::string trace_path = a.trace.value_or(s->name + ".trace.jsonl");
  const std::string snapshot_path = a.snapshot.value_or(s->name + ".final.json");
  if (!write_file(trace_path, trace_to_jsonl(r, opts, s->name))) return kInvalid;
  Scenario final_state = *s;
  final_state.config = r.final;
  if (!write_file(snapshot_path, serialize_scenario(final_state).dump(2) + "\n")) return kInvalid;

  json summary = {{"scenario", s->name},
                  {"seed", opts.seed},
                  {"policy", policy_name(opts.policy)},
                  {"steps", r.steps},
                  {"terminal", r.terminal},
                  {"digest", r.final_digest},
                  {"trace", trace_path},
                  {"snapshot", snapshot_path}};
  std::cout << summary.dump() << "\n";
  for (const auto& v : r.violations) {
    std::cerr << "violation [" << v.check << "] at step " << v.step << ": " << v.message << "\n";
  }
  return r.violations.empty() ? kOk : kViolation;
}

struct ExploreArgs {
  Common common;
  std::optional<std::size_t> depth;
  std::size_t budget = 200000;
  bool serial = false;
};

int cmd_explore(const ExploreArgs& a) {
  auto s = load(a.common);
  if (!s) return kInvalid;
  ExploreOptions opts;
  opts.depth = a.depth.value_or(10);
  opts.budget = a.budget;
  opts.checks = s->asserts;
  ExploreReport r;
  try {
    r = a.serial ? explore_serial(s->config, opts) : explore(s->config, opts);
  } catch (const std::exception& e) {
    std::cerr << "model fault: " << e.what() << "\n";
    return kViolation;
  }
  std::cout << r.to_json().dump(2) << "\n";
  for (const auto& v : r.violations) {
    std::cerr << "violation [" << v.check << "] at depth " << v.step << ": " << v.message << "\n";
  }
  if (!r.violations.empty() || r.deadlocks > 0) return kViolation;
  return r.budget_exhausted ? kBudget : kOk;
}

int cmd_typecheck(const Common& c) {
  auto s = load(c);
  if (!s) return kInvalid;
  const Config& cfg = s->config;
  const ContractTyEnv delta = delta_of(cfg.chain);
  json out = {{"scenario", s->name}};
  json d = json::object();
  for (const auto& [puh, t] : delta) d[puh] = t.to_string();
  out["delta"] = d;
  const AmbientInfo ambient{&cfg.chain, &delta, TypingMode::Strict};
  json programs = json::array();
  for (std::size_t n = 0; n < cfg.nodes.size(); ++n) {
    for (std::size_t p = 0; p < cfg.nodes[n].programs.size(); ++p) {
      json entry = {{"node", n}, {"program", p}};
      if (auto err = program_type_error(cfg.nodes[n].programs[p], ambient)) {
        entry["error"] = err->to_json();
      } else {
        entry["type"] = Ty::unit().to_string();
      }
      programs.push_back(entry);
    }
  }
  out["programs"] = programs;
  const auto diags = validate_scenario(*s);
  json dj = json::array();
  for (const auto& x : diags) dj.push_back(x.to_json());
  out["diagnostics"] = dj;
  out["ok"] = diags.empty();
  std::cout << out.dump(2) << "\n";
  for (const auto& x : diags) std::cerr << "[" << x.check << "] " << x.where << ": " << x.message << "\n";
  return diags.empty() ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run and check blockchain-interacting programs"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario under a scheduling policy");
  add_common(run_cmd, run_args.common);
  run_cmd->add_option("--seed", run_args.seed, "Random seed")->envname("CHAINSEM_SEED");
  run_cmd->add_option("--max-steps", run_args.max_steps, "Step limit")->envname("CHAINSEM_MAX_STEPS");
  run_cmd->add_option("--policy", run_args.policy, "uniform, accept-eager or timeout-forcing")
      ->envname("CHAINSEM_POLICY");
  run_cmd->add_option("--trace", run_args.trace, "JSON-lines trace output")->envname("CHAINSEM_TRACE");
  run_cmd->add_option("--snapshot", run_args.snapshot, "Final-state snapshot output")
      ->envname("CHAINSEM_SNAPSHOT");
  run_cmd->add_option("--replay", run_args.replay, "Replay this trace instead of running");

  ExploreArgs explore_args;
  auto* explore_cmd = app.add_subcommand("explore", "Breadth-first search of reachable states");
  add_common(explore_cmd, explore_args.common);
  explore_cmd->add_option("--depth", explore_args.depth, "Depth bound")->envname("CHAINSEM_DEPTH");
  explore_cmd->add_option("--budget", explore_args.budget, "Maximum number of states")
      ->envname("CHAINSEM_BUDGET");
  explore_cmd->add_flag("--serial", explore_args.serial, "Use the single-threaded search");

  Common typecheck_args;
  auto* typecheck_cmd = app.add_subcommand("typecheck", "Type the programs of a scenario");
  add_common(typecheck_cmd, typecheck_args);

  Common replay_args;
  std::string replay_trace;
  auto* replay_cmd = app.add_subcommand("replay", "Re-apply a recorded trace and compare digests");
  add_common(replay_cmd, replay_args);
  replay_cmd->add_option("trace", replay_trace, "Trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kInvalid;
  }

  try {
    if (*run_cmd) return cmd_run(run_args);
    if (*explore_cmd) return cmd_explore(explore_args);
    if (*typecheck_cmd) return cmd_typecheck(typecheck_args);
    if (*replay_cmd) {
      auto s = load(replay_args);
      if (!s) return kInvalid;
      return do_replay(*s, replay_trace);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
