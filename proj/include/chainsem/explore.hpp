#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "chainsem/scheduler.hpp"
#include "json.hpp"

namespace chainsem {

/// Text of a configuration with every oph/puh replaced by its allocation
/// index. Operations are ordered by (injection time, operation text) and
/// contracts by (time, code), so two configurations that differ only in
/// hash values get the same key.
std::string canonical_text(const Config& cfg);
/// Fixed-width digest of canonical_text.
std::string canonical_key(const Config& cfg);

struct ExploreOptions {
  std::size_t depth = 10;
  std::size_t budget = 200000;  // distinct states
  CheckSet checks = CheckSet::all();
  bool keep_terminals = false;
};

struct ExploreReport {
  std::size_t states = 0;       // distinct canonical states visited
  std::size_t transitions = 0;  // edges expanded
  std::size_t terminal = 0;     // states with nothing enabled
  std::size_t terminal_all_unit = 0;
  std::size_t deadlocks = 0;
  std::size_t frontier = 0;  // states at the depth bound, not expanded
  std::size_t max_depth = 0;
  bool budget_exhausted = false;
  bool complete = false;  // no unexpanded state left
  /// Statuses seen for pool entries across all states ("absent" when the
  /// pool is empty).
  std::set<std::string> reachable_statuses;
  /// Leaves (terminal or frontier) grouped by the sorted statuses of their
  /// pool entries.
  std::map<std::string, std::size_t> leaf_partitions;
  std::vector<Violation> violations;
  CheckStats stats;
  std::vector<Config> terminals;      // keep_terminals only
  std::set<std::string> terminal_keys;

  nlohmann::json to_json() const;
};

/// Breadth-first search over enabled transitions with duplicate detection
/// on canonical keys. Expansion of each level runs on OpenMP threads; the
/// merge is serial and in a fixed order, so the result does not depend on
/// the thread count.
ExploreReport explore(const Config& cfg, const ExploreOptions& options);

/// Plain single-threaded queue-based search. Reference for testing.
ExploreReport explore_serial(const Config& cfg, const ExploreOptions& options);

struct SweepJob {
  const Config* config = nullptr;
  std::string scenario;
  std::uint64_t seed = 0;
  Policy policy = Policy::Uniform;
  std::size_t max_steps = 200;
};

struct SweepFailure {
  std::string scenario;
  std::uint64_t seed = 0;
  Policy policy = Policy::Uniform;
  Violation violation;
};

struct SweepResult {
  std::size_t runs = 0;
  std::size_t steps = 0;
  std::size_t terminal_runs = 0;
  std::vector<SweepFailure> failures;  // first violation of each failing run, in job order
  CheckStats stats;
};

/// Runs every job with the given checks; runs are independent and spread
/// over OpenMP threads.
SweepResult sweep(const std::vector<SweepJob>& jobs, CheckSet checks);
SweepResult sweep_serial(const std::vector<SweepJob>& jobs, CheckSet checks);

}  // namespace chainsem
