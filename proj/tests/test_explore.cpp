#include "chainsem/explore.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chainsem;

TEST_CASE("depth zero visits the initial state only") {
  Scenario s = testing::bundled("two_transfers");
  ExploreOptions o;
  o.depth = 0;
  ExploreReport r = explore(s.config, o);
  CHECK(r.states == 1);
  CHECK(r.transitions == 0);
  CHECK(r.frontier == 1);
}

TEST_CASE("a configuration with no programs has one state at any depth") {
  Scenario s = testing::bundled("transfer");
  for (auto& n : s.config.nodes) n.programs.clear();
  for (std::size_t depth : {0u, 3u, 10u}) {
    ExploreOptions o;
    o.depth = depth;
    ExploreReport r = explore(s.config, o);
    CHECK(r.states == 1);
    CHECK(r.terminal == 1);
    CHECK(r.terminal_all_unit == 1);
  }
}

TEST_CASE("single transfer statuses") {
  Scenario s = testing::bundled("transfer");
  ExploreOptions o;
  o.depth = 5;
  ExploreReport r = explore(s.config, o);
  CHECK(r.reachable_statuses == std::set<std::string>{"absent", "pending", "included"});
  CHECK(r.violations.empty());

  o.depth = 8;
  r = explore(s.config, o);
  CHECK(r.deadlocks == 0);
  CHECK(r.terminal >= 1);
  CHECK(r.terminal == r.terminal_all_unit);
  CHECK(r.leaf_partitions.count("included") == 1);
  CHECK(r.reachable_statuses.count("timeout") == 0);
}

TEST_CASE("parallel and serial searches agree") {
  for (const char* name : {"transfer", "two_transfers", "originate", "auction1"}) {
    CAPTURE(name);
    Scenario s = testing::bundled(name);
    ExploreOptions o;
    o.depth = 12;
    o.keep_terminals = true;
    ExploreReport a = explore(s.config, o);
    ExploreReport b = explore_serial(s.config, o);
    CHECK(a.states == b.states);
    CHECK(a.transitions == b.transitions);
    CHECK(a.terminal == b.terminal);
    CHECK(a.frontier == b.frontier);
    CHECK(a.terminal_keys == b.terminal_keys);
    CHECK(a.leaf_partitions == b.leaf_partitions);
    CHECK(a.reachable_statuses == b.reachable_statuses);
    CHECK(a.violations.size() == b.violations.size());
  }
}

TEST_CASE("budget exhaustion is reported") {
  Scenario s = testing::bundled("auction");
  ExploreOptions o;
  o.depth = 50;
  o.budget = 100;
  ExploreReport r = explore(s.config, o);
  CHECK(r.budget_exhausted);
  CHECK_FALSE(r.complete);
}

TEST_CASE("canonical keys ignore hash values") {
  Scenario s = testing::bundled("transfer");
  RunOptions ro;
  ro.seed = 1;
  RunResult r = run(s.config, ro);
  // Renaming a pool key does not change the canonical text.
  Config cfg = r.final;
  REQUIRE(cfg.chain.pool.size() == 1);
  Config renamed = cfg;
  auto node = renamed.chain.pool.extract(renamed.chain.pool.begin());
  const std::string old_key = node.key();
  node.key() = "oph_ffffffffffffffffffffffffffffffff";
  renamed.chain.pool.insert(std::move(node));
  CHECK(canonical_text(renamed) == canonical_text(cfg));
  CHECK(canonical_text(cfg).find(old_key) == std::string::npos);
}

TEST_CASE("complete exploration of the one-bidder auction") {
  Scenario s = testing::bundled("auction1");
  ExploreOptions o;
  o.depth = 1000;
  ExploreReport r = explore(s.config, o);
  CHECK(r.complete);
  CHECK(r.deadlocks == 0);
  CHECK(r.violations.empty());
  CHECK(r.terminal == r.terminal_all_unit);
  CHECK(r.terminal >= 1);
}

TEST_CASE("parallel and serial sweeps agree") {
  std::vector<Scenario> scenarios = {testing::bundled("transfer"), testing::bundled("failures")};
  std::vector<SweepJob> jobs;
  for (const auto& s : scenarios) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      jobs.push_back(SweepJob{&s.config, s.name, seed, static_cast<Policy>(seed % 3), 200});
    }
  }
  SweepResult a = sweep(jobs, CheckSet::all());
  SweepResult b = sweep_serial(jobs, CheckSet::all());
  CHECK(a.runs == jobs.size());
  CHECK(a.runs == b.runs);
  CHECK(a.steps == b.steps);
  CHECK(a.terminal_runs == b.terminal_runs);
  CHECK(a.failures.empty());
  CHECK(a.stats.evaluated == b.stats.evaluated);
}
