#include <sstream>

#include "chainsem/scheduler.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chainsem;

namespace {

std::size_t count_kind(const RunResult& r, TransitionKind k) {
  std::size_t n = 0;
  for (const auto& ev : r.events) n += ev.transition.kind == k;
  return n;
}

}  // namespace

TEST_CASE("a finished configuration enables nothing") {
  Config cfg;
  cfg.chain.managers["puk_a"] = ManagerEntry{1, {}};
  Node n;
  n.accounts = {Account{"pak_a", "puk_a"}};
  n.programs = {ex::unit()};
  cfg.nodes = {n};
  CHECK(enabled_transitions(cfg).empty());
}

TEST_CASE("enabled transitions of the transfer scenario") {
  Scenario s = testing::bundled("transfer");
  // `let op = transfer ... in wait op` injects first.
  Config cfg = s.config;
  auto en = enabled_transitions(cfg);
  REQUIRE(en.size() == 1);
  REQUIRE(en[0].kind == TransitionKind::NodeInject);
  StepEffect fx;
  Config after = apply(cfg, en[0], &fx);
  CHECK_FALSE(fx.oph.empty());
  auto next = enabled_transitions(after);
  bool has_accept = false;
  for (const auto& t : next) {
    has_accept |= t.kind == TransitionKind::BlockAccept;
    CHECK(t.kind != TransitionKind::BlockTimeout);
  }
  CHECK(has_accept);
}

TEST_CASE("frame condition and block acceptance") {
  Scenario s = testing::bundled("two_transfers");
  Config cfg = s.config;
  auto en = enabled_transitions(cfg);
  REQUIRE(en.size() == 2);
  REQUIRE(en[0].kind == TransitionKind::NodeInject);
  Config after = apply(cfg, en[0]);
  CHECK(expr_equal(after.nodes[1].programs[0], cfg.nodes[1].programs[0]));
  CHECK_FALSE(expr_equal(after.nodes[0].programs[0], cfg.nodes[0].programs[0]));
  CHECK(after.chain.pool.size() == cfg.chain.pool.size() + 1);
  CHECK(after.chain.contractors == cfg.chain.contractors);

  // A pure step touches its own program only.
  auto step = enabled_transitions(after);
  auto eval = std::find_if(step.begin(), step.end(), [](const TransitionId& t) { return t.kind == TransitionKind::NodeEval; });
  REQUIRE(eval != step.end());
  Config evaluated = apply(after, *eval);
  CHECK(evaluated.chain == after.chain);
  CHECK(expr_equal(evaluated.nodes[1].programs[0], after.nodes[1].programs[0]));

  // Run until some block acceptance is enabled, then take it.
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    en = enabled_transitions(cfg);
    REQUIRE_FALSE(en.empty());
    auto accept = std::find_if(en.begin(), en.end(), [](const TransitionId& t) { return t.is_block(); });
    if (accept != en.end()) {
      Config next = apply(cfg, *accept);
      CHECK(next.chain.time == cfg.chain.time + 1);
      int flipped = 0;
      for (const auto& [oph, e] : next.chain.pool) flipped += !(e.status == cfg.chain.pool.at(oph).status);
      CHECK(flipped == 1);
      for (std::size_t n = 0; n < cfg.nodes.size(); ++n) {
        CHECK(expr_equal(next.nodes[n].programs[0], cfg.nodes[n].programs[0]));
      }
      return;
    }
    cfg = apply(cfg, en[choose_transition(cfg, en, Policy::Uniform, rng)]);
  }
  FAIL("no block transition became enabled");
}

TEST_CASE("stale transitions are refused") {
  Scenario s = testing::bundled("transfer");
  TransitionId bogus{TransitionKind::BlockAccept, -1, -1, "oph_deadbeef"};
  CHECK_THROWS_AS(apply(s.config, bogus), StaleTransition);
  TransitionId wrong_kind{TransitionKind::Query, 0, 0, ""};
  CHECK_THROWS_AS(apply(s.config, wrong_kind), StaleTransition);
  TransitionId out_of_range{TransitionKind::NodeEval, 5, 0, ""};
  CHECK_THROWS_AS(apply(s.config, out_of_range), StaleTransition);
}

TEST_CASE("transition ids round-trip through JSON") {
  for (int k = 0; k <= static_cast<int>(TransitionKind::BlockOriginateAccept); ++k) {
    const auto kind = static_cast<TransitionKind>(k);
    TransitionId t{kind, 1, 2, ""};
    if (t.is_block()) t = TransitionId{kind, -1, -1, "oph_ab"};
    CHECK(transition_from_json(transition_to_json(t)) == t);
    CHECK(transition_kind_from_name(transition_kind_name(kind)) == kind);
  }
  for (auto p : {Policy::Uniform, Policy::AcceptEager, Policy::TimeoutForcing}) {
    CHECK(policy_from_name(policy_name(p)) == p);
  }
  CHECK_FALSE(policy_from_name("starve"));
}

TEST_CASE("runs are deterministic under a seed") {
  Scenario s = testing::bundled("auction");
  for (auto policy : {Policy::Uniform, Policy::AcceptEager, Policy::TimeoutForcing}) {
    RunOptions o;
    o.seed = 3;
    o.policy = policy;
    o.max_steps = 2000;
    RunResult a = run(s.config, o);
    RunResult b = run(s.config, o);
    CHECK(trace_to_jsonl(a, o, s.name) == trace_to_jsonl(b, o, s.name));
    CHECK(a.violations.empty());
    CHECK(a.terminal);
    o.seed = 4;
    RunResult c = run(s.config, o);
    CHECK(c.final_digest != a.final_digest);
  }
}

TEST_CASE("replay reproduces digests and catches tampering") {
  Scenario s = testing::bundled("originate");
  RunOptions o;
  o.seed = 9;
  RunResult r = run(s.config, o);
  const std::string trace = trace_to_jsonl(r, o, s.name);
  ReplayResult ok = replay(s.config, trace);
  CHECK(ok.ok);
  CHECK(ok.steps == r.steps);
  CHECK(ok.final_digest == r.final_digest);

  // Dropping a step line breaks the chain of digests.
  std::istringstream in(trace);
  std::string line, cut;
  int n = 0;
  while (std::getline(in, line)) {
    if (n++ != 3) cut += line + "\n";
  }
  CHECK_FALSE(replay(s.config, cut).ok);

  Scenario other = testing::bundled("transfer");
  CHECK_FALSE(replay(other.config, trace).ok);
}

TEST_CASE("timeout-forcing reaches Block-Timeout") {
  Scenario s = testing::bundled("timeout");
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RunOptions o;
    o.seed = seed;
    o.policy = Policy::TimeoutForcing;
    o.max_steps = 400;
    RunResult r = run(s.config, o);
    CHECK(r.violations.empty());
    CHECK(count_kind(r, TransitionKind::BlockTimeout) >= 1);
  }
}

TEST_CASE("the monitor reports an injected fault") {
  Scenario s = testing::bundled("transfer");
  Config broken = s.config;
  broken.chain.managers.begin()->second.cnt.busy = true;
  RunOptions o;
  RunResult r = run(broken, o);
  REQUIRE_FALSE(r.violations.empty());
  CHECK(r.violations[0].step == 0);
}

TEST_CASE("trace lines carry pre and post digests") {
  Scenario s = testing::bundled("transfer");
  RunOptions o;
  o.seed = 2;
  RunResult r = run(s.config, o);
  REQUIRE(r.events.size() == r.steps);
  for (std::size_t i = 1; i < r.events.size(); ++i) CHECK(r.events[i].pre == r.events[i - 1].post);
  CHECK(r.events.back().post == r.final_digest);
  CHECK(r.events.front().pre == config_digest(s.config));
}

TEST_CASE("a call that passed its dry run but fails in the block is backtracked") {
  Config cfg;
  cfg.chain.managers["puk_alice"] = ManagerEntry{100, {}};
  cfg.chain.managers["puk_bob"] = ManagerEntry{100, {}};
  cfg.chain.managers["puk_owner"] = ManagerEntry{0, {}};
  const std::string auction = gen_contract_hash(auction_script(), 0);
  cfg.chain.contractors[auction] = ContractorEntry{auction_script(), 0, 0, "(true,(puk_owner,puk_owner))"};
  cfg.chain.time = 1;
  Node alice, bob;
  alice.accounts = {Account{"pak_alice", "puk_alice"}};
  bob.accounts = {Account{"pak_bob", "puk_bob"}};
  cfg.nodes = {alice, bob};

  auto bid = [&](const char* puk, std::int64_t nt) {
    return ex::transfer(ex::tz(nt), ex::puk(puk), ex::puh(auction), ex::right(ex::unit()), ex::tz(1));
  };
  auto low = try_inject(alice, cfg.chain, *bid("puk_alice", 40));
  REQUIRE(low.accepted);
  auto high = try_inject(bob, low.chain, *bid("puk_bob", 70));
  REQUIRE(high.accepted);
  cfg.chain = high.chain;

  StepEffect first;
  cfg = apply(cfg, TransitionId{TransitionKind::BlockAccept, -1, -1, high.oph}, &first);
  CHECK_FALSE(first.block.backtracked);
  CHECK(cfg.chain.contractors.at(auction).bal == 70);

  StepEffect second;
  cfg = apply(cfg, TransitionId{TransitionKind::BlockAccept, -1, -1, low.oph}, &second);
  CHECK(second.block.backtracked);
  CHECK(second.block.message == "bid too low");
  const PoolEntry& entry = cfg.chain.pool.at(low.oph);
  CHECK(entry.status.kind == StatusKind::Included);
  CHECK(entry.backtracked);
  CHECK(cfg.chain.managers.at("puk_alice").bal == 99);
  CHECK(cfg.chain.contractors.at(auction).bal == 70);

  const auto j = second.to_json();
  CHECK(j.at("backtracked") == true);
  CHECK(j.at("divergence") == true);
  CHECK(j.at("message") == "bid too low");
  CHECK_FALSE(first.to_json().contains("divergence"));
}
