// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chainsem/bundled.hpp"
#include "chainsem/contracts.hpp"
#include "chainsem/explore.hpp"
#include "chainsem/scenario.hpp"
#include "chainsem/scheduler.hpp"
#include "chainsem/stored.hpp"
#include "chainsem/typecheck.hpp"

using namespace chainsem;

namespace {

// Pinned parameters.
constexpr std::size_t kSweepTraces = 10000;
constexpr std::size_t kSweepMaxSteps = 200;
constexpr double kSweepSeconds = 120.0;
constexpr std::size_t kProgressDepth = 10;
constexpr std::size_t kAuctionSeeds = 100;
constexpr std::size_t kAuctionMaxSteps = 2000;
constexpr std::size_t kCastCases = 10000;
constexpr std::size_t kReplaySeeds = 100;

const std::vector<std::string> kSweepScenarios = {"auction", "transfer", "originate", "timeout", "failures"};
const std::vector<std::string> kProgressScenarios = {"transfer", "two_transfers", "originate"};

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  [%d] %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

/// Collects failure messages; the first few are kept for the report.
struct Problems {
  std::size_t count = 0;
  std::string first;
  void add(const std::string& msg) {
    if (count++ == 0) first = msg;
  }
  bool none() const { return count == 0; }
  std::string summary() const { return none() ? "" : " (first: " + first + ")"; }
};

std::size_t evaluated(const CheckStats& s, const std::string& check) {
  auto it = s.evaluated.find(check);
  return it == s.evaluated.end() ? 0 : it->second;
}

std::size_t failed_prefix(const CheckStats& s, const std::string& prefix) {
  std::size_t n = 0;
  for (const auto& [name, count] : s.failed) {
    if (name.rfind(prefix, 0) == 0) n += count;
  }
  return n;
}

Policy cycled(std::uint64_t seed) { return static_cast<Policy>(seed % 3); }

// --- 1, 3, 4, 5: the sweep ---------------------------------------------------------------

struct SweepOutcome {
  SweepResult result;
  double seconds = 0;
};

SweepOutcome run_sweep(const std::vector<Scenario>& scenarios) {
  std::vector<SweepJob> jobs;
  jobs.reserve(kSweepTraces);
  const std::size_t per = kSweepTraces / scenarios.size();
  for (const auto& s : scenarios) {
    for (std::uint64_t seed = 1; seed <= per; ++seed) {
      jobs.push_back(SweepJob{&s.config, s.name, seed, cycled(seed), kSweepMaxSteps});
    }
  }
  const auto t0 = std::chrono::steady_clock::now();
  SweepOutcome out;
  out.result = sweep(jobs, CheckSet::all());
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

std::string first_failure(const SweepResult& r, const std::string& prefix) {
  for (const auto& f : r.failures) {
    if (f.violation.check.rfind(prefix, 0) == 0) {
      return f.scenario + " seed " + std::to_string(f.seed) + " step " + std::to_string(f.violation.step) +
             ": " + f.violation.message;
    }
  }
  return "";
}

void criterion_preservation(const SweepOutcome& s) {
  const SweepResult& r = s.result;
  const std::size_t checked = evaluated(r.stats, "preservation");
  const std::size_t bad = failed_prefix(r.stats, "preservation") + failed_prefix(r.stats, "well-formed");
  std::ostringstream d;
  d << r.runs << " traces over " << kSweepScenarios.size() << " scenarios, " << r.steps << " steps, " << checked
    << " typing checks, " << bad << " violations, " << r.failures.size() << " failing runs, " << s.seconds
    << "s (limit " << kSweepSeconds << "s)";
  std::string why = first_failure(r, "preservation");
  if (why.empty() && !r.failures.empty()) {
    const auto& f = r.failures.front();
    why = f.scenario + " seed " + std::to_string(f.seed) + " [" + f.violation.check + "] " + f.violation.message;
  }
  if (!why.empty()) d << " (first: " << why << ")";
  const bool pass = r.runs == kSweepTraces && checked >= r.steps && r.steps > 0 && bad == 0 &&
                    r.failures.empty() && s.seconds <= kSweepSeconds;
  report(1, "preservation sweep", pass, d.str());
}

/// Corrupts a real block step once per item and confirms the matching item
/// fires, so a clean sweep means the items were live.
std::vector<int> mutation_misses() {
  const Scenario s = load_scenario(bundled_scenario("originate"));
  Config cfg = s.config;
  Blockchain before, after;
  BlockEffect fx;
  bool have_transfer = false, have_origination = false;
  Blockchain orig_before, orig_after;
  for (int i = 0; i < 500 && !(have_transfer && have_origination); ++i) {
    auto en = enabled_transitions(cfg);
    if (en.empty()) break;
    // Block transitions come last; taking them first keeps waiting programs short.
    const TransitionId t = en.back();
    StepEffect e;
    Config next = apply(cfg, t, &e);
    if (t.kind == TransitionKind::BlockOriginateAccept) {
      orig_before = cfg.chain;
      orig_after = next.chain;
      have_origination = true;
    } else if (t.kind == TransitionKind::BlockAccept) {
      before = cfg.chain;
      after = next.chain;
      fx = e.block;
      have_transfer = true;
    }
    cfg = std::move(next);
  }
  std::vector<int> misses;
  if (!have_transfer || !have_origination) return {0};

  auto fires = [](const Blockchain& b, const Blockchain& a, const BlockEffect* e, int item) {
    for (const auto& [k, msg] : check_chain_step(b, a, e)) {
      if (k == item) return true;
    }
    return false;
  };
  const std::string oph = [&] {
    for (const auto& [h, e] : after.pool) {
      if (!(e.status == before.pool.at(h).status)) return h;
    }
    return std::string();
  }();
  const std::string sender = after.pool.at(oph).op.sender;

  std::map<int, std::function<bool()>> cases;
  cases[1] = [&] { Blockchain a = after; a.time = before.time - 1; return fires(before, a, &fx, 1); };
  cases[2] = [&] { Blockchain a = after; a.pool.erase(oph); return fires(before, a, &fx, 2); };
  cases[3] = [&] { Blockchain a = after; a.pool.at(oph).op.nt += 1; return fires(before, a, &fx, 3); };
  cases[4] = [&] { Blockchain a = after; a.pool.at(oph).status.t += 5; return fires(before, a, &fx, 4); };
  cases[5] = [&] {
    Blockchain b = before;
    b.time = 0;
    Blockchain a = b;
    Operation op = after.pool.at(oph).op;
    op.nt = 1;
    a = inject(a, op);
    a.managers.at(op.sender).cnt.busy = false;
    return fires(b, a, nullptr, 5);
  };
  cases[6] = [&] { Blockchain a = after; a.managers.erase(sender); return fires(before, a, &fx, 6); };
  cases[7] = [&] { Blockchain a = after; a.managers.at(sender).cnt.n += 1; return fires(before, a, &fx, 7); };
  cases[8] = [&] {
    Blockchain a = orig_after;
    for (auto& [h, c] : a.contractors) c.t += 1;
    return fires(orig_after, a, nullptr, 8);
  };
  cases[9] = [&] {
    Blockchain a = orig_after;
    auto node = a.contractors.extract(a.contractors.begin());
    node.key() = "puh_00000000000000000000000000000000";
    a.contractors.insert(std::move(node));
    return fires(orig_before, a, nullptr, 9);
  };
  for (auto& [item, fn] : cases) {
    if (!fn()) misses.push_back(item);
  }
  return misses;
}

void criterion_chain_steps(const SweepOutcome& s) {
  const SweepResult& r = s.result;
  const std::size_t checked = evaluated(r.stats, "chain-steps");
  std::map<int, std::size_t> per_item;
  for (int item = 1; item <= 9; ++item) {
    per_item[item] = failed_prefix(r.stats, "chain-steps.item" + std::to_string(item));
  }
  std::size_t bad = 0;
  for (const auto& [item, n] : per_item) bad += n;
  const auto misses = mutation_misses();
  std::ostringstream d;
  d << checked << " step pairs checked against items 1-9, " << bad << " violations; mutation self-test "
    << (9 - misses.size()) << "/9 items detected";
  if (!misses.empty()) {
    d << " (undetected:";
    for (int m : misses) d << " " << m;
    d << ")";
  }
  const std::string why = first_failure(r, "chain-steps");
  if (!why.empty()) d << " (first: " << why << ")";
  report(3, "chain-step items", checked > 0 && bad == 0 && misses.empty(), d.str());
}

void criterion_references(const SweepOutcome& s) {
  const SweepResult& r = s.result;
  const std::size_t checked = evaluated(r.stats, "references");
  const std::size_t bad = failed_prefix(r.stats, "references");
  std::ostringstream d;
  d << checked << " configurations checked, " << bad << " unresolved literals";
  const std::string why = first_failure(r, "references");
  if (!why.empty()) d << " (first: " << why << ")";
  report(4, "literal references", checked >= r.steps && bad == 0, d.str());
}

void criterion_consistency(const SweepOutcome& s) {
  const SweepResult& r = s.result;
  const std::size_t checked = evaluated(r.stats, "consistency");
  const std::size_t bad = failed_prefix(r.stats, "consistency");
  std::ostringstream d;
  d << checked << " pool checks after block and inject steps, " << bad << " violations";
  const std::string why = first_failure(r, "consistency");
  if (!why.empty()) d << " (first: " << why << ")";
  report(5, "consistency", checked > 0 && bad == 0, d.str());
}

// --- 2: progress ----------------------------------------------------------------------------

void criterion_progress() {
  bool pass = true;
  std::ostringstream d;
  for (const auto& name : kProgressScenarios) {
    const Scenario s = load_scenario(bundled_scenario(name));
    std::size_t pending_ops = 0, programs = 0;
    for (const auto& n : s.config.nodes) programs += n.programs.size();
    for (const auto& [h, e] : s.config.chain.pool) pending_ops += e.status.kind == StatusKind::Pending;
    ExploreOptions o;
    o.depth = kProgressDepth;
    const ExploreReport r = explore(s.config, o);
    const bool ok = r.deadlocks == 0 && r.violations.empty() && r.terminal == r.terminal_all_unit &&
                    !r.budget_exhausted && programs <= 2 && pending_ops <= 2 &&
                    evaluated(r.stats, "progress") == r.states;
    // The same scenario without a depth bound, as a stronger companion check.
    ExploreOptions full;
    full.depth = s.max_steps;
    const ExploreReport f = explore(s.config, full);
    const bool full_ok = f.complete && f.deadlocks == 0 && f.violations.empty() && f.terminal == f.terminal_all_unit;
    pass = pass && ok && full_ok;
    d << name << " " << r.states << " states/" << r.terminal << " terminal (" << r.terminal_all_unit
      << " all unit)/" << r.deadlocks << " deadlocks";
    if (!r.violations.empty()) d << " [" << r.violations.front().check << ": " << r.violations.front().message << "]";
    d << ", unbounded " << f.states << " states/" << f.terminal << " terminal/" << f.deadlocks << " deadlocks; ";
  }
  d << "depth " << kProgressDepth;
  report(2, "progress", pass, d.str());
}

// --- 6: lifecycle boundaries ----------------------------------------------------------------

void criterion_lifecycle() {
  Problems p;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) p.add(what);
  };
  Blockchain base;
  base.managers["puk_a"] = ManagerEntry{100, {3, false}};
  base.managers["puk_b"] = ManagerEntry{0, {}};
  Operation op;
  op.nt = 60;
  op.sender = "puk_a";
  op.target = "puk_b";
  op.arg = "()";
  op.fee = 40;

  for (std::int64_t injected : {0, 5, 17}) {
    Blockchain b = base;
    b.time = injected;
    std::string oph;
    b = inject(b, op, &oph);
    for (std::int64_t gap : {0, 59, 60, 61, 62}) {
      Blockchain now = b;
      now.time = injected + gap;
      const bool acc = accept_enabled(now, oph);
      const bool tmo = timeout_enabled(now, oph);
      const std::string at = "t^=" + std::to_string(injected) + " gap " + std::to_string(gap);
      expect(acc == (gap <= kAcceptWindow), at + ": accept enabled is wrong");
      expect(tmo == (gap > kAcceptWindow), at + ": timeout enabled is wrong");

      // The scheduler offers exactly one of the two.
      Config cfg;
      cfg.chain = now;
      std::size_t accepts = 0, timeouts = 0;
      for (const auto& t : enabled_transitions(cfg)) {
        accepts += t.kind == TransitionKind::BlockAccept;
        timeouts += t.kind == TransitionKind::BlockTimeout;
      }
      expect(accepts == (acc ? 1u : 0u) && timeouts == (tmo ? 1u : 0u), at + ": scheduler offers the wrong rule");

      if (acc) {
        Blockchain a = block_accept(now, oph);
        expect(a.pool.at(oph).status == Status{StatusKind::Included, now.time}, at + ": not included(now)");
        expect(a.time == now.time + 1, at + ": time not advanced by one");
        // updSucc: <bal - nt - fee, (n+1, False)>
        expect(a.managers.at("puk_a") == ManagerEntry{0, {4, false}}, at + ": sender is not updSucc");
        expect(a.managers.at("puk_b").bal == 60, at + ": recipient not credited");
      }
      if (tmo) {
        Blockchain t = block_timeout(now, oph);
        expect(t.pool.at(oph).status.kind == StatusKind::Timeout, at + ": not timed out");
        // updCount(.., False): balance and counter value unchanged.
        expect(t.managers.at("puk_a") == ManagerEntry{100, {3, false}}, at + ": sender is not updCount");
        expect(t.time == now.time, at + ": timeout moved time");
        expect(chk_count(t.managers, "puk_a"), at + ": sender cannot inject again");
      }
    }
  }

  // Exact equations.
  Managers m;
  m["puk_x"] = ManagerEntry{100, {3, true}};
  expect(upd_succ(m, "puk_x", 60, 40).at("puk_x") == ManagerEntry{0, {4, false}}, "updSucc(100,(3,T),60,40)");
  expect(upd_succ(m, "puk_x", 0, 0).at("puk_x") == ManagerEntry{100, {4, false}}, "updSucc(100,(3,T),0,0)");
  m["puk_x"] = ManagerEntry{10, {2, false}};
  expect(upd_count(m, "puk_x", true).at("puk_x") == ManagerEntry{10, {2, true}}, "updCount(10,(2,F),T)");
  expect(upd_count(upd_count(m, "puk_x", false), "puk_x", false) == m, "updCount idempotence");

  report(6, "lifecycle boundaries", p.none(),
         "gaps 0/59/60/61/62 at three injection times, updSucc/updCount equations, " + std::to_string(p.count) +
             " mismatches" + p.summary());
}

// --- 7: auction end to end ------------------------------------------------------------------

struct AuctionCheck {
  Problems problems;
  std::size_t failwiths = 0;
  std::size_t bids = 0;
  std::size_t max_steps_seen = 0;
};

/// Re-applies a recorded run and checks the auction's story against it.
void check_auction_run(const Scenario& s, const RunResult& r, AuctionCheck& out, const std::string& tag) {
  auto fail = [&](const std::string& msg) { out.problems.add(tag + ": " + msg); };
  if (!r.violations.empty()) {
    fail("[" + r.violations.front().check + "] " + r.violations.front().message);
    return;
  }
  if (!r.terminal) fail("did not terminate within " + std::to_string(kAuctionMaxSteps) + " steps");
  out.max_steps_seen = std::max(out.max_steps_seen, r.steps);

  const std::string auction = s.bindings.at("auction");
  std::map<std::string, std::int64_t> limits;
  std::int64_t max_limit = 0;
  for (const auto& b : auction_bidders(s.name)) {
    limits["puk_" + b.name] = b.limit;
    max_limit = std::max<std::int64_t>(max_limit, b.limit);
  }
  std::string last_bidder = "puk_owner";
  std::int64_t last_bid = 0;
  bool closed = false;

  Config cfg = s.config;
  for (const auto& ev : r.events) {
    StepEffect fx;
    Config next = apply(cfg, ev.transition, &fx);
    if (ev.transition.kind == TransitionKind::NodeReject && fx.raised && fx.raised->kind == ExprKind::FailWith) {
      ++out.failwiths;
      if (fx.raised->text != "bid too low" && fx.raised->text != "closed") {
        fail("unexpected FAILWITH '" + fx.raised->text + "'");
      }
    }
    if (ev.transition.kind == TransitionKind::BlockAccept) {
      const PoolEntry& e = next.chain.pool.at(ev.transition.oph);
      if (e.op.target == auction && !e.backtracked) {
        const std::int64_t bal_before = cfg.chain.contractors.at(auction).bal;
        const std::int64_t bal_after = next.chain.contractors.at(auction).bal;
        if (e.op.arg == "right(())") {
          ++out.bids;
          if (e.op.nt <= last_bid) fail("accepted bid does not exceed the previous one");
          if (!limits.count(e.op.sender) || e.op.nt > limits.at(e.op.sender)) fail("bid above the bidder's limit");
          last_bidder = e.op.sender;
          last_bid = e.op.nt;
          if (bal_after != last_bid) fail("contract balance is not the high bid after a bid");
        } else {
          closed = true;
          if (bal_before != last_bid) fail("contract balance at close is not the last accepted bid");
          if (bal_before > max_limit) fail("final high bid above the largest limit");
          if (bal_after != 0) fail("close did not pay out the balance");
          const auto credit = fx.block.credits.find("puk_owner");
          const std::int64_t paid = credit == fx.block.credits.end() ? 0 : credit->second;
          if (paid != bal_before) fail("owner was not paid the high bid");
        }
      }
    }
    cfg = std::move(next);
  }
  if (config_digest(cfg) != r.final_digest) fail("re-applied run ends in another state");
  if (!closed) fail("auction never closed");
  const auto storage = parse_stored(cfg.chain.contractors.at(auction).storage,
                                    Ty::pair(Ty::boolean(), Ty::pair(Ty::addr(), Ty::addr())));
  if (!storage) {
    fail("final storage does not parse");
  } else {
    if ((*storage)->kids[0]->number != 0) fail("bidding flag still set");
    if ((*storage)->kids[1]->kids[1]->text != last_bidder) fail("highest_bidder is not the last accepted bidder");
  }
  if (!all_programs_unit(cfg)) fail("some program did not finish at unit (uncaught exception)");
  if (auto err = config_type_error(delta_of(cfg.chain), cfg)) fail("final config is ill-typed: " + *err);
}

void criterion_auction() {
  const Scenario s = load_scenario(bundled_scenario("auction"));
  AuctionCheck check;
  for (std::uint64_t seed = 1; seed <= kAuctionSeeds; ++seed) {
    RunOptions o;
    o.seed = seed;
    o.policy = cycled(seed);
    o.max_steps = kAuctionMaxSteps;
    const RunResult r = run(s.config, o);
    check_auction_run(s, r, check, "seed " + std::to_string(seed) + "/" + std::string(policy_name(o.policy)));
  }

  // One-bidder variant: complete exploration, then every seeded run must end
  // in one of the explored terminal states.
  const Scenario one = load_scenario(bundled_scenario("auction1"));
  ExploreOptions eo;
  eo.depth = one.max_steps;
  eo.keep_terminals = true;
  const ExploreReport er = explore(one.config, eo);
  Problems cross;
  if (!er.complete) cross.add("exploration incomplete");
  if (er.deadlocks || !er.violations.empty()) cross.add("exploration found a deadlock or violation");
  AuctionCheck one_check;
  std::set<std::string> hit;
  for (std::uint64_t seed = 1; seed <= kAuctionSeeds; ++seed) {
    RunOptions o;
    o.seed = seed;
    o.policy = cycled(seed);
    o.max_steps = one.max_steps;
    const RunResult r = run(one.config, o);
    check_auction_run(one, r, one_check, "auction1 seed " + std::to_string(seed));
    const std::string key = canonical_key(r.final);
    if (!er.terminal_keys.count(key)) cross.add("seed " + std::to_string(seed) + " ends outside the explored terminals");
    hit.insert(key);
  }
  for (const auto& t : er.terminals) {
    const auto& c = t.chain.contractors.at(one.bindings.at("auction"));
    if (c.bal != 0 || c.storage.rfind("(false,", 0) != 0) cross.add("an explored terminal leaves the auction open");
  }

  std::ostringstream d;
  d << kAuctionSeeds << " seeds, longest run " << check.max_steps_seen << " steps (limit " << kAuctionMaxSteps
    << "), " << check.bids << " accepted bids, " << check.failwiths << " FAILWITHs caught, "
    << check.problems.count << " problems" << check.problems.summary() << "; one-bidder cross-check: "
    << er.states << " states, " << er.terminal << " terminals, depth " << er.max_depth << ", " << hit.size()
    << " distinct run endings, " << (cross.count + one_check.problems.count) << " problems" << cross.summary()
    << one_check.problems.summary();
  report(7, "auction end to end", check.problems.none() && one_check.problems.none() && cross.none() &&
                                      check.failwiths > 0 && check.bids > 0,
         d.str());
}

// --- 8: casts -----------------------------------------------------------------------------

Ty random_storable(std::mt19937_64& rng, int depth) {
  const int shapes = depth > 0 ? 9 : 5;
  switch (rng() % shapes) {
    case 0: return Ty::unit();
    case 1: return Ty::boolean();
    case 2: return Ty::integer();
    case 3: return Ty::tz();
    case 4: return Ty::addr();
    case 5: return Ty::pair(random_storable(rng, depth - 1), random_storable(rng, depth - 1));
    case 6: return Ty::sum(random_storable(rng, depth - 1), random_storable(rng, depth - 1));
    case 7: return Ty::option(random_storable(rng, depth - 1));
    default: return Ty::list(random_storable(rng, depth - 1));
  }
}

/// A random script: usually well-formed for its stub, sometimes not.
std::string random_script(std::mt19937_64& rng) {
  Ty p = random_storable(rng, 2);
  Ty s = random_storable(rng, 2);
  switch (rng() % 6) {
    case 0: return make_script(p, p, "identity");
    case 1: return make_script(p, s, "keep");
    case 2: return make_script(Ty::integer(), Ty::integer(), "counter");
    case 3: return auction_script();
    case 4: return make_script(p, s, rng() % 2 ? "identity" : "counter");  // often rejected by the stub
    default: return make_script(p, s, "unregistered");
  }
}

void criterion_casts() {
  std::mt19937_64 rng(20240501);
  Problems p;
  std::size_t yes = 0, no = 0, upcasts = 0;
  for (std::size_t i = 0; i < kCastCases; ++i) {
    Blockchain chain;
    chain.managers["puk_a"] = ManagerEntry{10, {}};
    chain.time = 1;
    const std::string code = random_script(rng);
    const std::int64_t t = static_cast<std::int64_t>(rng() % 1000);
    const std::string puh = gen_contract_hash(code, t);
    const bool registered = rng() % 8 != 0;
    if (registered) chain.contractors[puh] = ContractorEntry{code, t, 0, ""};

    // Target types: the declared pair half of the time.
    Ty tp = random_storable(rng, 2), ts = random_storable(rng, 2);
    std::optional<Ty> declared;
    try {
      declared = type_code(code);
    } catch (const CodeTypeError&) {
    }
    if (rng() % 2 == 0) {
      try {
        const CodeRef ref = parse_code_header(code);
        tp = ref.param_ty;
        ts = ref.storage_ty;
      } catch (const CodeTypeError&) {
      }
    }
    const Ty target = Ty::contract(tp, ts);
    const bool expect = registered && declared && *declared == Ty::pair(tp, ts);

    const CastResult direct = perform_downcast(chain, ex::puh(puh), Ty::puh(), target);
    if (direct.ok != expect) p.add("case " + std::to_string(i) + ": downcast outcome differs from typing");
    if (direct.ok && !(direct.value->kind == ExprKind::Puh && direct.value->text == puh)) {
      p.add("case " + std::to_string(i) + ": downcast changed the value");
    }
    if (!direct.ok && direct.value->error != ErrorKind::Prg) p.add("case " + std::to_string(i) + ": not errP");
    (expect ? yes : no) += 1;

    // The same downcast as a scheduled program step.
    Config cfg;
    cfg.chain = chain;
    Node n;
    n.accounts = {Account{"pak_a", "puk_a"}};
    n.programs = {ex::cast(ex::puh(puh), Ty::puh(), target)};
    cfg.nodes = {n};
    auto en = enabled_transitions(cfg);
    if (en.size() != 1 || en[0].kind != TransitionKind::Cast) {
      p.add("case " + std::to_string(i) + ": downcast is not a Cast transition");
    } else {
      StepEffect fx;
      const Config after = apply(cfg, en[0], &fx);
      const ExprPtr& prog = after.nodes[0].programs[0];
      const bool ok = prog->kind == ExprKind::Puh;
      if (ok != expect) p.add("case " + std::to_string(i) + ": scheduled downcast differs");
      if (!ok && !(prog->kind == ExprKind::Raise && prog->kids[0]->error == ErrorKind::Prg)) {
        p.add("case " + std::to_string(i) + ": scheduled downcast did not raise errP");
      }
      if (!(after.chain == cfg.chain)) p.add("case " + std::to_string(i) + ": downcast changed the chain");
    }

    // Upcasts are erased by a pure step, whatever the chain holds.
    const std::vector<std::pair<ExprPtr, std::pair<Ty, Ty>>> ups = {
        {ex::puh(puh), {target, Ty::puh()}},
        {ex::puh(puh), {Ty::puh(), Ty::addr()}},
        {ex::puk(rng() % 2 ? "puk_a" : "puk_unknown"), {Ty::puk(), Ty::addr()}},
    };
    for (const auto& [v, tys] : ups) {
      ++upcasts;
      const ExprPtr e = ex::cast(v, tys.first, tys.second);
      const Decomposition d = decompose(e);
      const PureStep s = step_pure(e);
      if (d.kind != RedexKind::Pure || s.outcome != PureOutcome::Stepped || !expr_equal(s.next, v)) {
        p.add("case " + std::to_string(i) + ": upcast is not the identity");
      }
      Config up = cfg;
      up.chain.contractors.clear();  // nothing to consult
      up.nodes[0].programs = {e};
      auto upe = enabled_transitions(up);
      if (upe.size() != 1 || upe[0].kind != TransitionKind::NodeEval) {
        p.add("case " + std::to_string(i) + ": upcast is not a plain evaluation step");
      } else if (!(apply(up, upe[0]).chain == up.chain)) {
        p.add("case " + std::to_string(i) + ": upcast touched the chain");
      }
    }
  }
  std::ostringstream d;
  d << kCastCases << " random contractors: " << yes << " Contract-Yes, " << no << " Contract-No, " << upcasts
    << " upcasts, " << p.count << " violations" << p.summary();
  report(8, "cast semantics", p.none() && yes > 0 && no > 0, d.str());
}

// --- 9: determinism and replay --------------------------------------------------------------

void criterion_replay() {
  Problems p;
  std::size_t traces = 0;
  for (const auto& name : bundled_names()) {
    const Scenario s = load_scenario(bundled_scenario(name));
    std::vector<std::string> parallel(kReplaySeeds);
    // Independent runs on OpenMP threads must give the same bytes as the
    // sequential ones below.
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < kReplaySeeds; ++i) {
      RunOptions o;
      o.seed = i + 1;
      o.policy = cycled(o.seed);
      o.max_steps = s.max_steps;
      parallel[i] = trace_to_jsonl(run(s.config, o), o, s.name);
    }
    for (std::size_t i = 0; i < kReplaySeeds; ++i) {
      RunOptions o;
      o.seed = i + 1;
      o.policy = cycled(o.seed);
      o.max_steps = s.max_steps;
      const RunResult a = run(s.config, o);
      const std::string ta = trace_to_jsonl(a, o, s.name);
      const std::string tag = name + " seed " + std::to_string(o.seed);
      if (ta != trace_to_jsonl(run(s.config, o), o, s.name)) p.add(tag + ": traces differ between runs");
      if (ta != parallel[i]) p.add(tag + ": trace differs from the threaded run");
      const ReplayResult rr = replay(s.config, ta);
      if (!rr.ok) p.add(tag + ": replay failed: " + rr.message);
      if (rr.final_digest != a.final_digest) p.add(tag + ": replay digest differs");
      // Round-trip through the snapshot format keeps the digest too.
      const Scenario back = load_scenario(serialize_scenario(s));
      if (config_digest(back.config) != config_digest(s.config)) p.add(tag + ": snapshot changes the digest");
      ++traces;
    }
  }
  std::ostringstream d;
  d << traces << " traces (" << kReplaySeeds << " seeds x " << bundled_names().size()
    << " scenarios): byte-identical reruns, threaded runs and replay digests, " << p.count << " mismatches"
    << p.summary();
  report(9, "determinism and replay", p.none(), d.str());
}

}  // namespace

int main() {
  std::vector<Scenario> scenarios;
  for (const auto& name : kSweepScenarios) scenarios.push_back(load_scenario(bundled_scenario(name)));
  const SweepOutcome sweep_outcome = run_sweep(scenarios);

  criterion_preservation(sweep_outcome);
  criterion_progress();
  criterion_chain_steps(sweep_outcome);
  criterion_references(sweep_outcome);
  criterion_consistency(sweep_outcome);
  criterion_lifecycle();
  criterion_auction();
  criterion_casts();
  criterion_replay();

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
