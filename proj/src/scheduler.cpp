#include "chainsem/scheduler.hpp"

#include <algorithm>
#include <array>
#include <sstream>

namespace chainsem {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 8> kKindNames = {
    "node-eval",    "node-inject",   "node-reject",   "query",
    "cast",         "block-accept",  "block-timeout", "block-originate-accept",
};

constexpr std::array<std::string_view, 3> kPolicyNames = {"uniform", "accept-eager",
                                                          "timeout-forcing"};

bool program_kind(TransitionKind k) {
  return k == TransitionKind::NodeEval || k == TransitionKind::NodeInject ||
         k == TransitionKind::NodeReject || k == TransitionKind::Query ||
         k == TransitionKind::Cast;
}

std::optional<Ty> query_result_type(const Blockchain& chain, QueryKind kind, const ExprPtr& arg) {
  try {
    switch (kind) {
      case QueryKind::GetBalance: return Ty::tz();
      case QueryKind::GetStatus: return Ty::status();
      case QueryKind::GetStorage: {
        auto it = chain.contractors.find(arg->text);
        if (it == chain.contractors.end()) return std::nullopt;
        return parse_code_header(it->second.code).storage_ty;
      }
      case QueryKind::GetContract: {
        auto it = chain.pool.find(arg->text);
        if (it == chain.pool.end() || it->second.op.kind != OpKind::Originate) return std::nullopt;
        const CodeRef ref = parse_code_header(it->second.op.code);
        return Ty::contract(ref.param_ty, ref.storage_ty);
      }
    }
  } catch (const CodeTypeError&) {
  }
  return std::nullopt;
}

const ExprPtr& program_at(const Config& cfg, const TransitionId& t) {
  if (t.node < 0 || static_cast<std::size_t>(t.node) >= cfg.nodes.size()) {
    throw StaleTransition("no node " + std::to_string(t.node));
  }
  const Node& node = cfg.nodes[static_cast<std::size_t>(t.node)];
  if (t.program < 0 || static_cast<std::size_t>(t.program) >= node.programs.size()) {
    throw StaleTransition("no program " + std::to_string(t.program) + " on node " +
                          std::to_string(t.node));
  }
  return node.programs[static_cast<std::size_t>(t.program)];
}

}  // namespace

std::string_view transition_kind_name(TransitionKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<TransitionKind> transition_kind_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<TransitionKind>(i);
  }
  return std::nullopt;
}

bool TransitionId::is_block() const { return !program_kind(kind); }

json transition_to_json(const TransitionId& t) {
  json j = {{"kind", transition_kind_name(t.kind)}};
  if (t.is_block()) {
    j["oph"] = t.oph;
  } else {
    j["node"] = t.node;
    j["program"] = t.program;
  }
  return j;
}

TransitionId transition_from_json(const json& j) {
  TransitionId t;
  auto kind = transition_kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown transition kind " + j.at("kind").dump());
  t.kind = *kind;
  if (t.is_block()) {
    t.oph = j.at("oph").get<std::string>();
  } else {
    t.node = j.at("node").get<int>();
    t.program = j.at("program").get<int>();
  }
  return t;
}

std::string to_string(const TransitionId& t) {
  std::string out(transition_kind_name(t.kind));
  if (t.is_block()) return out + " " + t.oph;
  return out + " n" + std::to_string(t.node) + ".p" + std::to_string(t.program);
}

std::vector<TransitionId> enabled_transitions(const Config& cfg) {
  std::vector<TransitionId> out;
  for (std::size_t n = 0; n < cfg.nodes.size(); ++n) {
    const Node& node = cfg.nodes[n];
    for (std::size_t p = 0; p < node.programs.size(); ++p) {
      TransitionId t;
      t.node = static_cast<int>(n);
      t.program = static_cast<int>(p);
      const Decomposition d = decompose(node.programs[p]);
      switch (d.kind) {
        case RedexKind::Pure:
          t.kind = TransitionKind::NodeEval;
          break;
        case RedexKind::BlockchainOp:
          t.kind = try_inject(node, cfg.chain, *d.redex).accepted ? TransitionKind::NodeInject
                                                                   : TransitionKind::NodeReject;
          break;
        case RedexKind::Query:
          if (run_query(cfg.chain, d.redex->query, d.redex->kids[0]).kind ==
              QueryOutcome::Blocked) {
            continue;
          }
          t.kind = TransitionKind::Query;
          break;
        case RedexKind::DowncastProbe:
          t.kind = TransitionKind::Cast;
          break;
        default:
          continue;
      }
      out.push_back(std::move(t));
    }
  }
  for (const auto& [oph, e] : cfg.chain.pool) {
    if (e.status.kind != StatusKind::Pending) continue;
    TransitionId t;
    t.oph = oph;
    if (accept_enabled(cfg.chain, oph)) {
      t.kind = e.op.kind == OpKind::Transfer ? TransitionKind::BlockAccept
                                             : TransitionKind::BlockOriginateAccept;
    } else {
      t.kind = TransitionKind::BlockTimeout;
    }
    out.push_back(std::move(t));
  }
  return out;
}

json StepEffect::to_json() const {
  json j = json::object();
  if (!oph.empty()) j["oph"] = oph;
  if (!dropped.empty()) j["dropped"] = dropped;
  if (raised) j["raised"] = chainsem::to_string(raised);
  if (result) j["result"] = chainsem::to_string(result);
  if (!status.empty()) j["status"] = status;
  if (!block.credits.empty()) j["credits"] = block.credits;
  if (block.backtracked) {
    // The call passed its dry run at injection but failed when the block ran it.
    j["backtracked"] = true;
    j["divergence"] = true;
    j["message"] = block.message;
  }
  if (!block.originated.empty()) j["originated"] = block.originated;
  return j;
}

Config apply(const Config& cfg, const TransitionId& t, StepEffect* effect) {
  StepEffect local;
  StepEffect& fx = effect ? *effect : local;
  fx = StepEffect{};
  Config next = cfg;

  if (t.is_block()) {
    auto it = cfg.chain.pool.find(t.oph);
    if (it == cfg.chain.pool.end() || it->second.status.kind != StatusKind::Pending) {
      throw StaleTransition(to_string(t) + ": no such pending operation");
    }
    const bool accept = accept_enabled(cfg.chain, t.oph);
    const bool originate = it->second.op.kind == OpKind::Originate;
    switch (t.kind) {
      case TransitionKind::BlockAccept:
        if (!accept || originate) throw StaleTransition(to_string(t) + " is not enabled");
        next.chain = block_accept(cfg.chain, t.oph, &fx.block);
        break;
      case TransitionKind::BlockOriginateAccept:
        if (!accept || !originate) throw StaleTransition(to_string(t) + " is not enabled");
        next.chain = block_originate_accept(cfg.chain, t.oph, &fx.block);
        break;
      case TransitionKind::BlockTimeout:
        if (accept) throw StaleTransition(to_string(t) + " is not enabled");
        next.chain = block_timeout(cfg.chain, t.oph);
        break;
      default:
        throw StaleTransition("bad block transition");
    }
    fx.status = status_name(next.chain.pool.at(t.oph).status);
    return next;
  }

  const ExprPtr& program = program_at(cfg, t);
  const Node& node = cfg.nodes[static_cast<std::size_t>(t.node)];
  const Decomposition d = decompose(program);
  ExprPtr replacement;
  auto stale = [&] { return StaleTransition(to_string(t) + " is not enabled"); };

  switch (t.kind) {
    case TransitionKind::NodeEval:
      if (d.kind != RedexKind::Pure) throw stale();
      replacement = contract_pure_redex(d);
      break;
    case TransitionKind::NodeInject:
    case TransitionKind::NodeReject: {
      if (d.kind != RedexKind::BlockchainOp) throw stale();
      InjectOutcome out = try_inject(node, cfg.chain, *d.redex);
      if (out.accepted != (t.kind == TransitionKind::NodeInject)) throw stale();
      if (out.accepted) {
        next.chain = std::move(out.chain);
        fx.oph = out.oph;
        fx.dropped = std::move(out.dropped);
        fx.status = "pending";
        replacement = ex::oph(out.oph);
      } else {
        fx.raised = out.exception;
        replacement = ex::raise(out.exception);
      }
      break;
    }
    case TransitionKind::Query: {
      if (d.kind != RedexKind::Query) throw stale();
      const ExprPtr& arg = d.redex->kids[0];
      QueryResult r = run_query(cfg.chain, d.redex->query, arg);
      if (r.kind == QueryOutcome::Blocked) throw stale();
      if (r.kind == QueryOutcome::Raise) {
        fx.raised = r.value;
        replacement = ex::raise(r.value);
      } else {
        fx.result = r.value;
        fx.result_ty = query_result_type(cfg.chain, d.redex->query, arg);
        replacement = r.value;
      }
      break;
    }
    case TransitionKind::Cast: {
      if (d.kind != RedexKind::DowncastProbe) throw stale();
      CastResult r = perform_downcast(cfg.chain, d.redex->kids[0], d.redex->ty, d.redex->ty2);
      if (r.ok) {
        fx.result = r.value;
        fx.result_ty = d.redex->ty2;
        replacement = r.value;
      } else {
        fx.raised = r.value;
        replacement = ex::raise(r.value);
      }
      break;
    }
    default:
      throw stale();
  }
  next.nodes[static_cast<std::size_t>(t.node)].programs[static_cast<std::size_t>(t.program)] =
      plug(program, d.path, replacement);
  return next;
}

std::string_view policy_name(Policy p) { return kPolicyNames[static_cast<std::size_t>(p)]; }

std::optional<Policy> policy_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kPolicyNames.size(); ++i) {
    if (kPolicyNames[i] == name) return static_cast<Policy>(i);
  }
  return std::nullopt;
}

std::size_t choose_transition(const Config& cfg, const std::vector<TransitionId>& enabled,
                              Policy policy, std::mt19937_64& rng) {
  auto pick = [&](const std::vector<std::size_t>& among) { return among[rng() % among.size()]; };
  std::vector<std::size_t> all(enabled.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  switch (policy) {
    case Policy::Uniform:
      return pick(all);
    case Policy::AcceptEager: {
      std::vector<std::size_t> blocks;
      for (std::size_t i = 0; i < enabled.size(); ++i) {
        if (enabled[i].is_block()) blocks.push_back(i);
      }
      if (!blocks.empty() && rng() % 10 < 9) return pick(blocks);
      return pick(all);
    }
    case Policy::TimeoutForcing: {
      std::vector<std::size_t> timeouts;
      for (std::size_t i = 0; i < enabled.size(); ++i) {
        if (enabled[i].kind == TransitionKind::BlockTimeout) timeouts.push_back(i);
      }
      if (!timeouts.empty()) return pick(timeouts);
      // Starve the oldest pending operation so that its window runs out.
      const std::string* oldest = nullptr;
      std::int64_t oldest_t = 0;
      for (const auto& [oph, e] : cfg.chain.pool) {
        if (e.status.kind != StatusKind::Pending) continue;
        if (!oldest || e.t < oldest_t) {
          oldest = &oph;
          oldest_t = e.t;
        }
      }
      // Starving only helps while some other acceptance can advance time.
      bool other_accept = false;
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < enabled.size(); ++i) {
        if (oldest && enabled[i].is_block() && enabled[i].oph == *oldest) continue;
        if (enabled[i].is_block()) other_accept = true;
        rest.push_back(i);
      }
      return pick(other_accept ? rest : all);
    }
  }
  return pick(all);
}

std::string config_digest(const Config& cfg) {
  const Blockchain& b = cfg.chain;
  std::ostringstream s;
  s << "t" << b.time << " b" << b.burnt << " f" << b.params.min_fee << " c"
    << (b.params.pool_cap ? static_cast<long long>(*b.params.pool_cap) : -1) << '\n';
  for (const auto& [oph, e] : b.pool) {
    s << oph << ' ' << operation_key(e.op) << ' ' << e.t << ' ' << status_name(e.status) << ' '
      << e.backtracked << '\n';
  }
  for (const auto& [puk, m] : b.managers) {
    s << puk << ' ' << m.bal << ' ' << m.cnt.n << ' ' << m.cnt.busy << '\n';
  }
  for (const auto& [puh, c] : b.contractors) {
    s << puh << ' ' << c.code.size() << ':' << c.code << ' ' << c.t << ' ' << c.bal << ' '
      << c.storage << '\n';
  }
  for (const auto& node : cfg.nodes) {
    s << "node";
    for (const auto& a : node.accounts) s << ' ' << a.puk;
    s << '\n';
    for (const auto& p : node.programs) s << to_string(p) << '\n';
  }
  return digest_hex(s.str());
}

// --- monitor ----------------------------------------------------------------------------

Monitor::Monitor(const Config& initial, CheckSet checks)
    : checks_(checks), delta_(delta_of(initial.chain)) {}

Monitor::Monitor(ContractTyEnv delta, CheckSet checks) : checks_(checks), delta_(std::move(delta)) {}

void Monitor::record(Check c, bool failed) {
  const std::string name(check_name(c));
  stats_.evaluated[name] += 1;
  if (failed) stats_.failed[name] += 1;
}

void Monitor::fail(std::vector<Violation>& out, std::string check, std::size_t index,
                   std::string msg) {
  out.push_back(Violation{std::move(check), index, std::move(msg)});
}

void Monitor::start(const Config& cfg, std::vector<Violation>& out) {
  auto run_check = [&](Check c, const std::optional<std::string>& err) {
    record(c, err.has_value());
    if (err) fail(out, std::string(check_name(c)), 0, *err);
  };
  if (checks_.has(Check::WellFormed)) run_check(Check::WellFormed, check_config(cfg));
  if (checks_.has(Check::References)) run_check(Check::References, check_references(cfg));
  if (checks_.has(Check::Consistency)) {
    run_check(Check::Consistency, check_consistency(cfg.chain));
  }
  if (checks_.has(Check::Preservation)) {
    run_check(Check::Preservation, config_type_error(delta_, cfg, TypingMode::Runtime));
  }
}

void Monitor::step(std::size_t index, const Config& before, const TransitionId& t,
                   const StepEffect& effect, const Config& after, std::vector<Violation>& out) {
  auto run_check = [&](Check c, const std::optional<std::string>& err) {
    record(c, err.has_value());
    if (err) fail(out, std::string(check_name(c)), index, to_string(t) + ": " + *err);
  };

  if (!effect.block.originated.empty()) {
    const ContractorEntry& c = after.chain.contractors.at(effect.block.originated);
    try {
      delta_[effect.block.originated] = type_code(c.code);
    } catch (const CodeTypeError& err) {
      fail(out, "preservation", index, "originated code does not type: " + std::string(err.what()));
    }
  }

  if (checks_.has(Check::References)) run_check(Check::References, check_references(after));

  if (checks_.has(Check::ChainSteps)) {
    const auto items =
        check_chain_step(before.chain, after.chain, t.is_block() ? &effect.block : nullptr);
    record(Check::ChainSteps, !items.empty());
    for (const auto& [item, msg] : items) {
      const std::string name = "chain-steps.item" + std::to_string(item);
      stats_.failed[name] += 1;
      fail(out, name, index, to_string(t) + ": " + msg);
    }
  }

  const bool chain_changed = t.is_block() || t.kind == TransitionKind::NodeInject;
  if (checks_.has(Check::Consistency) && chain_changed) {
    run_check(Check::Consistency, check_consistency(after.chain));
  }

  if (checks_.has(Check::Preservation)) {
    run_check(Check::Preservation, config_type_error(delta_, after, TypingMode::Runtime));
  }

  if (checks_.has(Check::Canonical) && effect.result) {
    std::optional<std::string> err;
    if (!effect.result_ty) {
      err = "no type for result " + to_string(effect.result);
    } else {
      std::vector<std::string> accounts;
      for (const auto& a : after.nodes[static_cast<std::size_t>(t.node)].accounts) {
        accounts.push_back(a.puk);
      }
      if (!canonical_form_ok(effect.result, *effect.result_ty, accounts, after.chain)) {
        err = to_string(effect.result) + " is not a canonical " + effect.result_ty->to_string();
      }
    }
    run_check(Check::Canonical, err);
  }

  if (checks_.has(Check::Conservation)) {
    const std::int64_t a = token_total(before.chain);
    const std::int64_t b = token_total(after.chain);
    std::optional<std::string> err;
    if (a != b) err = "token total moved from " + std::to_string(a) + " to " + std::to_string(b);
    run_check(Check::Conservation, err);
  }
}

void Monitor::state(std::size_t index, const Config& cfg, std::size_t enabled_count,
                    std::vector<Violation>& out) {
  if (!checks_.has(Check::Progress)) return;
  auto err = check_progress(cfg, enabled_count);
  record(Check::Progress, err.has_value());
  if (err) fail(out, "progress", index, *err);
}

void Monitor::finish(std::size_t index, const Config& cfg, std::vector<Violation>& out) {
  if (!checks_.has(Check::WellFormed)) return;
  auto err = check_config(cfg);
  record(Check::WellFormed, err.has_value());
  if (err) fail(out, "well-formed", index, *err);
}

// --- runs -------------------------------------------------------------------------------

RunResult run(const Config& cfg, const RunOptions& options) {
  RunResult result;
  Monitor monitor(cfg, options.checks);
  std::mt19937_64 rng(options.seed);
  monitor.start(cfg, result.violations);

  Config cur = cfg;
  std::string digest = options.record ? config_digest(cur) : std::string();
  std::vector<TransitionId> enabled;
  for (;;) {
    enabled = enabled_transitions(cur);
    monitor.state(result.steps, cur, enabled.size(), result.violations);
    if (options.stop_on_violation && !result.violations.empty()) break;
    if (enabled.empty()) {
      result.terminal = true;
      break;
    }
    if (result.steps >= options.max_steps) break;

    const std::size_t pick = choose_transition(cur, enabled, options.policy, rng);
    StepEffect fx;
    Config next = apply(cur, enabled[pick], &fx);
    result.steps += 1;
    monitor.step(result.steps, cur, enabled[pick], fx, next, result.violations);
    if (options.record) {
      TraceEvent ev;
      ev.step = result.steps;
      ev.transition = enabled[pick];
      ev.pre = digest;
      digest = config_digest(next);
      ev.post = digest;
      ev.payload = fx.to_json();
      result.events.push_back(std::move(ev));
    }
    cur = std::move(next);
  }

  if (result.violations.empty() || !options.stop_on_violation) {
    monitor.finish(result.steps, cur, result.violations);
  }
  result.stats = monitor.stats();
  result.final_digest = options.record ? digest : config_digest(cur);
  result.final = std::move(cur);
  return result;
}

std::string trace_to_jsonl(const RunResult& result, const RunOptions& options,
                           const std::string& scenario_name) {
  std::string out;
  json header = {{"type", "header"},
                 {"scenario", scenario_name},
                 {"seed", options.seed},
                 {"policy", policy_name(options.policy)},
                 {"max_steps", options.max_steps},
                 {"asserts", options.checks.to_string()}};
  if (!result.events.empty()) header["initial"] = result.events.front().pre;
  out += header.dump() + "\n";
  for (const auto& ev : result.events) {
    json line = {{"type", "step"},
                 {"step", ev.step},
                 {"transition", transition_to_json(ev.transition)},
                 {"pre", ev.pre},
                 {"post", ev.post},
                 {"effect", ev.payload}};
    out += line.dump() + "\n";
  }
  json violations = json::array();
  for (const auto& v : result.violations) {
    violations.push_back({{"check", v.check}, {"step", v.step}, {"message", v.message}});
  }
  json final = {{"type", "final"},
                {"steps", result.steps},
                {"terminal", result.terminal},
                {"digest", result.final_digest},
                {"violations", violations}};
  out += final.dump() + "\n";
  return out;
}

ReplayResult replay(const Config& cfg, const std::string& jsonl) {
  ReplayResult r;
  Config cur = cfg;
  std::string digest = config_digest(cur);
  std::istringstream in(jsonl);
  std::string line;
  std::size_t lineno = 0;
  bool saw_final = false;
  auto fail = [&](std::string msg) {
    r.ok = false;
    r.message = "line " + std::to_string(lineno) + ": " + msg;
    r.final_digest = digest;
    return r;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      return fail(std::string("bad JSON: ") + e.what());
    }
    const std::string type = j.value("type", "");
    if (type == "header") {
      if (j.contains("initial") && j["initial"].get<std::string>() != digest) {
        return fail("initial digest differs from the scenario");
      }
    } else if (type == "step") {
      if (j.at("pre").get<std::string>() != digest) return fail("pre-state digest differs");
      TransitionId t;
      try {
        t = transition_from_json(j.at("transition"));
        cur = apply(cur, t);
      } catch (const std::exception& e) {
        return fail(std::string("cannot apply transition: ") + e.what());
      }
      digest = config_digest(cur);
      if (j.at("post").get<std::string>() != digest) return fail("post-state digest differs");
      r.steps += 1;
    } else if (type == "final") {
      saw_final = true;
      if (j.at("digest").get<std::string>() != digest) return fail("final digest differs");
    } else {
      return fail("unknown line type '" + type + "'");
    }
  }
  if (!saw_final) return fail("trace has no final line");
  r.ok = true;
  r.final_digest = digest;
  return r;
}

}  // namespace chainsem
