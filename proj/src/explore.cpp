#include "chainsem/explore.hpp"

#include <omp.h>

#include <algorithm>
#include <deque>
#include <exception>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace chainsem {

using nlohmann::json;

namespace {

bool is_hex(char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); }

constexpr std::size_t kHashHex = 32;

/// Rewrites every "oph_<hex>" / "puh_<hex>" token found in `names`.
std::string replace_hashes(const std::string& text,
                           const std::unordered_map<std::string, std::string>& names) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const bool prefix = i + 4 + kHashHex <= text.size() && text[i + 3] == '_' &&
                        (text.compare(i, 4, "oph_") == 0 || text.compare(i, 4, "puh_") == 0);
    if (prefix) {
      const std::string token = text.substr(i, 4 + kHashHex);
      if (std::all_of(token.begin() + 4, token.end(), is_hex)) {
        auto it = names.find(token);
        if (it != names.end()) {
          out += it->second;
          i += token.size();
          continue;
        }
      }
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

std::string status_kind(const Status& s) {
  switch (s.kind) {
    case StatusKind::Pending: return "pending";
    case StatusKind::Included: return "included";
    case StatusKind::Timeout: return "timeout";
  }
  return "?";
}

std::string leaf_partition(const Blockchain& b) {
  if (b.pool.empty()) return "absent";
  std::vector<std::string> kinds;
  for (const auto& [oph, e] : b.pool) kinds.push_back(status_kind(e.status));
  std::sort(kinds.begin(), kinds.end());
  std::string out;
  for (const auto& k : kinds) out += (out.empty() ? "" : ",") + k;
  return out;
}

struct Item {
  Config cfg;
  ContractTyEnv delta;
  std::size_t depth = 0;
};

struct Child {
  Item item;
  std::string key;
};

struct Expansion {
  std::size_t enabled = 0;
  bool deadlock = false;
  bool all_unit = false;
  std::string partition;
  std::set<std::string> statuses;
  std::vector<Child> children;
  std::vector<Violation> violations;
  CheckStats stats;
};

Expansion expand(const Item& item, const ExploreOptions& options) {
  Expansion x;
  const auto enabled = enabled_transitions(item.cfg);
  x.enabled = enabled.size();
  Monitor state_monitor(item.delta, options.checks);
  state_monitor.state(item.depth, item.cfg, enabled.size(), x.violations);
  x.stats.merge(state_monitor.stats());
  if (item.cfg.chain.pool.empty()) x.statuses.insert("absent");
  for (const auto& [oph, e] : item.cfg.chain.pool) x.statuses.insert(status_kind(e.status));
  if (enabled.empty()) {
    x.deadlock = check_progress(item.cfg, 0).has_value();
    x.all_unit = all_programs_unit(item.cfg);
  }
  if (enabled.empty() || item.depth >= options.depth) {
    x.partition = leaf_partition(item.cfg.chain);
    return x;
  }
  for (const auto& t : enabled) {
    StepEffect fx;
    Child child;
    child.item.cfg = apply(item.cfg, t, &fx);
    child.item.depth = item.depth + 1;
    Monitor m(item.delta, options.checks);
    m.step(item.depth + 1, item.cfg, t, fx, child.item.cfg, x.violations);
    x.stats.merge(m.stats());
    child.item.delta = m.delta();
    child.key = canonical_key(child.item.cfg);
    x.children.push_back(std::move(child));
  }
  return x;
}

class Explorer {
 public:
  Explorer(const Config& cfg, const ExploreOptions& options) : options_(options) {
    Monitor m(cfg, options.checks);
    m.start(cfg, report_.violations);
    report_.stats.merge(m.stats());
    visited_.insert(canonical_key(cfg));
    report_.states = 1;
  }

  /// Folds one expansion into the report; returns the children that are new.
  std::vector<Item> merge(const Item& parent, Expansion&& x) {
    report_.max_depth = std::max(report_.max_depth, parent.depth);
    report_.stats.merge(x.stats);
    for (auto& v : x.violations) report_.violations.push_back(std::move(v));
    report_.reachable_statuses.insert(x.statuses.begin(), x.statuses.end());
    if (x.enabled == 0) {
      report_.terminal += 1;
      if (x.all_unit) report_.terminal_all_unit += 1;
      if (x.deadlock) report_.deadlocks += 1;
      const std::string key = canonical_key(parent.cfg);
      report_.terminal_keys.insert(key);
      if (options_.keep_terminals) report_.terminals.push_back(parent.cfg);
    } else if (parent.depth >= options_.depth) {
      report_.frontier += 1;
    }
    if (!x.partition.empty()) report_.leaf_partitions[x.partition] += 1;

    std::vector<Item> fresh;
    for (auto& child : x.children) {
      report_.transitions += 1;
      if (visited_.count(child.key)) continue;
      if (report_.states >= options_.budget) {
        report_.budget_exhausted = true;
        continue;
      }
      visited_.insert(child.key);
      report_.states += 1;
      fresh.push_back(std::move(child.item));
    }
    return fresh;
  }

  ExploreReport finish() {
    report_.complete = report_.frontier == 0 && !report_.budget_exhausted;
    return std::move(report_);
  }

 private:
  const ExploreOptions& options_;
  ExploreReport report_;
  std::unordered_set<std::string> visited_;
};

}  // namespace

std::string canonical_text(const Config& cfg) {
  const Blockchain& b = cfg.chain;
  std::vector<std::tuple<std::int64_t, std::string, std::string>> ops;
  for (const auto& [oph, e] : b.pool) ops.emplace_back(e.t, operation_key(e.op), oph);
  std::sort(ops.begin(), ops.end());
  std::vector<std::tuple<std::int64_t, std::string, std::string>> contracts;
  for (const auto& [puh, c] : b.contractors) contracts.emplace_back(c.t, c.code, puh);
  std::sort(contracts.begin(), contracts.end());

  std::unordered_map<std::string, std::string> names;
  for (std::size_t i = 0; i < ops.size(); ++i) names[std::get<2>(ops[i])] = "#o" + std::to_string(i);
  for (std::size_t i = 0; i < contracts.size(); ++i) {
    names[std::get<2>(contracts[i])] = "#c" + std::to_string(i);
  }

  std::ostringstream s;
  s << "t" << b.time << " b" << b.burnt << '\n';
  for (const auto& [t, key, oph] : ops) {
    const PoolEntry& e = b.pool.at(oph);
    s << oph << ' ' << key << ' ' << t << ' ' << status_name(e.status) << ' ' << e.backtracked
      << '\n';
  }
  for (const auto& [puk, m] : b.managers) {
    s << puk << ' ' << m.bal << ' ' << m.cnt.n << ' ' << m.cnt.busy << '\n';
  }
  for (const auto& [t, code, puh] : contracts) {
    const ContractorEntry& c = b.contractors.at(puh);
    s << puh << ' ' << code << ' ' << t << ' ' << c.bal << ' ' << c.storage << '\n';
  }
  for (const auto& node : cfg.nodes) {
    s << "node";
    for (const auto& a : node.accounts) s << ' ' << a.puk;
    s << '\n';
    for (const auto& p : node.programs) s << to_string(p) << '\n';
  }
  return replace_hashes(s.str(), names);
}

std::string canonical_key(const Config& cfg) { return digest_hex(canonical_text(cfg)); }

json ExploreReport::to_json() const {
  json violations_json = json::array();
  for (const auto& v : violations) {
    violations_json.push_back({{"check", v.check}, {"depth", v.step}, {"message", v.message}});
  }
  return json{{"states", states},
              {"transitions", transitions},
              {"terminal", terminal},
              {"terminal_all_unit", terminal_all_unit},
              {"deadlocks", deadlocks},
              {"frontier", frontier},
              {"max_depth", max_depth},
              {"budget_exhausted", budget_exhausted},
              {"complete", complete},
              {"reachable_statuses", reachable_statuses},
              {"leaf_partitions", leaf_partitions},
              {"violations", violations_json}};
}

ExploreReport explore(const Config& cfg, const ExploreOptions& options) {
  Explorer explorer(cfg, options);
  std::vector<Item> level;
  level.push_back(Item{cfg, delta_of(cfg.chain), 0});
  while (!level.empty()) {
    std::vector<Expansion> expansions(level.size());
    std::exception_ptr error;
    const auto n = static_cast<std::ptrdiff_t>(level.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        expansions[static_cast<std::size_t>(i)] = expand(level[static_cast<std::size_t>(i)], options);
      } catch (...) {
#pragma omp critical(explore_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
    std::vector<Item> next;
    for (std::size_t i = 0; i < level.size(); ++i) {
      auto fresh = explorer.merge(level[i], std::move(expansions[i]));
      for (auto& f : fresh) next.push_back(std::move(f));
    }
    level = std::move(next);
  }
  return explorer.finish();
}

ExploreReport explore_serial(const Config& cfg, const ExploreOptions& options) {
  Explorer explorer(cfg, options);
  std::deque<Item> queue;
  queue.push_back(Item{cfg, delta_of(cfg.chain), 0});
  while (!queue.empty()) {
    Item item = std::move(queue.front());
    queue.pop_front();
    auto fresh = explorer.merge(item, expand(item, options));
    for (auto& f : fresh) queue.push_back(std::move(f));
  }
  return explorer.finish();
}

namespace {

struct JobOutcome {
  RunResult result;
  std::string error;
};

JobOutcome run_job(const SweepJob& job, CheckSet checks) {
  JobOutcome out;
  RunOptions opts;
  opts.seed = job.seed;
  opts.max_steps = job.max_steps;
  opts.policy = job.policy;
  opts.checks = checks;
  opts.record = false;
  try {
    out.result = run(*job.config, opts);
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  // Only the tallies are needed; drop the configuration early.
  out.result.final = Config{};
  return out;
}

void fold(SweepResult& total, const SweepJob& job, JobOutcome&& o) {
  total.runs += 1;
  total.steps += o.result.steps;
  if (o.result.terminal) total.terminal_runs += 1;
  total.stats.merge(o.result.stats);
  if (!o.error.empty()) {
    total.failures.push_back({job.scenario, job.seed, job.policy, {"exception", o.result.steps, o.error}});
  } else if (!o.result.violations.empty()) {
    total.failures.push_back({job.scenario, job.seed, job.policy, o.result.violations.front()});
  }
}

}  // namespace

SweepResult sweep(const std::vector<SweepJob>& jobs, CheckSet checks) {
  std::vector<JobOutcome> outcomes(jobs.size());
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    outcomes[static_cast<std::size_t>(i)] = run_job(jobs[static_cast<std::size_t>(i)], checks);
  }
  SweepResult total;
  for (std::size_t i = 0; i < jobs.size(); ++i) fold(total, jobs[i], std::move(outcomes[i]));
  return total;
}

SweepResult sweep_serial(const std::vector<SweepJob>& jobs, CheckSet checks) {
  SweepResult total;
  for (const auto& job : jobs) fold(total, job, run_job(job, checks));
  return total;
}

}  // namespace chainsem
