#include "chainsem/invariants.hpp"

#include <array>

namespace chainsem {

namespace {

constexpr std::array<std::string_view, kCheckCount> kCheckNames = {
    "references", "chain-steps", "consistency", "preservation",
    "progress",   "canonical",   "conservation", "well-formed",
};

}  // namespace

std::string_view check_name(Check c) { return kCheckNames[static_cast<std::size_t>(c)]; }

std::optional<Check> check_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kCheckNames.size(); ++i) {
    if (kCheckNames[i] == name) return static_cast<Check>(i);
  }
  return std::nullopt;
}

CheckSet CheckSet::all() {
  CheckSet s;
  s.on.fill(true);
  return s;
}

CheckSet CheckSet::none() { return CheckSet{}; }

CheckSet CheckSet::parse(std::string_view spec) {
  if (spec == "all") return all();
  if (spec == "none" || spec.empty()) return none();
  CheckSet s;
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    const auto item = spec.substr(0, comma);
    auto c = check_from_name(item);
    if (!c) throw std::invalid_argument("unknown check '" + std::string(item) + "'");
    s.enable(*c);
    if (comma == std::string_view::npos) break;
    spec.remove_prefix(comma + 1);
  }
  return s;
}

std::string CheckSet::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < kCheckCount; ++i) {
    if (!on[i]) continue;
    if (!out.empty()) out += ",";
    out += kCheckNames[i];
  }
  return out.empty() ? "none" : out;
}

std::optional<std::string> check_references(const Config& cfg) {
  std::optional<std::string> problem;
  for (std::size_t n = 0; n < cfg.nodes.size() && !problem; ++n) {
    for (const auto& program : cfg.nodes[n].programs) {
      for_each_hash_literal(program, [&](ExprKind kind, const std::string& text) {
        if (problem) return;
        const bool ok = kind == ExprKind::Oph   ? cfg.chain.pool.count(text) > 0
                        : kind == ExprKind::Puk ? cfg.chain.managers.count(text) > 0
                                                : cfg.chain.contractors.count(text) > 0;
        if (!ok) problem = "node " + std::to_string(n) + " refers to unknown " + text;
      });
      if (problem) break;
    }
  }
  return problem;
}

std::vector<std::pair<int, std::string>> check_chain_step(const Blockchain& before,
                                                          const Blockchain& after,
                                                          const BlockEffect* effect) {
  std::vector<std::pair<int, std::string>> out;
  auto bad = [&](int item, std::string msg) { out.emplace_back(item, std::move(msg)); };

  if (after.time < before.time) bad(1, "time went backwards");

  // Items 2-4: the pool grows, keys are hashes of their entry, statuses move
  // along pending -> included | timeout only.
  std::map<std::string, std::int64_t> debits;  // sender -> nt + fee of an accepted op
  int accepted = 0;
  for (const auto& [oph, e] : before.pool) {
    auto it = after.pool.find(oph);
    if (it == after.pool.end()) {
      bad(2, "pool entry " + oph + " disappeared");
      continue;
    }
    const PoolEntry& e2 = it->second;
    if (!(e2.op == e.op) || e2.t != e.t) bad(3, "pool entry " + oph + " changed its operation");
    if (e2.status == e.status) {
      if (e2.backtracked != e.backtracked) bad(4, "settled entry " + oph + " changed");
      continue;
    }
    if (e.status.kind != StatusKind::Pending) {
      bad(4, "entry " + oph + " left the terminal status " + status_name(e.status));
      continue;
    }
    if (e2.status.kind == StatusKind::Timeout) continue;
    ++accepted;
    if (e2.status.t != before.time) bad(4, "entry " + oph + " included at a time other than now");
    if (before.time - e.t > kAcceptWindow) bad(4, "entry " + oph + " included after its window");
    if (after.time != before.time + 1) bad(4, "acceptance did not advance time by one");
    debits[e.op.sender] += (e2.backtracked ? 0 : e.op.nt) + e.op.fee;
  }
  for (const auto& [oph, e2] : after.pool) {
    if (before.pool.count(oph)) continue;
    if (gen_op_hash(e2.op, e2.t) != oph) bad(3, "new pool key " + oph + " is not genOpHash(op, t)");
    if (e2.status.kind != StatusKind::Pending || e2.t != before.time) {
      bad(4, "new entry " + oph + " is not pending at the current time");
    }
  }
  if (accepted > 1) bad(4, "more than one operation accepted in one step");
  if (accepted == 0 && after.time != before.time) bad(4, "time changed without an acceptance");

  for (const auto& [oph, e2] : after.pool) {
    if (e2.status.kind == StatusKind::Pending) {
      auto m = after.managers.find(e2.op.sender);
      if (m == after.managers.end() || !m->second.cnt.busy) {
        bad(5, "pending entry " + oph + " but the sender's flag is clear");
      } else if (m->second.bal < e2.op.nt + e2.op.fee) {
        bad(5, "pending entry " + oph + " but the sender cannot cover nt + fee");
      }
    } else if (e2.status.kind == StatusKind::Included && e2.status.t >= after.time) {
      bad(5, "entry " + oph + " included at or after the current time");
    }
  }

  for (const auto& [puk, m] : before.managers) {
    auto it = after.managers.find(puk);
    if (it == after.managers.end()) {
      bad(6, "manager " + puk + " disappeared");
      continue;
    }
    const ManagerEntry& m2 = it->second;
    std::int64_t credit = 0;
    if (effect) {
      auto c = effect->credits.find(puk);
      if (c != effect->credits.end()) credit = c->second;
    }
    if (m.cnt.busy && !m2.cnt.busy) {
      if (m2.cnt.n != m.cnt.n && m2.cnt.n != m.cnt.n + 1) {
        bad(7, "counter of " + puk + " jumped from " + std::to_string(m.cnt.n) + " to " +
                   std::to_string(m2.cnt.n));
      }
    } else if (m2.cnt.n != m.cnt.n) {
      bad(7, "counter of " + puk + " changed without settling an operation");
    }
    if (m2.cnt.n == m.cnt.n && m2.bal != m.bal + credit) {
      bad(7, "balance of " + puk + " changed by " + std::to_string(m2.bal - m.bal) +
                 " with counter unchanged (credits " + std::to_string(credit) + ")");
    }
    if (m2.cnt.n == m.cnt.n + 1) {
      const std::int64_t debit = debits.count(puk) ? debits.at(puk) : 0;
      if (m2.bal != m.bal - debit + credit) {
        bad(7, "balance of " + puk + " is not bal - nt - fee after settlement");
      }
    }
  }

  for (const auto& [puh, c] : before.contractors) {
    auto it = after.contractors.find(puh);
    if (it == after.contractors.end()) {
      bad(8, "contract " + puh + " disappeared");
    } else if (it->second.code != c.code || it->second.t != c.t) {
      bad(8, "contract " + puh + " changed its code or time");
    }
  }
  for (const auto& [puh, c] : after.contractors) {
    if (before.contractors.count(puh)) continue;
    if (gen_contract_hash(c.code, c.t) != puh) bad(9, "new contract " + puh + " is not self-verifying");
  }
  return out;
}

std::optional<std::string> check_consistency(const Blockchain& b) {
  for (const auto& [oph, e] : b.pool) {
    const Operation& op = e.op;
    if (!b.managers.count(op.sender)) return oph + ": sender " + op.sender + " is not registered";
    if (op.kind == OpKind::Transfer) {
      if (b.managers.count(op.target)) {
        if (op.arg != "()") return oph + ": transfer to an implicit account with a parameter";
        continue;
      }
      auto c = b.contractors.find(op.target);
      if (c == b.contractors.end()) return oph + ": target " + op.target + " is not registered";
      try {
        if (!type_stored_value(op.arg, parse_code_header(c->second.code).param_ty)) {
          return oph + ": parameter " + op.arg + " does not fit the contract";
        }
      } catch (const CodeTypeError& err) {
        return oph + ": target code is ill-typed: " + err.what();
      }
      continue;
    }
    if (!code_typechecks(op.code)) return oph + ": originated code is ill-typed";
    if (!chk_init(op.code, op.arg)) return oph + ": initial storage does not fit the code";
    if (e.status.kind == StatusKind::Included) {
      const std::string puh = gen_contract_hash(op.code, e.status.t);
      auto c = b.contractors.find(puh);
      if (c == b.contractors.end()) return oph + ": originated contract " + puh + " is missing";
      if (c->second.code != op.code || c->second.t != e.status.t) {
        return oph + ": contract " + puh + " does not match its origination";
      }
    }
  }
  return std::nullopt;
}

ProgramStatus program_status(const Node& node, const Blockchain& chain, const ExprPtr& program) {
  (void)node;
  const Decomposition d = decompose(program);
  switch (d.kind) {
    case RedexKind::AlreadyValue:
      return program->kind == ExprKind::Unit ? ProgramStatus::Done : ProgramStatus::Stuck;
    case RedexKind::Uncaught:
      return ProgramStatus::Aborted;
    case RedexKind::Stuck:
      return ProgramStatus::Stuck;
    case RedexKind::Query:
      if (d.redex->query == QueryKind::GetContract) {
        const ExprPtr& arg = d.redex->kids[0];
        auto it = chain.pool.find(arg->text);
        if (it != chain.pool.end() && it->second.op.kind == OpKind::Originate &&
            it->second.status.kind == StatusKind::Pending) {
          return ProgramStatus::Blocked;
        }
      }
      return ProgramStatus::Active;
    default:
      return ProgramStatus::Active;
  }
}

std::optional<std::string> check_progress(const Config& cfg, std::size_t enabled_count) {
  for (std::size_t n = 0; n < cfg.nodes.size(); ++n) {
    const Node& node = cfg.nodes[n];
    for (std::size_t p = 0; p < node.programs.size(); ++p) {
      const ProgramStatus s = program_status(node, cfg.chain, node.programs[p]);
      const std::string where = "node " + std::to_string(n) + " program " + std::to_string(p);
      if (s == ProgramStatus::Stuck) return where + " is stuck: " + to_string(node.programs[p]);
      if (enabled_count == 0 && (s == ProgramStatus::Active || s == ProgramStatus::Blocked)) {
        return "deadlock: " + where + " cannot finish and nothing is enabled";
      }
    }
  }
  return std::nullopt;
}

bool all_programs_unit(const Config& cfg) {
  for (const auto& node : cfg.nodes) {
    for (const auto& p : node.programs) {
      if (p->kind != ExprKind::Unit) return false;
    }
  }
  return true;
}

std::optional<std::string> check_config(const Config& cfg) {
  if (auto err = check_config_well_formed(cfg)) return err;
  return check_well_formed(cfg.chain);
}

void CheckStats::merge(const CheckStats& other) {
  for (const auto& [k, v] : other.evaluated) evaluated[k] += v;
  for (const auto& [k, v] : other.failed) failed[k] += v;
}

std::size_t CheckStats::total_failed() const {
  std::size_t n = 0;
  for (const auto& [k, v] : failed) n += v;
  return n;
}

}  // namespace chainsem
