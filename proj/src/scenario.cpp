#include "chainsem/scenario.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace chainsem {

using nlohmann::json;

namespace {

std::string resolve_name(const std::map<std::string, std::string>& bindings,
                         const std::string& ref, const char* where) {
  auto it = bindings.find(ref.substr(1));
  if (it == bindings.end()) {
    throw ScenarioError(std::string(where) + ": undeclared name '" + ref + "'");
  }
  return it->second;
}

/// Replaces every "@name" token in a stored-value string.
std::string resolve_stored(const std::map<std::string, std::string>& bindings,
                           const std::string& text, const char* where) {
  static const std::regex kRef("@[A-Za-z_][A-Za-z0-9_]*");
  std::string out;
  auto begin = std::sregex_iterator(text.begin(), text.end(), kRef);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    out += text.substr(last, static_cast<std::size_t>(it->position()) - last);
    out += resolve_name(bindings, it->str(), where);
    last = static_cast<std::size_t>(it->position() + it->length());
  }
  return out + text.substr(last);
}

Pattern resolve_pattern(const std::map<std::string, std::string>& bindings, const Pattern& p);

ExprPtr resolve_expr(const std::map<std::string, std::string>& bindings, const ExprPtr& e) {
  const bool named =
      (e->kind == ExprKind::Puk || e->kind == ExprKind::Puh || e->kind == ExprKind::Oph) &&
      !e->text.empty() && e->text[0] == '@';
  bool changed = named;
  std::vector<ExprPtr> kids;
  kids.reserve(e->kids.size());
  for (const auto& k : e->kids) {
    kids.push_back(resolve_expr(bindings, k));
    changed = changed || kids.back() != k;
  }
  std::vector<MatchArm> arms;
  for (const auto& arm : e->arms) {
    arms.push_back({resolve_pattern(bindings, arm.pattern), resolve_expr(bindings, arm.body)});
    changed = true;
  }
  if (!changed) return e;
  auto copy = std::make_shared<Expr>(*e);
  copy->kids = std::move(kids);
  copy->arms = std::move(arms);
  if (named) {
    copy->text = resolve_name(bindings, e->text, "program literal");
    const char* prefix = e->kind == ExprKind::Puk ? "puk_" : e->kind == ExprKind::Puh ? "puh_" : "oph_";
    if (copy->text.rfind(prefix, 0) != 0) {
      throw ScenarioError("program literal: '" + e->text + "' resolves to " + copy->text +
                          ", which is not a " + prefix + " hash");
    }
  }
  return copy;
}

Pattern resolve_pattern(const std::map<std::string, std::string>& bindings, const Pattern& p) {
  Pattern out = p;
  if (out.literal) out.literal = resolve_expr(bindings, out.literal);
  for (auto& k : out.kids) k = resolve_pattern(bindings, k);
  return out;
}

std::string code_for(const json& c, const std::string& name) {
  if (c.contains("code")) return c.at("code").get<std::string>();
  if (!c.contains("stub")) throw ScenarioError("contract '" + name + "': needs code or stub");
  const std::string stub = c.at("stub").get<std::string>();
  if (stub == "auction" && !c.contains("param")) return auction_script();
  const auto ids = stub_ids();
  if (std::find(ids.begin(), ids.end(), stub) == ids.end()) {
    throw ScenarioError("contract '" + name + "': unknown stub id '" + stub + "'");
  }
  if (!c.contains("param") || !c.contains("storage")) {
    throw ScenarioError("contract '" + name + "': stub '" + stub + "' needs param and storage types");
  }
  return make_script(ty_from_json(c.at("param")), ty_from_json(c.at("storage")), stub);
}

Account account_from_json(const json& a) {
  if (a.is_string()) {
    const std::string name = a.get<std::string>();
    if (name.rfind("puk_", 0) == 0) return Account{"pak_" + name.substr(4), name};
    return Account{"pak_" + name, puk_of(name)};
  }
  return Account{a.at("pak").get<std::string>(), a.at("puk").get<std::string>()};
}

/// Authoring shape: builds the chain and the bindings.
Blockchain build_chain(const json& j, std::map<std::string, std::string>& bindings) {
  Blockchain b;
  b.time = j.value("time", std::int64_t{1});
  b.params.min_fee = j.value("min_fee", std::int64_t{1});
  if (j.contains("pool_cap") && !j.at("pool_cap").is_null()) {
    b.params.pool_cap = j.at("pool_cap").get<std::size_t>();
  }
  const json managers_json = j.value("managers", json::object());
  for (const auto& [key, bal] : managers_json.items()) {
    const bool raw = key.rfind("puk_", 0) == 0;
    const std::string puk = raw ? key : puk_of(key);
    if (!b.managers.emplace(puk, ManagerEntry{bal.get<std::int64_t>(), Counter{}}).second) {
      throw ScenarioError("manager '" + key + "' listed twice");
    }
    bindings[raw ? key.substr(4) : key] = puk;
  }
  // Contract names first, so initial storages may mention one another.
  std::vector<std::pair<std::string, json>> contracts;
  for (const auto& c : j.value("contracts", json::array())) {
    const std::string name = c.at("name").get<std::string>();
    const std::string code = code_for(c, name);
    const std::int64_t t = c.value("time", std::int64_t{0});
    if (bindings.count(name)) throw ScenarioError("name '" + name + "' declared twice");
    bindings[name] = gen_contract_hash(code, t);
    json resolved = c;
    resolved["code"] = code;
    contracts.emplace_back(name, resolved);
  }
  for (const auto& [name, c] : contracts) {
    ContractorEntry entry;
    entry.code = c.at("code").get<std::string>();
    entry.t = c.value("time", std::int64_t{0});
    entry.bal = c.value("balance", std::int64_t{0});
    const std::string where = "contract '" + name + "' init";
    entry.storage = resolve_stored(bindings, c.at("init").get<std::string>(), where.c_str());
    if (!b.contractors.emplace(bindings.at(name), entry).second) {
      throw ScenarioError("contract '" + name + "' collides with another deployment");
    }
  }
  // Operations already in the pool, injected at their own times.
  std::vector<json> pending;
  for (const auto& p : j.value("pending", json::array())) pending.push_back(p);
  std::stable_sort(pending.begin(), pending.end(), [](const json& a, const json& c) {
    return a.value("time", std::int64_t{0}) < c.value("time", std::int64_t{0});
  });
  const std::int64_t now = b.time;
  auto address = [&](const json& p, const char* field) {
    const std::string ref = p.at(field).get<std::string>();
    auto it = bindings.find(ref);
    return it == bindings.end() ? ref : it->second;
  };
  for (const auto& p : pending) {
    const std::string name = p.at("name").get<std::string>();
    Operation op;
    op.kind = OpKind::Transfer;
    op.nt = p.value("amount", std::int64_t{0});
    op.sender = address(p, "sender");
    op.target = address(p, "target");
    op.arg = resolve_stored(bindings, p.value("param", std::string("()")), "pending param");
    op.fee = p.value("fee", std::int64_t{1});
    b.time = p.value("time", std::int64_t{0});
    if (b.time > now) throw ScenarioError("pending '" + name + "' is injected after the start time");
    std::string oph;
    try {
      b = inject(b, op, &oph);
    } catch (const std::exception& e) {
      throw ScenarioError("pending '" + name + "': " + e.what());
    }
    if (bindings.count(name)) throw ScenarioError("name '" + name + "' declared twice");
    bindings[name] = oph;
  }
  b.time = now;
  return b;
}

}  // namespace

Scenario load_scenario(const json& j) {
  Scenario s;
  try {
    s.name = j.value("name", std::string("scenario"));
    if (j.contains("initial_chain")) {
      s.config.chain = chain_from_json(j.at("initial_chain"));
      const json bindings_json = j.value("bindings", json::object());
      for (const auto& [k, v] : bindings_json.items()) {
        s.bindings[k] = v.get<std::string>();
      }
    } else {
      s.config.chain = build_chain(j, s.bindings);
      const json bindings_json = j.value("bindings", json::object());
      for (const auto& [k, v] : bindings_json.items()) {
        s.bindings[k] = v.get<std::string>();
      }
    }
    for (const auto& n : j.value("nodes", json::array())) {
      Node node;
      for (const auto& a : n.value("accounts", json::array())) {
        node.accounts.push_back(account_from_json(a));
      }
      for (const auto& p : n.value("programs", json::array())) {
        node.programs.push_back(resolve_expr(s.bindings, expr_from_json(p)));
      }
      s.config.nodes.push_back(std::move(node));
    }
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("policy")) {
      auto p = policy_from_name(j.at("policy").get<std::string>());
      if (!p) throw ScenarioError("unknown policy " + j.at("policy").dump());
      s.policy = *p;
    }
    s.max_steps = j.value("max_steps", std::size_t{1000});
    if (j.contains("asserts")) {
      const json& a = j.at("asserts");
      if (a.is_string()) {
        s.asserts = CheckSet::parse(a.get<std::string>());
      } else {
        s.asserts = CheckSet::none();
        for (const auto& c : a) {
          auto check = check_from_name(c.get<std::string>());
          if (!check) throw ScenarioError("unknown assertion " + c.dump());
          s.asserts.enable(*check);
        }
      }
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("malformed scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ScenarioError(path + ": " + e.what());
  }
  return load_scenario(j);
}

json serialize_scenario(const Scenario& s) {
  json nodes = json::array();
  for (const auto& node : s.config.nodes) {
    json accounts = json::array();
    for (const auto& a : node.accounts) accounts.push_back({{"pak", a.pak}, {"puk", a.puk}});
    json programs = json::array();
    for (const auto& p : node.programs) programs.push_back(expr_to_json(p));
    nodes.push_back({{"accounts", accounts}, {"programs", programs}});
  }
  return json{{"name", s.name},
              {"initial_chain", chain_to_json(s.config.chain)},
              {"bindings", s.bindings},
              {"nodes", nodes},
              {"seed", s.seed},
              {"policy", policy_name(s.policy)},
              {"max_steps", s.max_steps},
              {"asserts", s.asserts.to_string()}};
}

json Diagnostic::to_json() const {
  return json{{"check", check}, {"where", where}, {"message", message}};
}

std::vector<Diagnostic> validate_scenario(const Scenario& s) {
  std::vector<Diagnostic> out;
  const Config& cfg = s.config;
  if (auto err = check_config_well_formed(cfg)) out.push_back({"well-formed", "nodes", *err});
  if (auto err = check_well_formed(cfg.chain)) out.push_back({"well-formed", "chain", *err});
  for (const auto& [puh, c] : cfg.chain.contractors) {
    if (!code_typechecks(c.code)) {
      std::string why = "code does not type";
      try {
        type_code(c.code);
      } catch (const CodeTypeError& e) {
        why = e.what();
      }
      out.push_back({"contract", puh, why});
    } else if (!chk_init(c.code, c.storage)) {
      out.push_back({"contract", puh, "storage " + c.storage + " does not fit the code"});
    }
  }
  if (auto err = check_consistency(cfg.chain)) out.push_back({"consistency", "pool", *err});
  if (auto err = check_references(cfg)) out.push_back({"references", "programs", *err});
  if (!out.empty()) return out;

  const ContractTyEnv delta = delta_of(cfg.chain);
  if (auto err = blockchain_type_error(delta, cfg.chain)) out.push_back({"typing", "chain", *err});
  const AmbientInfo ambient{&cfg.chain, &delta, TypingMode::Strict};
  for (std::size_t n = 0; n < cfg.nodes.size(); ++n) {
    for (std::size_t p = 0; p < cfg.nodes[n].programs.size(); ++p) {
      if (auto err = program_type_error(cfg.nodes[n].programs[p], ambient)) {
        std::string where = "node " + std::to_string(n) + " program " + std::to_string(p);
        if (!err->path().empty()) where += " at " + err->path();
        out.push_back({"typing", where, "[" + err->rule() + "] " + err->what()});
      }
    }
  }
  return out;
}

}  // namespace chainsem
