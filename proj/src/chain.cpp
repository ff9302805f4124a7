#include "chainsem/chain.hpp"

#include <openssl/evp.h>

#include <algorithm>

namespace chainsem {

namespace {

std::string sha256_hex128(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(32);
  for (unsigned int i = 0; i < 16; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

void put_field(std::string& out, const std::string& s) {
  out += std::to_string(s.size());
  out.push_back(':');
  out += s;
}

Ty storage_type_of(const std::string& code) { return parse_code_header(code).storage_ty; }

}  // namespace

std::string operation_key(const Operation& op) {
  std::string out = op.kind == OpKind::Transfer ? "T" : "O";
  put_field(out, std::to_string(op.nt));
  put_field(out, op.sender);
  put_field(out, op.target);
  put_field(out, op.code);
  put_field(out, op.arg);
  put_field(out, std::to_string(op.fee));
  return out;
}

std::string gen_op_hash(const Operation& op, std::int64_t t) {
  return "oph_" + sha256_hex128("op|" + operation_key(op) + "|" + std::to_string(t));
}

std::string gen_contract_hash(const std::string& code, std::int64_t t) {
  std::string data = "code|";
  put_field(data, code);
  data += "|" + std::to_string(t);
  return "puh_" + sha256_hex128(data);
}

std::string puk_of(const std::string& name) { return "puk_" + name; }

std::string digest_hex(const std::string& data) { return sha256_hex128(data); }

// --- checks -----------------------------------------------------------------------------

bool chk_bal(const Managers& m, const std::string& puk, std::int64_t nt, std::int64_t fee) {
  auto it = m.find(puk);
  if (it == m.end()) return false;
  std::int64_t need = 0;
  if (__builtin_add_overflow(nt, fee, &need)) return false;
  return it->second.bal >= need;
}

bool chk_count(const Managers& m, const std::string& puk) {
  auto it = m.find(puk);
  return it != m.end() && !it->second.cnt.busy;
}

bool chk_puh(const Contractors& c, const std::string& puh) { return c.count(puh) > 0; }

bool chk_arg(const Contractors& c, const std::string& puh, const StoredValue& param) {
  auto it = c.find(puh);
  if (it == c.end()) return false;
  try {
    return type_stored_value(param, parse_code_header(it->second.code).param_ty);
  } catch (const CodeTypeError&) {
    return false;
  }
}

bool chk_fee(const ChainParams& params, std::int64_t fee) { return fee >= params.min_fee; }

bool chk_init(const std::string& code, const StoredValue& init) {
  try {
    return type_stored_value(init, storage_type_of(code));
  } catch (const CodeTypeError&) {
    return false;
  }
}

bool chk_prg(const std::string& code) { return code_typechecks(code); }

bool stored_refs_resolve(const Blockchain& b, const StoredValue& s, const Ty& t) {
  auto v = parse_stored(s, t);
  if (!v) return false;
  bool ok = true;
  for_each_hash_literal(*v, [&](ExprKind kind, const std::string& text) {
    if (kind == ExprKind::Puk && !b.managers.count(text)) ok = false;
    if (kind == ExprKind::Puh && !b.contractors.count(text)) ok = false;
  });
  return ok;
}

// --- updates ----------------------------------------------------------------------------

Managers upd_count(Managers m, const std::string& puk, bool busy) {
  auto it = m.find(puk);
  if (it == m.end()) throw ChainFault("upd_count: unknown account " + puk);
  it->second.cnt.busy = busy;
  return m;
}

Managers upd_succ(Managers m, const std::string& puk, std::int64_t nt, std::int64_t fee) {
  auto it = m.find(puk);
  if (it == m.end()) throw ChainFault("upd_succ: unknown account " + puk);
  ManagerEntry& e = it->second;
  if (!e.cnt.busy) throw ChainFault("upd_succ: no operation in flight for " + puk);
  if (e.bal < nt + fee) throw ChainFault("upd_succ: balance below nt + fee for " + puk);
  e.bal -= nt + fee;
  e.cnt.n += 1;
  e.cnt.busy = false;
  return m;
}

Contractors upd_constr(Contractors c, const std::string& puh, std::int64_t nt,
                       const StoredValue& param, const std::string& sender,
                       ContractEffect* effect) {
  auto it = c.find(puh);
  if (it == c.end()) throw ChainFault("upd_constr: unknown contract " + puh);
  ContractorEntry& entry = it->second;
  const CodeRef ref = parse_code_header(entry.code);
  StubOutcome out = apply_stub(ref, param, entry.storage, entry.bal, nt, sender);
  ContractEffect local;
  ContractEffect& fx = effect ? *effect : local;
  fx = ContractEffect{};
  if (!out.ok) {
    fx.message = out.message;
    return c;
  }
  fx.ok = true;
  const std::int64_t refund = out.refund ? out.refund->amount : 0;
  if (refund > entry.bal + nt) throw ChainFault("upd_constr: refund exceeds funds of " + puh);
  entry.storage = out.new_storage;
  entry.bal += nt - refund;
  fx.refund = out.refund;
  return c;
}

// --- block transitions ------------------------------------------------------------------

namespace {

const PoolEntry& pending_entry(const Blockchain& b, const std::string& oph) {
  auto it = b.pool.find(oph);
  if (it == b.pool.end()) throw ChainFault("unknown operation " + oph);
  if (it->second.status.kind != StatusKind::Pending) {
    throw ChainFault("operation " + oph + " is not pending");
  }
  return it->second;
}

void credit(Blockchain& b, const std::string& addr, std::int64_t amount, BlockEffect* effect) {
  if (amount == 0) return;
  if (auto m = b.managers.find(addr); m != b.managers.end()) {
    m->second.bal += amount;
  } else if (auto c = b.contractors.find(addr); c != b.contractors.end()) {
    c->second.bal += amount;
  } else {
    throw ChainFault("credit to unknown address " + addr);
  }
  if (effect) effect->credits[addr] += amount;
}

}  // namespace

bool accept_enabled(const Blockchain& b, const std::string& oph) {
  auto it = b.pool.find(oph);
  return it != b.pool.end() && it->second.status.kind == StatusKind::Pending &&
         b.time - it->second.t <= kAcceptWindow;
}

bool timeout_enabled(const Blockchain& b, const std::string& oph) {
  auto it = b.pool.find(oph);
  return it != b.pool.end() && it->second.status.kind == StatusKind::Pending &&
         b.time - it->second.t > kAcceptWindow;
}

Blockchain block_accept(const Blockchain& b, const std::string& oph, BlockEffect* effect) {
  const PoolEntry& entry = pending_entry(b, oph);
  if (entry.op.kind != OpKind::Transfer) throw ChainFault("block_accept on an origination");
  if (!accept_enabled(b, oph)) throw ChainFault("operation " + oph + " is outside the window");
  const Operation& op = entry.op;
  Blockchain next = b;
  if (effect) *effect = BlockEffect{};
  bool backtracked = false;
  if (b.contractors.count(op.target)) {
    ContractEffect fx;
    Contractors updated = upd_constr(b.contractors, op.target, op.nt, op.arg, op.sender, &fx);
    if (fx.ok) {
      next.contractors = std::move(updated);
      next.managers = upd_succ(std::move(next.managers), op.sender, op.nt, op.fee);
      if (effect) effect->credits[op.target] += op.nt;
      if (fx.refund) {
        const Refund& r = *fx.refund;
        const bool known = next.managers.count(r.target) || next.contractors.count(r.target);
        if (known && r.target != op.target) {
          if (effect) effect->credits[op.target] -= r.amount;
          credit(next, r.target, r.amount, effect);
        } else {
          next.contractors[op.target].bal += r.amount;
        }
      }
    } else {
      backtracked = true;
      next.managers = upd_succ(std::move(next.managers), op.sender, 0, op.fee);
      if (effect) {
        effect->backtracked = true;
        effect->message = fx.message;
      }
    }
  } else if (b.managers.count(op.target)) {
    next.managers = upd_succ(std::move(next.managers), op.sender, op.nt, op.fee);
    credit(next, op.target, op.nt, effect);
  } else {
    throw ChainFault("transfer target " + op.target + " is not registered");
  }
  next.burnt += op.fee;
  PoolEntry& e = next.pool.at(oph);
  e.status = Status{StatusKind::Included, b.time};
  e.backtracked = backtracked;
  next.time = b.time + 1;
  return next;
}

Blockchain block_originate_accept(const Blockchain& b, const std::string& oph,
                                  BlockEffect* effect) {
  const PoolEntry& entry = pending_entry(b, oph);
  if (entry.op.kind != OpKind::Originate) {
    throw ChainFault("block_originate_accept on a transfer");
  }
  if (!accept_enabled(b, oph)) throw ChainFault("operation " + oph + " is outside the window");
  const Operation& op = entry.op;
  const std::string puh = gen_contract_hash(op.code, b.time);
  if (b.contractors.count(puh)) throw ChainFault("contract hash collision " + puh);
  Blockchain next = b;
  next.managers = upd_succ(std::move(next.managers), op.sender, op.nt, op.fee);
  next.contractors.emplace(puh, ContractorEntry{op.code, b.time, op.nt, op.arg});
  next.burnt += op.fee;
  next.pool.at(oph).status = Status{StatusKind::Included, b.time};
  next.time = b.time + 1;
  if (effect) {
    *effect = BlockEffect{};
    effect->originated = puh;
  }
  return next;
}

Blockchain block_timeout(const Blockchain& b, const std::string& oph) {
  const PoolEntry& entry = pending_entry(b, oph);
  if (!timeout_enabled(b, oph)) throw ChainFault("operation " + oph + " is still in its window");
  Blockchain next = b;
  next.managers = upd_count(std::move(next.managers), entry.op.sender, false);
  next.pool.at(oph).status = Status{StatusKind::Timeout, 0};
  return next;
}

Blockchain inject(const Blockchain& b, const Operation& op, std::string* oph_out) {
  const std::string oph = gen_op_hash(op, b.time);
  if (b.pool.count(oph)) throw ChainFault("operation hash already in pool: " + oph);
  Blockchain next = b;
  next.pool.emplace(oph, PoolEntry{op, b.time, Status{}, false});
  next.managers = upd_count(std::move(next.managers), op.sender, true);
  if (oph_out) *oph_out = oph;
  return next;
}

std::vector<std::string> enforce_pool_cap(Blockchain& b) {
  std::vector<std::string> dropped;
  if (!b.params.pool_cap) return dropped;
  for (;;) {
    std::size_t pending = 0;
    const std::string* oldest = nullptr;
    std::int64_t oldest_t = 0;
    for (const auto& [oph, e] : b.pool) {
      if (e.status.kind != StatusKind::Pending) continue;
      ++pending;
      if (!oldest || e.t < oldest_t) {
        oldest = &oph;
        oldest_t = e.t;
      }
    }
    if (pending < *b.params.pool_cap || !oldest) return dropped;
    const std::string oph = *oldest;
    PoolEntry& e = b.pool.at(oph);
    e.status = Status{StatusKind::Timeout, 0};
    b.managers = upd_count(std::move(b.managers), e.op.sender, false);
    dropped.push_back(oph);
  }
}

// --- well-formedness ----------------------------------------------------------------------

std::optional<std::string> check_well_formed(const Blockchain& b) {
  std::map<std::string, int> pending_by_sender;
  for (const auto& [oph, e] : b.pool) {
    if (gen_op_hash(e.op, e.t) != oph) return "pool key " + oph + " is not genOpHash(op, t)";
    if (e.t > b.time) return "pool entry " + oph + " injected in the future";
    if (e.status.kind == StatusKind::Included && (e.status.t < e.t || e.status.t >= b.time)) {
      return "pool entry " + oph + " has inclusion time out of range";
    }
    if (e.backtracked && e.status.kind != StatusKind::Included) {
      return "pool entry " + oph + " is backtracked without being included";
    }
    if (e.status.kind == StatusKind::Pending) ++pending_by_sender[e.op.sender];
    if (!b.managers.count(e.op.sender)) return "pool entry " + oph + " has unknown sender";
  }
  for (const auto& [puk, m] : b.managers) {
    if (m.bal < 0) return "negative balance for " + puk;
    if (m.cnt.n < 0) return "negative counter for " + puk;
    const int pending = pending_by_sender.count(puk) ? pending_by_sender.at(puk) : 0;
    if (m.cnt.busy ? pending != 1 : pending != 0) {
      return "counter flag of " + puk + " disagrees with " + std::to_string(pending) +
             " pending operation(s)";
    }
  }
  for (const auto& [puh, c] : b.contractors) {
    if (gen_contract_hash(c.code, c.t) != puh) return "contract key " + puh + " is not self-verifying";
    if (c.bal < 0) return "negative balance for " + puh;
    if (c.t >= b.time) return "contract " + puh + " accepted in the future";
  }
  if (b.burnt < 0) return "negative burnt total";
  return std::nullopt;
}

bool well_formed(const Blockchain& b) { return !check_well_formed(b).has_value(); }

std::int64_t token_total(const Blockchain& b) {
  std::int64_t total = b.burnt;
  for (const auto& [k, m] : b.managers) total += m.bal;
  for (const auto& [k, c] : b.contractors) total += c.bal;
  return total;
}

std::string status_name(const Status& s) {
  switch (s.kind) {
    case StatusKind::Pending: return "pending";
    case StatusKind::Included: return "included(" + std::to_string(s.t) + ")";
    case StatusKind::Timeout: return "timeout";
  }
  return "?";
}

// --- JSON snapshot ------------------------------------------------------------------------

using nlohmann::json;

namespace {

json op_to_json(const Operation& op) {
  json j;
  j["kind"] = op.kind == OpKind::Transfer ? "transfer" : "originate";
  j["amount"] = op.nt;
  j["sender"] = op.sender;
  if (op.kind == OpKind::Transfer) {
    j["target"] = op.target;
    j["param"] = op.arg;
  } else {
    j["code"] = op.code;
    j["init"] = op.arg;
  }
  j["fee"] = op.fee;
  return j;
}

Operation op_from_json(const json& j) {
  Operation op;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "transfer") {
    op.kind = OpKind::Transfer;
    op.target = j.at("target").get<std::string>();
    op.arg = j.at("param").get<std::string>();
  } else if (kind == "originate") {
    op.kind = OpKind::Originate;
    op.code = j.at("code").get<std::string>();
    op.arg = j.at("init").get<std::string>();
  } else {
    throw std::invalid_argument("unknown operation kind '" + kind + "'");
  }
  op.nt = j.at("amount").get<std::int64_t>();
  op.sender = j.at("sender").get<std::string>();
  op.fee = j.at("fee").get<std::int64_t>();
  if (op.nt < 0 || op.fee < 0) throw std::invalid_argument("negative amount or fee");
  return op;
}

json status_to_json(const Status& s) {
  switch (s.kind) {
    case StatusKind::Pending: return "pending";
    case StatusKind::Timeout: return "timeout";
    case StatusKind::Included: return json{{"included", s.t}};
  }
  return nullptr;
}

Status status_from_json(const json& j) {
  if (j.is_string()) {
    if (j == "pending") return Status{StatusKind::Pending, 0};
    if (j == "timeout") return Status{StatusKind::Timeout, 0};
  } else if (j.is_object() && j.contains("included")) {
    return Status{StatusKind::Included, j.at("included").get<std::int64_t>()};
  }
  throw std::invalid_argument("malformed status " + j.dump());
}

}  // namespace

json chain_to_json(const Blockchain& b) {
  json j;
  j["time"] = b.time;
  j["burnt"] = b.burnt;
  j["min_fee"] = b.params.min_fee;
  j["pool_cap"] = b.params.pool_cap ? json(*b.params.pool_cap) : json(nullptr);
  json pool = json::object();
  for (const auto& [oph, e] : b.pool) {
    pool[oph] = {{"op", op_to_json(e.op)},
                 {"t", e.t},
                 {"status", status_to_json(e.status)},
                 {"backtracked", e.backtracked}};
  }
  j["pool"] = std::move(pool);
  json managers = json::object();
  for (const auto& [puk, m] : b.managers) {
    managers[puk] = {{"bal", m.bal}, {"n", m.cnt.n}, {"busy", m.cnt.busy}};
  }
  j["managers"] = std::move(managers);
  json contractors = json::object();
  for (const auto& [puh, c] : b.contractors) {
    contractors[puh] = {{"code", c.code}, {"t", c.t}, {"bal", c.bal}, {"storage", c.storage}};
  }
  j["contractors"] = std::move(contractors);
  return j;
}

Blockchain chain_from_json(const json& j) {
  Blockchain b;
  b.time = j.at("time").get<std::int64_t>();
  b.burnt = j.value("burnt", std::int64_t{0});
  b.params.min_fee = j.value("min_fee", std::int64_t{1});
  if (j.contains("pool_cap") && !j.at("pool_cap").is_null()) {
    b.params.pool_cap = j.at("pool_cap").get<std::size_t>();
  }
  const json pool_json = j.value("pool", json::object());
  for (const auto& [oph, e] : pool_json.items()) {
    b.pool.emplace(oph, PoolEntry{op_from_json(e.at("op")), e.at("t").get<std::int64_t>(),
                                  status_from_json(e.at("status")),
                                  e.value("backtracked", false)});
  }
  const json managers_json = j.value("managers", json::object());
  for (const auto& [puk, m] : managers_json.items()) {
    b.managers.emplace(puk, ManagerEntry{m.at("bal").get<std::int64_t>(),
                                         Counter{m.value("n", std::int64_t{0}),
                                                 m.value("busy", false)}});
  }
  const json contractors_json = j.value("contractors", json::object());
  for (const auto& [puh, c] : contractors_json.items()) {
    b.contractors.emplace(puh, ContractorEntry{c.at("code").get<std::string>(),
                                               c.at("t").get<std::int64_t>(),
                                               c.at("bal").get<std::int64_t>(),
                                               c.at("storage").get<std::string>()});
  }
  return b;
}

}  // namespace chainsem
