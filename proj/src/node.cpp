#include "chainsem/node.hpp"

#include <set>

namespace chainsem {

bool Node::owns(const std::string& puk) const {
  for (const auto& a : accounts) {
    if (a.puk == puk) return true;
  }
  return false;
}

bool config_equal(const Config& a, const Config& b) {
  if (!(a.chain == b.chain) || a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const Node& x = a.nodes[i];
    const Node& y = b.nodes[i];
    if (!(x.accounts == y.accounts) || x.programs.size() != y.programs.size()) return false;
    for (std::size_t j = 0; j < x.programs.size(); ++j) {
      if (!expr_equal(x.programs[j], y.programs[j])) return false;
    }
  }
  return true;
}

std::optional<std::string> check_config_well_formed(const Config& cfg) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < cfg.nodes.size(); ++i) {
    for (const auto& a : cfg.nodes[i].accounts) {
      if (!seen.insert(a.puk).second) {
        return "account " + a.puk + " appears on more than one node (accounts must be disjoint)";
      }
      if (!cfg.chain.managers.count(a.puk)) {
        return "account " + a.puk + " of node " + std::to_string(i) + " is not a registered manager";
      }
    }
  }
  return std::nullopt;
}

std::optional<Operation> operation_of(const Expr& redex) {
  if (redex.kind != ExprKind::Transfer && redex.kind != ExprKind::Originate) return std::nullopt;
  const auto& k = redex.kids;
  if (k[0]->kind != ExprKind::Tz || k[1]->kind != ExprKind::Puk || k[4]->kind != ExprKind::Tz) {
    return std::nullopt;
  }
  Operation op;
  op.nt = k[0]->number;
  op.sender = k[1]->text;
  op.fee = k[4]->number;
  try {
    op.arg = serialize_stored(k[3]);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  if (redex.kind == ExprKind::Transfer) {
    if (k[2]->kind != ExprKind::Puk && k[2]->kind != ExprKind::Puh) return std::nullopt;
    op.kind = OpKind::Transfer;
    op.target = k[2]->text;
  } else {
    if (k[2]->kind != ExprKind::Code) return std::nullopt;
    op.kind = OpKind::Originate;
    op.code = k[2]->text;
  }
  return op;
}

namespace {

InjectOutcome reject(ExprPtr exception) {
  InjectOutcome out;
  out.exception = std::move(exception);
  return out;
}

InjectOutcome reject(ErrorKind err) { return reject(ex::error(err)); }

InjectOutcome accept(const Blockchain& chain, const Operation& op) {
  InjectOutcome out;
  out.accepted = true;
  out.chain = chain;
  out.dropped = enforce_pool_cap(out.chain);
  const std::string oph = gen_op_hash(op, out.chain.time);
  // A second identical operation in the same time unit would reuse the hash;
  // the counter normally prevents it, the pool cap can let it through.
  if (out.chain.pool.count(oph)) return reject(ErrorKind::Count);
  out.chain = inject(out.chain, op, &out.oph);
  return out;
}

bool sender_ok(const Node& node, const Blockchain& chain, const Operation& op) {
  return node.owns(op.sender) && chain.managers.count(op.sender) > 0;
}

}  // namespace

InjectOutcome try_inject_transfer(const Node& node, const Blockchain& chain, const Expr& redex) {
  auto parsed = operation_of(redex);
  if (!parsed || parsed->kind != OpKind::Transfer) return reject(ErrorKind::Arg);
  const Operation& op = *parsed;
  const bool to_contract = redex.kids[2]->kind == ExprKind::Puh;
  if (!sender_ok(node, chain, op)) return reject(ErrorKind::Puk);
  if (!to_contract && !chain.managers.count(op.target)) return reject(ErrorKind::Puk);
  if (!chk_bal(chain.managers, op.sender, op.nt, op.fee)) return reject(ErrorKind::Bal);
  if (to_contract) {
    if (!chk_puh(chain.contractors, op.target)) return reject(ErrorKind::Puh);
    const ContractorEntry& c = chain.contractors.at(op.target);
    const CodeRef ref = parse_code_header(c.code);
    if (!chk_arg(chain.contractors, op.target, op.arg) ||
        !stored_refs_resolve(chain, op.arg, ref.param_ty)) {
      return reject(ErrorKind::Arg);
    }
  } else if (op.arg != "()") {
    return reject(ErrorKind::Arg);
  }
  if (!chk_count(chain.managers, op.sender)) return reject(ErrorKind::Count);
  if (!chk_fee(chain.params, op.fee)) return reject(ErrorKind::Fee);
  if (to_contract) {
    const ContractorEntry& c = chain.contractors.at(op.target);
    const StubOutcome dry =
        apply_stub(parse_code_header(c.code), op.arg, c.storage, c.bal, op.nt, op.sender);
    if (!dry.ok) return reject(ex::failwith(dry.message));
  }
  return accept(chain, op);
}

InjectOutcome try_inject_originate(const Node& node, const Blockchain& chain, const Expr& redex) {
  auto parsed = operation_of(redex);
  if (!parsed || parsed->kind != OpKind::Originate) return reject(ErrorKind::Init);
  const Operation& op = *parsed;
  if (!sender_ok(node, chain, op)) return reject(ErrorKind::Puk);
  if (!chk_bal(chain.managers, op.sender, op.nt, op.fee)) return reject(ErrorKind::Bal);
  if (!chk_prg(op.code)) return reject(ErrorKind::Prg);
  if (!chk_init(op.code, op.arg) ||
      !stored_refs_resolve(chain, op.arg, parse_code_header(op.code).storage_ty)) {
    return reject(ErrorKind::Init);
  }
  if (!chk_count(chain.managers, op.sender)) return reject(ErrorKind::Count);
  if (!chk_fee(chain.params, op.fee)) return reject(ErrorKind::Fee);
  return accept(chain, op);
}

InjectOutcome try_inject(const Node& node, const Blockchain& chain, const Expr& redex) {
  return redex.kind == ExprKind::Transfer ? try_inject_transfer(node, chain, redex)
                                          : try_inject_originate(node, chain, redex);
}

namespace {

QueryResult value(ExprPtr v) { return QueryResult{QueryOutcome::Value, std::move(v)}; }
QueryResult raise(ErrorKind err) { return QueryResult{QueryOutcome::Raise, ex::error(err)}; }

ExprPtr status_value(const Status& s) {
  switch (s.kind) {
    case StatusKind::Pending: return ex::pending();
    case StatusKind::Timeout: return ex::timeout();
    case StatusKind::Included: return ex::included(ex::integer(s.t));
  }
  return ex::pending();
}

}  // namespace

QueryResult run_query(const Blockchain& chain, QueryKind kind, const ExprPtr& arg) {
  switch (kind) {
    case QueryKind::GetBalance:
      if (arg->kind == ExprKind::Puk) {
        auto it = chain.managers.find(arg->text);
        return it == chain.managers.end() ? raise(ErrorKind::Puk) : value(ex::tz(it->second.bal));
      }
      if (arg->kind == ExprKind::Puh) {
        auto it = chain.contractors.find(arg->text);
        return it == chain.contractors.end() ? raise(ErrorKind::Puh)
                                             : value(ex::tz(it->second.bal));
      }
      return raise(ErrorKind::Puk);
    case QueryKind::GetStatus: {
      auto it = arg->kind == ExprKind::Oph ? chain.pool.find(arg->text) : chain.pool.end();
      if (it == chain.pool.end()) throw ChainFault("get_status on unknown operation " + to_string(arg));
      return value(status_value(it->second.status));
    }
    case QueryKind::GetStorage: {
      auto it = arg->kind == ExprKind::Puh ? chain.contractors.find(arg->text) : chain.contractors.end();
      if (it == chain.contractors.end()) return raise(ErrorKind::Puh);
      const Ty storage_ty = parse_code_header(it->second.code).storage_ty;
      auto v = parse_stored(it->second.storage, storage_ty);
      if (!v) throw ChainFault("stored value of " + arg->text + " does not parse");
      return value(*v);
    }
    case QueryKind::GetContract: {
      auto it = arg->kind == ExprKind::Oph ? chain.pool.find(arg->text) : chain.pool.end();
      if (it == chain.pool.end() || it->second.op.kind != OpKind::Originate) {
        return raise(ErrorKind::Puh);
      }
      const PoolEntry& e = it->second;
      switch (e.status.kind) {
        case StatusKind::Pending: return QueryResult{QueryOutcome::Blocked, nullptr};
        case StatusKind::Timeout: return raise(ErrorKind::Puh);
        case StatusKind::Included: return value(ex::puh(gen_contract_hash(e.op.code, e.status.t)));
      }
      return raise(ErrorKind::Puh);
    }
  }
  return raise(ErrorKind::Puh);
}

CastResult perform_downcast(const Blockchain& chain, const ExprPtr& v, const Ty& from,
                            const Ty& to) {
  if (cast_allowed(from, to) != CastKind::Downcast) {
    throw std::invalid_argument("perform_downcast on a non-downcast " + from.to_string() + " => " +
                                to.to_string());
  }
  auto fail = [](ErrorKind err) { return CastResult{false, ex::error(err)}; };
  if (to.is(TyKind::Contract)) {
    if (v->kind != ExprKind::Puh) return fail(ErrorKind::Prg);
    auto it = chain.contractors.find(v->text);
    if (it == chain.contractors.end()) return fail(ErrorKind::Prg);
    try {
      if (!(type_code(it->second.code) == Ty::pair(to.first(), to.second()))) {
        return fail(ErrorKind::Prg);
      }
    } catch (const CodeTypeError&) {
      return fail(ErrorKind::Prg);
    }
    return CastResult{true, v};
  }
  if (to.is(TyKind::Puh)) {
    if (v->kind == ExprKind::Puh && chain.contractors.count(v->text)) return CastResult{true, v};
    return fail(ErrorKind::Puh);
  }
  if (v->kind == ExprKind::Puk && chain.managers.count(v->text)) return CastResult{true, v};
  return fail(ErrorKind::Puk);
}

}  // namespace chainsem
