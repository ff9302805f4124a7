#include "chainsem/typecheck.hpp"

#include <algorithm>

#include "chainsem/contracts.hpp"
#include "chainsem/stored.hpp"

namespace chainsem {

TypeError::TypeError(std::string rule, std::string path, std::string message,
                     std::string expected, std::string actual)
    : std::runtime_error(rule + " at " + (path.empty() ? "/" : path) + ": " + message),
      rule_(std::move(rule)),
      path_(std::move(path)),
      expected_(std::move(expected)),
      actual_(std::move(actual)) {}

nlohmann::json TypeError::to_json() const {
  nlohmann::json j = {{"rule", rule_}, {"path", path_.empty() ? "/" : path_}, {"message", what()}};
  if (!expected_.empty()) j["expected"] = expected_;
  if (!actual_.empty()) j["actual"] = actual_;
  return j;
}

namespace {

bool contains_arrow(const Ty& t) {
  if (t.is(TyKind::Arrow)) return true;
  if (t.arity() >= 1 && contains_arrow(t.first())) return true;
  return t.arity() == 2 && contains_arrow(t.second());
}

class Checker {
 public:
  Checker(TyEnv env, const AmbientInfo& ambient) : env_(std::move(env)), amb_(ambient) {}

  Ty synth(const ExprPtr& e) {
    const Expr& x = *e;
    switch (x.kind) {
      case ExprKind::Int: return Ty::integer();
      case ExprKind::String: return Ty::string();
      case ExprKind::Tz: return Ty::tz();
      case ExprKind::Unit: return Ty::unit();
      case ExprKind::Bool: return Ty::boolean();
      case ExprKind::Pending:
      case ExprKind::Timeout: return Ty::status();
      case ExprKind::Included:
        check_child(e, 0, Ty::integer());
        return Ty::status();
      case ExprKind::Error:
      case ExprKind::FailWith: return Ty::exception();
      case ExprKind::Puk: return Ty::puk();
      case ExprKind::Puh: return puh_type(x);
      case ExprKind::Oph: return oph_type(x);
      case ExprKind::Code: return code_type(x);
      case ExprKind::Fix:
        fail("fix", "fix must be applied to a lambda");
      case ExprKind::Var:
        for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
          if (it->first == x.text) return it->second;
        }
        fail("var", "unbound variable '" + x.text + "'");
      case ExprKind::Lambda: {
        require_wf(x.ty, "lambda");
        env_.emplace_back(x.text, x.ty);
        Ty body = synth_child(e, 0);
        env_.pop_back();
        return Ty::arrow(x.ty, body);
      }
      case ExprKind::App: return synth_app(e);
      case ExprKind::Add:
      case ExprKind::Lt: {
        Ty lhs = synth_child(e, 0);
        if (!lhs.is(TyKind::Int) && !lhs.is(TyKind::Tz)) {
          fail(x.kind == ExprKind::Add ? "add" : "lt", "operands must be Int or Tz", "Int|Tz",
               lhs.to_string());
        }
        check_child(e, 1, lhs);
        return x.kind == ExprKind::Add ? lhs : Ty::boolean();
      }
      case ExprKind::Eq: {
        Ty lhs = synth_child(e, 0);
        Ty rhs = synth_child(e, 1);
        auto j = join(lhs, rhs);
        if (!j) fail("eq", "operands are not comparable", lhs.to_string(), rhs.to_string());
        if (contains_arrow(*j)) fail("eq", "equality on functional values", "", j->to_string());
        return Ty::boolean();
      }
      case ExprKind::And:
      case ExprKind::Or:
        check_child(e, 0, Ty::boolean());
        check_child(e, 1, Ty::boolean());
        return Ty::boolean();
      case ExprKind::Not:
        check_child(e, 0, Ty::boolean());
        return Ty::boolean();
      case ExprKind::Pair: return Ty::pair(synth_child(e, 0), synth_child(e, 1));
      case ExprKind::Cons: {
        Ty head = synth_child(e, 0);
        check_child(e, 1, Ty::list(head));
        return Ty::list(head);
      }
      case ExprKind::Some: return Ty::option(synth_child(e, 0));
      case ExprKind::Nil:
      case ExprKind::None:
      case ExprKind::Left:
      case ExprKind::Right:
      case ExprKind::Raise:
        fail("annotation", "type cannot be synthesized here; it needs an expected type");
      case ExprKind::Match: return synth_match(e);
      case ExprKind::Try: {
        std::optional<Ty> body;
        try {
          body = synth_child(e, 0);
        } catch (const TypeError& err) {
          if (err.rule() != "annotation") throw;
        }
        if (!body) {
          Ty handler = synth_child(e, 1);
          if (!handler.is(TyKind::Arrow) || !fits(Ty::exception(), handler.first())) {
            fail("try", "handler must be Exception -> t", "Arrow(Exception,_)", handler.to_string());
          }
          body = handler.second();
          check_child(e, 0, *body);
          return *body;
        }
        check_child(e, 1, Ty::arrow(Ty::exception(), *body));
        return *body;
      }
      case ExprKind::Cast: {
        require_wf(x.ty, "cast");
        require_wf(x.ty2, "cast");
        if (cast_allowed(x.ty, x.ty2) == CastKind::Forbidden) {
          fail("cast", "no axiom relates the two types", x.ty2.to_string(), x.ty.to_string());
        }
        check_child(e, 0, x.ty);
        return x.ty2;
      }
      case ExprKind::Query: return synth_query(e);
      case ExprKind::Transfer: {
        check_child(e, 0, Ty::tz());
        check_child(e, 1, Ty::puk());
        Ty target = synth_child(e, 2);
        if (target.is(TyKind::Puk)) {
          check_child(e, 3, Ty::unit());
        } else if (target.is(TyKind::Contract)) {
          check_child(e, 3, target.first());
        } else {
          fail("transfer", "target must be Puk or a contract handle", "Puk|Contract(_,_)",
               target.to_string(), 2);
        }
        check_child(e, 4, Ty::tz());
        return Ty::oph_transfer();
      }
      case ExprKind::Originate: {
        check_child(e, 0, Ty::tz());
        check_child(e, 1, Ty::puk());
        Ty code = synth_child(e, 2);
        if (!code.is(TyKind::Code)) {
          fail("originate", "code argument must have a Code type", "Code(_,_)", code.to_string(), 2);
        }
        check_child(e, 3, code.second());
        check_child(e, 4, Ty::tz());
        return Ty::oph(code.first(), code.second());
      }
    }
    fail("syntax", "unknown expression");
  }

  void check(const ExprPtr& e, const Ty& expected) {
    const Expr& x = *e;
    switch (x.kind) {
      case ExprKind::Raise:
        check_child(e, 0, Ty::exception());
        return;
      case ExprKind::Nil:
        if (!expected.is(TyKind::List)) mismatch("nil", expected, "List(_)");
        return;
      case ExprKind::None:
        if (!expected.is(TyKind::Option)) mismatch("none", expected, "Option(_)");
        return;
      case ExprKind::Left:
      case ExprKind::Right:
        if (!expected.is(TyKind::Sum)) mismatch("sum", expected, "Sum(_,_)");
        check_child(e, 0, x.kind == ExprKind::Left ? expected.first() : expected.second());
        return;
      case ExprKind::Some:
        if (!expected.is(TyKind::Option)) mismatch("some", expected, "Option(_)");
        check_child(e, 0, expected.first());
        return;
      case ExprKind::Pair:
        if (!expected.is(TyKind::Pair)) break;
        check_child(e, 0, expected.first());
        check_child(e, 1, expected.second());
        return;
      case ExprKind::Cons:
        if (!expected.is(TyKind::List)) break;
        check_child(e, 0, expected.first());
        check_child(e, 1, expected);
        return;
      case ExprKind::Lambda: {
        if (!expected.is(TyKind::Arrow)) break;
        require_wf(x.ty, "lambda");
        if (!fits(expected.first(), x.ty)) {
          fail("lambda", "parameter annotation disagrees with the expected type",
               expected.first().to_string(), x.ty.to_string());
        }
        env_.emplace_back(x.text, x.ty);
        check_child(e, 0, expected.second());
        env_.pop_back();
        return;
      }
      case ExprKind::App:
        if (x.kids[0]->kind == ExprKind::Lambda) {
          const Expr& fn = *x.kids[0];
          require_wf(fn.ty, "lambda");
          check_child(e, 1, fn.ty);
          path_.push_back("0");
          env_.emplace_back(fn.text, fn.ty);
          check_child(x.kids[0], 0, expected);
          env_.pop_back();
          path_.pop_back();
          return;
        }
        break;
      case ExprKind::Match: {
        Ty scrutinee = synth_child(e, 0);
        for (std::size_t i = 0; i < x.arms.size(); ++i) {
          with_arm(i, x.arms[i], scrutinee, [&](const ExprPtr& body) { check(body, expected); });
        }
        return;
      }
      case ExprKind::Try:
        check_child(e, 0, expected);
        check_child(e, 1, Ty::arrow(Ty::exception(), expected));
        return;
      default:
        break;
    }
    Ty actual = synth(e);
    if (!fits(actual, expected)) {
      fail("subsumption", "type mismatch", expected.to_string(), actual.to_string());
    }
  }

 private:
  [[noreturn]] void fail(const std::string& rule, const std::string& message,
                         const std::string& expected = {}, const std::string& actual = {},
                         std::optional<std::size_t> child = std::nullopt) const {
    std::string p;
    for (const auto& s : path_) p += "/" + s;
    if (child) p += "/" + std::to_string(*child);
    throw TypeError(rule, p, message, expected, actual);
  }

  [[noreturn]] void mismatch(const std::string& rule, const Ty& expected, const std::string& shape) {
    fail(rule, "expected type does not have the required shape", expected.to_string(), shape);
  }

  bool runtime() const { return amb_.mode == TypingMode::Runtime; }

  bool fits(const Ty& actual, const Ty& expected) const {
    return runtime() ? subsumed(actual, expected) : actual == expected;
  }

  /// Least common type of two comparable types, if any.
  std::optional<Ty> join(const Ty& a, const Ty& b) const {
    if (a == b) return a;
    if (!runtime()) return std::nullopt;
    if (subsumed(a, b)) return b;
    if (subsumed(b, a)) return a;
    if (subsumed(a, Ty::addr()) && subsumed(b, Ty::addr())) return Ty::addr();
    if (a.kind() != b.kind()) return std::nullopt;
    switch (a.kind()) {
      case TyKind::Pair:
      case TyKind::Sum: {
        auto x = join(a.first(), b.first());
        auto y = join(a.second(), b.second());
        if (!x || !y) return std::nullopt;
        return a.is(TyKind::Pair) ? Ty::pair(*x, *y) : Ty::sum(*x, *y);
      }
      case TyKind::List:
      case TyKind::Option: {
        auto x = join(a.first(), b.first());
        if (!x) return std::nullopt;
        return a.is(TyKind::List) ? Ty::list(*x) : Ty::option(*x);
      }
      default:
        return std::nullopt;
    }
  }

  void require_wf(const Ty& t, const std::string& rule) const {
    if (!well_formed_type(t)) fail(rule, "ill-formed type annotation", "", t.to_string());
  }

  Ty synth_child(const ExprPtr& e, std::size_t i) {
    path_.push_back(std::to_string(i));
    Ty t = synth(e->kids[i]);
    path_.pop_back();
    return t;
  }

  void check_child(const ExprPtr& e, std::size_t i, const Ty& expected) {
    path_.push_back(std::to_string(i));
    check(e->kids[i], expected);
    path_.pop_back();
  }

  Ty puh_type(const Expr& x) const {
    if (runtime() && amb_.delta) {
      auto it = amb_.delta->find(x.text);
      if (it != amb_.delta->end()) return Ty::contract(it->second.first(), it->second.second());
    }
    return Ty::puh();
  }

  Ty oph_type(const Expr& x) const {
    if (!amb_.chain) fail("oph", "operation hash literal without a chain to resolve it");
    auto it = amb_.chain->pool.find(x.text);
    if (it == amb_.chain->pool.end()) fail("oph", "operation hash " + x.text + " is not in the pool");
    const Operation& op = it->second.op;
    if (op.kind == OpKind::Transfer) return Ty::oph_transfer();
    try {
      CodeRef ref = parse_code_header(op.code);
      return Ty::oph(ref.param_ty, ref.storage_ty);
    } catch (const CodeTypeError& err) {
      fail("oph", std::string("origination code does not parse: ") + err.what());
    }
  }

  Ty code_type(const Expr& x) const {
    try {
      CodeRef ref = parse_code_header(x.text);
      return Ty::code(ref.param_ty, ref.storage_ty);
    } catch (const CodeTypeError& err) {
      fail("code", err.what());
    }
  }

  Ty synth_app(const ExprPtr& e) {
    const Expr& x = *e;
    const Expr& fn = *x.kids[0];
    if (fn.kind == ExprKind::Fix) {
      const Expr& gen = *x.kids[1];
      if (gen.kind != ExprKind::Lambda) fail("fix", "fix must be applied to a lambda", "", "", 1);
      require_wf(gen.ty, "fix");
      path_.push_back("1");
      env_.emplace_back(gen.text, gen.ty);
      check_child(x.kids[1], 0, gen.ty);
      env_.pop_back();
      path_.pop_back();
      return gen.ty;
    }
    if (fn.kind == ExprKind::Lambda) {
      require_wf(fn.ty, "lambda");
      check_child(e, 1, fn.ty);
      path_.push_back("0");
      env_.emplace_back(fn.text, fn.ty);
      Ty body = synth_child(x.kids[0], 0);
      env_.pop_back();
      path_.pop_back();
      return body;
    }
    Ty f = synth_child(e, 0);
    if (!f.is(TyKind::Arrow)) fail("app", "applying a non-function", "Arrow(_,_)", f.to_string(), 0);
    check_child(e, 1, f.first());
    return f.second();
  }

  template <class Body>
  void with_arm(std::size_t i, const MatchArm& arm, const Ty& scrutinee, Body&& body) {
    path_.push_back("arm" + std::to_string(i));
    const std::size_t mark = env_.size();
    bind(arm.pattern, scrutinee);
    body(arm.body);
    env_.resize(mark);
    path_.pop_back();
  }

  Ty synth_match(const ExprPtr& e) {
    const Expr& x = *e;
    if (x.arms.empty()) fail("match", "match without arms");
    Ty scrutinee = synth_child(e, 0);
    std::optional<Ty> result;
    for (std::size_t i = 0; i < x.arms.size(); ++i) {
      with_arm(i, x.arms[i], scrutinee, [&](const ExprPtr& body) {
        try {
          Ty t = synth(body);
          if (!result) {
            result = t;
          } else if (auto j = join(*result, t)) {
            result = *j;
          } else {
            fail("match", "arms have different types", result->to_string(), t.to_string());
          }
        } catch (const TypeError& err) {
          if (err.rule() != "annotation") throw;
        }
      });
    }
    if (!result) fail("annotation", "no arm of the match determines its type");
    for (std::size_t i = 0; i < x.arms.size(); ++i) {
      with_arm(i, x.arms[i], scrutinee, [&](const ExprPtr& body) { check(body, *result); });
    }
    return *result;
  }

  void bind(const Pattern& p, const Ty& t) {
    auto need = [&](TyKind k, const char* shape) {
      if (!t.is(k)) fail("pattern", "pattern does not fit the scrutinee type", shape, t.to_string());
    };
    switch (p.kind) {
      case PatternKind::Var:
        env_.emplace_back(p.name, t);
        return;
      case PatternKind::Wildcard:
        return;
      case PatternKind::Const: {
        Ty lit = synth(p.literal);
        if (!join(lit, t)) fail("pattern", "constant of the wrong type", t.to_string(), lit.to_string());
        return;
      }
      case PatternKind::Pair:
        need(TyKind::Pair, "Pair(_,_)");
        bind(p.kids[0], t.first());
        bind(p.kids[1], t.second());
        return;
      case PatternKind::Nil:
        need(TyKind::List, "List(_)");
        return;
      case PatternKind::Cons:
        need(TyKind::List, "List(_)");
        bind(p.kids[0], t.first());
        bind(p.kids[1], t);
        return;
      case PatternKind::Left:
        need(TyKind::Sum, "Sum(_,_)");
        bind(p.kids[0], t.first());
        return;
      case PatternKind::Right:
        need(TyKind::Sum, "Sum(_,_)");
        bind(p.kids[0], t.second());
        return;
      case PatternKind::Some:
        need(TyKind::Option, "Option(_)");
        bind(p.kids[0], t.first());
        return;
      case PatternKind::None:
        need(TyKind::Option, "Option(_)");
        return;
      case PatternKind::Included:
        need(TyKind::Status, "Status");
        bind(p.kids[0], Ty::integer());
        return;
      case PatternKind::FailWith:
        need(TyKind::Exception, "Exception");
        bind(p.kids[0], Ty::string());
        return;
    }
  }

  Ty synth_query(const ExprPtr& e) {
    const Expr& x = *e;
    const std::string rule(query_name(x.query));
    switch (x.query) {
      case QueryKind::GetBalance:
        check_child(e, 0, Ty::addr());
        return Ty::tz();
      case QueryKind::GetStatus: {
        Ty arg = synth_child(e, 0);
        if (!arg.is(TyKind::Oph)) fail(rule, "argument must be an operation hash", "Oph(_,_)", arg.to_string(), 0);
        return Ty::status();
      }
      case QueryKind::GetStorage: {
        Ty arg = synth_child(e, 0);
        if (!arg.is(TyKind::Contract)) {
          fail(rule, "argument must be a contract handle", "Contract(_,_)", arg.to_string(), 0);
        }
        return arg.second();
      }
      case QueryKind::GetContract: {
        Ty arg = synth_child(e, 0);
        if (!arg.is(TyKind::Oph)) fail(rule, "argument must be an operation hash", "Oph(_,_)", arg.to_string(), 0);
        if (arg.first().is(TyKind::No) || arg.second().is(TyKind::No)) {
          fail("get_contract-no", "get_contract needs an origination hash (parameters must not be No)",
               "Oph(t,u) with t,u != No", arg.to_string(), 0);
        }
        return Ty::contract(arg.first(), arg.second());
      }
    }
    fail(rule, "unknown query");
  }

  TyEnv env_;
  const AmbientInfo& amb_;
  std::vector<std::string> path_;
};

}  // namespace

Ty type_of(const TyEnv& env, const ExprPtr& e, const AmbientInfo& ambient) {
  return Checker(env, ambient).synth(e);
}

void check_type(const TyEnv& env, const ExprPtr& e, const Ty& expected, const AmbientInfo& ambient) {
  Checker(env, ambient).check(e, expected);
}

std::optional<TypeError> program_type_error(const ExprPtr& program, const AmbientInfo& ambient) {
  try {
    check_type({}, program, Ty::unit(), ambient);
    return std::nullopt;
  } catch (const TypeError& err) {
    return err;
  }
}

ContractTyEnv delta_of(const Blockchain& b) {
  ContractTyEnv delta;
  for (const auto& [puh, c] : b.contractors) {
    try {
      delta.emplace(puh, type_code(c.code));
    } catch (const CodeTypeError&) {
      // Left out, so type_blockchain reports the contract.
    }
  }
  return delta;
}

std::optional<std::string> blockchain_type_error(const ContractTyEnv& delta, const Blockchain& b) {
  if (delta.size() != b.contractors.size()) return "dom(delta) differs from dom(contractors)";
  for (const auto& [puh, t] : delta) {
    auto it = b.contractors.find(puh);
    if (it == b.contractors.end()) return "delta maps " + puh + " which is not a contractor";
    if (!t.is(TyKind::Pair)) return "delta(" + puh + ") is not a pair type";
    try {
      if (!(type_code(it->second.code) == t)) return "code of " + puh + " does not type at " + t.to_string();
    } catch (const CodeTypeError& err) {
      return "code of " + puh + " is ill-typed: " + err.what();
    }
    if (!type_stored_value(it->second.storage, t.second())) {
      return "storage of " + puh + " is not a value of " + t.second().to_string();
    }
  }
  return std::nullopt;
}

bool type_blockchain(const ContractTyEnv& delta, const Blockchain& b) {
  return !blockchain_type_error(delta, b).has_value();
}

std::optional<std::string> config_type_error(const ContractTyEnv& delta, const Config& cfg,
                                             TypingMode mode) {
  if (auto err = blockchain_type_error(delta, cfg.chain)) return err;
  AmbientInfo ambient{&cfg.chain, &delta, mode};
  for (std::size_t n = 0; n < cfg.nodes.size(); ++n) {
    for (std::size_t p = 0; p < cfg.nodes[n].programs.size(); ++p) {
      if (auto err = program_type_error(cfg.nodes[n].programs[p], ambient)) {
        return "node " + std::to_string(n) + " program " + std::to_string(p) + ": " + err->what();
      }
    }
  }
  return std::nullopt;
}

bool type_config(const ContractTyEnv& delta, const Config& cfg, TypingMode mode) {
  return !config_type_error(delta, cfg, mode).has_value();
}

bool canonical_form_ok(const ExprPtr& v, const Ty& t, const std::vector<std::string>& accounts,
                       const Blockchain& chain) {
  // Local accounts are registered managers by well-formedness; values of
  // type Puk may also name other nodes' accounts, so membership in the
  // managers is what is checked.
  (void)accounts;
  const Expr& x = *v;
  auto is_manager = [&] { return x.kind == ExprKind::Puk && chain.managers.count(x.text) > 0; };
  auto is_contractor = [&] { return x.kind == ExprKind::Puh && chain.contractors.count(x.text) > 0; };
  switch (t.kind()) {
    case TyKind::Bool: return x.kind == ExprKind::Bool;
    case TyKind::Int: return x.kind == ExprKind::Int;
    case TyKind::Tz: return x.kind == ExprKind::Tz && x.number >= 0;
    case TyKind::Unit: return x.kind == ExprKind::Unit;
    case TyKind::String: return x.kind == ExprKind::String;
    case TyKind::Puk: return is_manager();
    case TyKind::Puh: return is_contractor();
    case TyKind::Addr: return is_manager() || is_contractor();
    case TyKind::Contract: {
      if (!is_contractor()) return false;
      try {
        return type_code(chain.contractors.at(x.text).code) == Ty::pair(t.first(), t.second());
      } catch (const CodeTypeError&) {
        return false;
      }
    }
    case TyKind::Status:
      return x.kind == ExprKind::Pending || x.kind == ExprKind::Timeout ||
             (x.kind == ExprKind::Included && x.kids[0]->kind == ExprKind::Int);
    case TyKind::Exception: return x.kind == ExprKind::Error || x.kind == ExprKind::FailWith;
    case TyKind::Oph: {
      if (x.kind != ExprKind::Oph) return false;
      auto it = chain.pool.find(x.text);
      if (it == chain.pool.end()) return false;
      const Operation& op = it->second.op;
      if (op.kind == OpKind::Transfer) return t.first().is(TyKind::No) && t.second().is(TyKind::No);
      try {
        return type_code(op.code) == Ty::pair(t.first(), t.second());
      } catch (const CodeTypeError&) {
        return false;
      }
    }
    case TyKind::Code: {
      if (x.kind != ExprKind::Code) return false;
      try {
        CodeRef ref = parse_code_header(x.text);
        return ref.param_ty == t.first() && ref.storage_ty == t.second();
      } catch (const CodeTypeError&) {
        return false;
      }
    }
    case TyKind::Arrow:
      return x.kind == ExprKind::Lambda;
    case TyKind::Pair:
      return x.kind == ExprKind::Pair && canonical_form_ok(x.kids[0], t.first(), accounts, chain) &&
             canonical_form_ok(x.kids[1], t.second(), accounts, chain);
    case TyKind::List:
      if (x.kind == ExprKind::Nil) return true;
      return x.kind == ExprKind::Cons && canonical_form_ok(x.kids[0], t.first(), accounts, chain) &&
             canonical_form_ok(x.kids[1], t, accounts, chain);
    case TyKind::Sum:
      if (x.kind == ExprKind::Left) return canonical_form_ok(x.kids[0], t.first(), accounts, chain);
      return x.kind == ExprKind::Right && canonical_form_ok(x.kids[0], t.second(), accounts, chain);
    case TyKind::Option:
      if (x.kind == ExprKind::None) return true;
      return x.kind == ExprKind::Some && canonical_form_ok(x.kids[0], t.first(), accounts, chain);
    case TyKind::No:
      return false;
  }
  return false;
}

namespace {

bool irrefutable(const Pattern& p) {
  switch (p.kind) {
    case PatternKind::Var:
    case PatternKind::Wildcard:
      return true;
    case PatternKind::Pair:
      return irrefutable(p.kids[0]) && irrefutable(p.kids[1]);
    default:
      return false;
  }
}

bool arms_cover(const std::vector<MatchArm>& arms) {
  bool left = false, right = false, some = false, none = false, nil = false, cons = false;
  bool yes = false, no = false;
  for (const auto& arm : arms) {
    const Pattern& p = arm.pattern;
    if (irrefutable(p)) return true;
    const bool inner = !p.kids.empty() && std::all_of(p.kids.begin(), p.kids.end(), irrefutable);
    switch (p.kind) {
      case PatternKind::Left: left = left || inner; break;
      case PatternKind::Right: right = right || inner; break;
      case PatternKind::Some: some = some || inner; break;
      case PatternKind::None: none = true; break;
      case PatternKind::Nil: nil = true; break;
      case PatternKind::Cons: cons = cons || inner; break;
      case PatternKind::Const:
        if (p.literal->kind == ExprKind::Bool) (p.literal->number ? yes : no) = true;
        break;
      default: break;
    }
  }
  return (left && right) || (some && none) || (nil && cons) || (yes && no);
}

void lint(const ExprPtr& e, const std::string& path, std::vector<std::string>& out) {
  if (e->kind == ExprKind::Match && !arms_cover(e->arms)) out.push_back(path.empty() ? "/" : path);
  for (std::size_t i = 0; i < e->kids.size(); ++i) lint(e->kids[i], path + "/" + std::to_string(i), out);
  for (std::size_t i = 0; i < e->arms.size(); ++i) {
    lint(e->arms[i].body, path + "/arm" + std::to_string(i), out);
  }
}

}  // namespace

std::vector<std::string> exhaustiveness_warnings(const ExprPtr& e) {
  std::vector<std::string> out;
  lint(e, "", out);
  return out;
}

}  // namespace chainsem
