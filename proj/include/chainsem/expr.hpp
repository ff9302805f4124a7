#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chainsem/types.hpp"
#include "json.hpp"

namespace chainsem {

enum class ExprKind {
  // constants
  Int,
  String,
  Oph,
  Puh,
  Puk,
  Code,
  Tz,
  Unit,
  Bool,
  Fix,
  // status values
  Pending,
  Timeout,
  Included,
  // exception values
  Error,
  FailWith,
  // compound
  Var,
  Lambda,
  App,
  Add,
  Lt,
  Eq,
  And,
  Or,
  Not,
  Pair,
  Nil,
  Cons,
  Left,
  Right,
  Some,
  None,
  Match,
  Raise,
  Try,
  Cast,
  Query,
  Transfer,
  Originate,
};

/// Eight chain-level exception constants plus two runtime faults
/// (non-exhaustive match, integer overflow). All are catchable.
enum class ErrorKind { Prg, Bal, Count, Fee, Puk, Puh, Arg, Init, Match, Overflow };

enum class QueryKind { GetBalance, GetStatus, GetStorage, GetContract };

std::string_view error_name(ErrorKind kind);  // "errP", "errB", ...
std::optional<ErrorKind> error_from_name(std::string_view name);
std::string_view query_name(QueryKind kind);  // "get_balance", ...
std::optional<QueryKind> query_from_name(std::string_view name);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class PatternKind {
  Var,
  Wildcard,
  Const,  // literal compared by equality (int, string, unit, bool, status, error)
  Pair,
  Nil,
  Cons,
  Left,
  Right,
  Some,
  None,
  Included,
  FailWith,
};

struct Pattern {
  PatternKind kind = PatternKind::Wildcard;
  std::string name;  // Var
  ExprPtr literal;   // Const
  std::vector<Pattern> kids;

  static Pattern var(std::string name);
  static Pattern wildcard();
  static Pattern constant(ExprPtr literal);
  static Pattern pair(Pattern a, Pattern b);
  static Pattern nil();
  static Pattern cons(Pattern head, Pattern tail);
  static Pattern left(Pattern p);
  static Pattern right(Pattern p);
  static Pattern some(Pattern p);
  static Pattern none();
  static Pattern included(Pattern p);
  static Pattern failwith(Pattern message);

  bool binds(std::string_view x) const;
  void collect_vars(std::vector<std::string>& out) const;
};

struct MatchArm {
  Pattern pattern;
  ExprPtr body;
};

/// One node of the expression calculus. Nodes are immutable once built and
/// shared between program states.
///
/// Child layout by kind:
///   App            fn, arg
///   Add/Lt/Eq/And/Or  lhs, rhs
///   Not/Left/Right/Some/Included/Raise/Cast/Query  operand
///   Pair/Cons      first, second
///   Match          scrutinee (arms in `arms`)
///   Try            body, handler
///   Transfer       amount, sender, target, param, fee
///   Originate      amount, sender, code, init, fee
struct Expr {
  ExprKind kind = ExprKind::Unit;
  std::int64_t number = 0;  // Int, Tz, Bool
  std::string text;         // Var, Lambda binder, String, hashes, code script, FailWith
  ErrorKind error = ErrorKind::Prg;
  QueryKind query = QueryKind::GetBalance;
  Ty ty;   // Lambda parameter type, Cast source type
  Ty ty2;  // Cast target type
  std::vector<ExprPtr> kids;
  std::vector<MatchArm> arms;
};

/// Constructors for expression trees.
namespace ex {

ExprPtr integer(std::int64_t n);
ExprPtr str(std::string s);
ExprPtr oph(std::string hash);
ExprPtr puh(std::string hash);
ExprPtr puk(std::string key);
ExprPtr code(std::string script);
ExprPtr tz(std::int64_t amount);
ExprPtr unit();
ExprPtr boolean(bool b);
ExprPtr fix();
ExprPtr pending();
ExprPtr timeout();
ExprPtr included(ExprPtr e);
ExprPtr error(ErrorKind kind);
ExprPtr failwith(std::string message);
ExprPtr var(std::string name);
ExprPtr lam(std::string x, Ty param, ExprPtr body);
ExprPtr app(ExprPtr fn, ExprPtr arg);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr lt(ExprPtr a, ExprPtr b);
ExprPtr eq(ExprPtr a, ExprPtr b);
ExprPtr and_(ExprPtr a, ExprPtr b);
ExprPtr or_(ExprPtr a, ExprPtr b);
ExprPtr not_(ExprPtr a);
ExprPtr pair(ExprPtr a, ExprPtr b);
ExprPtr nil();
ExprPtr cons(ExprPtr head, ExprPtr tail);
ExprPtr left(ExprPtr e);
ExprPtr right(ExprPtr e);
ExprPtr some(ExprPtr e);
ExprPtr none();
ExprPtr match(ExprPtr scrutinee, std::vector<MatchArm> arms);
ExprPtr raise(ExprPtr e);
ExprPtr try_(ExprPtr body, ExprPtr handler);
ExprPtr cast(ExprPtr e, Ty from, Ty to);
ExprPtr query(QueryKind kind, ExprPtr e);
ExprPtr transfer(ExprPtr amount, ExprPtr sender, ExprPtr target, ExprPtr param, ExprPtr fee);
ExprPtr originate(ExprPtr amount, ExprPtr sender, ExprPtr code, ExprPtr init, ExprPtr fee);

// Derived forms, all expanded into the core calculus.
ExprPtr let(std::string x, Ty t, ExprPtr bound, ExprPtr body);
ExprPtr seq(Ty first_type, ExprPtr first, ExprPtr second);
ExprPtr if_(ExprPtr cond, ExprPtr then_branch, ExprPtr else_branch);
/// `fix (λself:τ. λx:arg. body)` of type τ = arg → result.
ExprPtr rec(std::string self, std::string x, Ty arg, Ty result, ExprPtr body);
/// Identity on unit: wall-clock waiting has no counterpart in the model.
ExprPtr sleep();

}  // namespace ex

bool is_value(const Expr& e);
bool is_value(const ExprPtr& e);
bool is_closed(const ExprPtr& e);
std::vector<std::string> free_vars(const ExprPtr& e);

/// Structural equality of whole trees.
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

/// e[v/x]. `v` must be closed, so no capture can occur; binders that
/// shadow `x` stop the substitution.
ExprPtr substitute(const ExprPtr& e, std::string_view x, const ExprPtr& v);

using Bindings = std::vector<std::pair<std::string, ExprPtr>>;

/// First-order structural matching; nullopt when shapes disagree.
std::optional<Bindings> match_pattern(const Pattern& p, const ExprPtr& v);

// --- evaluation contexts ----------------------------------------------------

/// Child indices from the root to the hole.
using Path = std::vector<std::uint8_t>;

enum class RedexKind {
  AlreadyValue,
  Pure,           // reducible by step_pure
  BlockchainOp,   // transfer/originate with value arguments
  Query,          // query on a value
  DowncastProbe,  // cast v τ υ with υ ⊲ τ
  Uncaught,       // raise v with no enclosing try
  Stuck,
};

std::string_view redex_kind_name(RedexKind kind);

struct Decomposition {
  RedexKind kind = RedexKind::AlreadyValue;
  Path path;          // location of the redex inside the program
  ExprPtr redex;      // the subterm at `path`
  ExprPtr exception;  // raised value for Pure exception propagation and Uncaught
};

/// Unique left-to-right decomposition E[redex].
Decomposition decompose(const ExprPtr& e);

const ExprPtr& subterm_at(const ExprPtr& e, const Path& path);
/// Rebuilds `e` with the subterm at `path` replaced by `replacement`.
ExprPtr plug(const ExprPtr& e, const Path& path, const ExprPtr& replacement);

enum class PureOutcome { Stepped, NoPureStep, Uncaught, Stuck };

struct PureStep {
  PureOutcome outcome = PureOutcome::NoPureStep;
  ExprPtr next;       // Stepped
  ExprPtr exception;  // Uncaught
};

/// One ⇝ step. Blockchain operations, queries and downcasts are left to the
/// node runtime and report NoPureStep.
PureStep step_pure(const ExprPtr& e);

/// Contractum of a Pure redex (already located by `decompose`).
ExprPtr contract_pure_redex(const Decomposition& d);

// --- serialization ----------------------------------------------------------

nlohmann::json expr_to_json(const ExprPtr& e);
ExprPtr expr_from_json(const nlohmann::json& j);
nlohmann::json pattern_to_json(const Pattern& p);
Pattern pattern_from_json(const nlohmann::json& j);

/// Compact human-readable rendering for traces and diagnostics.
std::string to_string(const ExprPtr& e);
std::string to_string(const Pattern& p);

/// Calls `fn(kind, text)` for every oph/puh/puk literal in `e`.
template <class Fn>
void for_each_hash_literal(const ExprPtr& e, Fn&& fn) {
  switch (e->kind) {
    case ExprKind::Oph:
    case ExprKind::Puh:
    case ExprKind::Puk:
      fn(e->kind, e->text);
      return;
    default:
      break;
  }
  for (const auto& k : e->kids) for_each_hash_literal(k, fn);
  for (const auto& arm : e->arms) {
    for_each_hash_literal(arm.body, fn);
    if (arm.pattern.kind == PatternKind::Const) for_each_hash_literal(arm.pattern.literal, fn);
  }
}

std::size_t expr_size(const ExprPtr& e);

}  // namespace chainsem
