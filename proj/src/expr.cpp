#include "chainsem/expr.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>

namespace chainsem {

namespace {

constexpr std::array<std::string_view, 10> kErrorNames = {
    "errP", "errB", "errC", "errF", "errK", "errH", "errA", "errI", "errM", "errO",
};

constexpr std::array<std::string_view, 4> kQueryNames = {
    "get_balance", "get_status", "get_storage", "get_contract",
};

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

ExprPtr make_node(ExprKind kind, std::vector<ExprPtr> kids = {}) {
  Expr e;
  e.kind = kind;
  e.kids = std::move(kids);
  return make(std::move(e));
}

ExprPtr make_text(ExprKind kind, std::string text) {
  Expr e;
  e.kind = kind;
  e.text = std::move(text);
  return make(std::move(e));
}

ExprPtr make_number(ExprKind kind, std::int64_t n) {
  Expr e;
  e.kind = kind;
  e.number = n;
  return make(std::move(e));
}

}  // namespace

std::string_view error_name(ErrorKind kind) { return kErrorNames[static_cast<std::size_t>(kind)]; }

std::optional<ErrorKind> error_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kErrorNames.size(); ++i) {
    if (kErrorNames[i] == name) return static_cast<ErrorKind>(i);
  }
  return std::nullopt;
}

std::string_view query_name(QueryKind kind) { return kQueryNames[static_cast<std::size_t>(kind)]; }

std::optional<QueryKind> query_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kQueryNames.size(); ++i) {
    if (kQueryNames[i] == name) return static_cast<QueryKind>(i);
  }
  return std::nullopt;
}

// --- patterns -----------------------------------------------------------------

Pattern Pattern::var(std::string name) {
  Pattern p;
  p.kind = PatternKind::Var;
  p.name = std::move(name);
  return p;
}
Pattern Pattern::wildcard() { return Pattern{}; }
Pattern Pattern::constant(ExprPtr literal) {
  Pattern p;
  p.kind = PatternKind::Const;
  p.literal = std::move(literal);
  return p;
}

namespace {
Pattern pattern_node(PatternKind kind, std::vector<Pattern> kids = {}) {
  Pattern p;
  p.kind = kind;
  p.kids = std::move(kids);
  return p;
}
}  // namespace

Pattern Pattern::pair(Pattern a, Pattern b) {
  return pattern_node(PatternKind::Pair, {std::move(a), std::move(b)});
}
Pattern Pattern::nil() { return pattern_node(PatternKind::Nil); }
Pattern Pattern::cons(Pattern head, Pattern tail) {
  return pattern_node(PatternKind::Cons, {std::move(head), std::move(tail)});
}
Pattern Pattern::left(Pattern p) { return pattern_node(PatternKind::Left, {std::move(p)}); }
Pattern Pattern::right(Pattern p) { return pattern_node(PatternKind::Right, {std::move(p)}); }
Pattern Pattern::some(Pattern p) { return pattern_node(PatternKind::Some, {std::move(p)}); }
Pattern Pattern::none() { return pattern_node(PatternKind::None); }
Pattern Pattern::included(Pattern p) {
  return pattern_node(PatternKind::Included, {std::move(p)});
}
Pattern Pattern::failwith(Pattern message) {
  return pattern_node(PatternKind::FailWith, {std::move(message)});
}

bool Pattern::binds(std::string_view x) const {
  if (kind == PatternKind::Var) return name == x;
  return std::any_of(kids.begin(), kids.end(), [&](const Pattern& k) { return k.binds(x); });
}

void Pattern::collect_vars(std::vector<std::string>& out) const {
  if (kind == PatternKind::Var) out.push_back(name);
  for (const auto& k : kids) k.collect_vars(out);
}

// --- constructors ---------------------------------------------------------------

namespace ex {

ExprPtr integer(std::int64_t n) { return make_number(ExprKind::Int, n); }
ExprPtr str(std::string s) { return make_text(ExprKind::String, std::move(s)); }
ExprPtr oph(std::string hash) { return make_text(ExprKind::Oph, std::move(hash)); }
ExprPtr puh(std::string hash) { return make_text(ExprKind::Puh, std::move(hash)); }
ExprPtr puk(std::string key) { return make_text(ExprKind::Puk, std::move(key)); }
ExprPtr code(std::string script) { return make_text(ExprKind::Code, std::move(script)); }
ExprPtr tz(std::int64_t amount) {
  if (amount < 0) throw std::invalid_argument("token amounts are non-negative");
  return make_number(ExprKind::Tz, amount);
}
ExprPtr unit() {
  static const ExprPtr u = make_node(ExprKind::Unit);
  return u;
}
ExprPtr boolean(bool b) { return make_number(ExprKind::Bool, b ? 1 : 0); }
ExprPtr fix() { return make_node(ExprKind::Fix); }
ExprPtr pending() { return make_node(ExprKind::Pending); }
ExprPtr timeout() { return make_node(ExprKind::Timeout); }
ExprPtr included(ExprPtr e) { return make_node(ExprKind::Included, {std::move(e)}); }
ExprPtr error(ErrorKind kind) {
  Expr e;
  e.kind = ExprKind::Error;
  e.error = kind;
  return make(std::move(e));
}
ExprPtr failwith(std::string message) { return make_text(ExprKind::FailWith, std::move(message)); }
ExprPtr var(std::string name) { return make_text(ExprKind::Var, std::move(name)); }
ExprPtr lam(std::string x, Ty param, ExprPtr body) {
  Expr e;
  e.kind = ExprKind::Lambda;
  e.text = std::move(x);
  e.ty = std::move(param);
  e.kids = {std::move(body)};
  return make(std::move(e));
}
ExprPtr app(ExprPtr fn, ExprPtr arg) { return make_node(ExprKind::App, {std::move(fn), std::move(arg)}); }
ExprPtr add(ExprPtr a, ExprPtr b) { return make_node(ExprKind::Add, {std::move(a), std::move(b)}); }
ExprPtr lt(ExprPtr a, ExprPtr b) { return make_node(ExprKind::Lt, {std::move(a), std::move(b)}); }
ExprPtr eq(ExprPtr a, ExprPtr b) { return make_node(ExprKind::Eq, {std::move(a), std::move(b)}); }
ExprPtr and_(ExprPtr a, ExprPtr b) { return make_node(ExprKind::And, {std::move(a), std::move(b)}); }
ExprPtr or_(ExprPtr a, ExprPtr b) { return make_node(ExprKind::Or, {std::move(a), std::move(b)}); }
ExprPtr not_(ExprPtr a) { return make_node(ExprKind::Not, {std::move(a)}); }
ExprPtr pair(ExprPtr a, ExprPtr b) { return make_node(ExprKind::Pair, {std::move(a), std::move(b)}); }
ExprPtr nil() { return make_node(ExprKind::Nil); }
ExprPtr cons(ExprPtr head, ExprPtr tail) {
  return make_node(ExprKind::Cons, {std::move(head), std::move(tail)});
}
ExprPtr left(ExprPtr e) { return make_node(ExprKind::Left, {std::move(e)}); }
ExprPtr right(ExprPtr e) { return make_node(ExprKind::Right, {std::move(e)}); }
ExprPtr some(ExprPtr e) { return make_node(ExprKind::Some, {std::move(e)}); }
ExprPtr none() { return make_node(ExprKind::None); }
ExprPtr match(ExprPtr scrutinee, std::vector<MatchArm> arms) {
  Expr e;
  e.kind = ExprKind::Match;
  e.kids = {std::move(scrutinee)};
  e.arms = std::move(arms);
  return make(std::move(e));
}
ExprPtr raise(ExprPtr e) { return make_node(ExprKind::Raise, {std::move(e)}); }
ExprPtr try_(ExprPtr body, ExprPtr handler) {
  return make_node(ExprKind::Try, {std::move(body), std::move(handler)});
}
ExprPtr cast(ExprPtr operand, Ty from, Ty to) {
  Expr e;
  e.kind = ExprKind::Cast;
  e.ty = std::move(from);
  e.ty2 = std::move(to);
  e.kids = {std::move(operand)};
  return make(std::move(e));
}
ExprPtr query(QueryKind kind, ExprPtr operand) {
  Expr e;
  e.kind = ExprKind::Query;
  e.query = kind;
  e.kids = {std::move(operand)};
  return make(std::move(e));
}
ExprPtr transfer(ExprPtr amount, ExprPtr sender, ExprPtr target, ExprPtr param, ExprPtr fee) {
  return make_node(ExprKind::Transfer, {std::move(amount), std::move(sender), std::move(target),
                                        std::move(param), std::move(fee)});
}
ExprPtr originate(ExprPtr amount, ExprPtr sender, ExprPtr code, ExprPtr init, ExprPtr fee) {
  return make_node(ExprKind::Originate, {std::move(amount), std::move(sender), std::move(code),
                                         std::move(init), std::move(fee)});
}

ExprPtr let(std::string x, Ty t, ExprPtr bound, ExprPtr body) {
  return app(lam(std::move(x), std::move(t), std::move(body)), std::move(bound));
}

ExprPtr seq(Ty first_type, ExprPtr first, ExprPtr second) {
  return let("_", std::move(first_type), std::move(first), std::move(second));
}

ExprPtr if_(ExprPtr cond, ExprPtr then_branch, ExprPtr else_branch) {
  return match(std::move(cond), {{Pattern::constant(boolean(true)), std::move(then_branch)},
                                 {Pattern::constant(boolean(false)), std::move(else_branch)}});
}

ExprPtr rec(std::string self, std::string x, Ty arg, Ty result, ExprPtr body) {
  Ty fn = Ty::arrow(arg, std::move(result));
  return app(fix(), lam(std::move(self), fn, lam(std::move(x), std::move(arg), std::move(body))));
}

ExprPtr sleep() { return lam("_", Ty::unit(), unit()); }

}  // namespace ex

// --- values and variables -----------------------------------------------------

bool is_value(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Int:
    case ExprKind::String:
    case ExprKind::Oph:
    case ExprKind::Puh:
    case ExprKind::Puk:
    case ExprKind::Code:
    case ExprKind::Tz:
    case ExprKind::Unit:
    case ExprKind::Bool:
    case ExprKind::Fix:
    case ExprKind::Pending:
    case ExprKind::Timeout:
    case ExprKind::Error:
    case ExprKind::FailWith:
    case ExprKind::Lambda:
    case ExprKind::Nil:
    case ExprKind::None:
      return true;
    case ExprKind::Included:
    case ExprKind::Left:
    case ExprKind::Right:
    case ExprKind::Some:
      return is_value(*e.kids[0]);
    case ExprKind::Pair:
    case ExprKind::Cons:
      return is_value(*e.kids[0]) && is_value(*e.kids[1]);
    default:
      return false;
  }
}

bool is_value(const ExprPtr& e) { return is_value(*e); }

namespace {

void free_vars_impl(const ExprPtr& e, std::vector<std::string>& bound,
                    std::vector<std::string>& out) {
  switch (e->kind) {
    case ExprKind::Var:
      if (std::find(bound.begin(), bound.end(), e->text) == bound.end() &&
          std::find(out.begin(), out.end(), e->text) == out.end()) {
        out.push_back(e->text);
      }
      return;
    case ExprKind::Lambda:
      bound.push_back(e->text);
      free_vars_impl(e->kids[0], bound, out);
      bound.pop_back();
      return;
    case ExprKind::Match: {
      free_vars_impl(e->kids[0], bound, out);
      for (const auto& arm : e->arms) {
        const std::size_t mark = bound.size();
        arm.pattern.collect_vars(bound);
        free_vars_impl(arm.body, bound, out);
        bound.resize(mark);
      }
      return;
    }
    default:
      for (const auto& k : e->kids) free_vars_impl(k, bound, out);
  }
}

}  // namespace

std::vector<std::string> free_vars(const ExprPtr& e) {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  free_vars_impl(e, bound, out);
  return out;
}

bool is_closed(const ExprPtr& e) { return free_vars(e).empty(); }

namespace {

bool pattern_equal(const Pattern& a, const Pattern& b) {
  if (a.kind != b.kind || a.name != b.name || a.kids.size() != b.kids.size()) return false;
  if (a.kind == PatternKind::Const && !expr_equal(a.literal, b.literal)) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i) {
    if (!pattern_equal(a.kids[i], b.kids[i])) return false;
  }
  return true;
}

}  // namespace

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->number != b->number || a->text != b->text) return false;
  if (a->kind == ExprKind::Error && a->error != b->error) return false;
  if (a->kind == ExprKind::Query && a->query != b->query) return false;
  if (a->kind == ExprKind::Lambda && !(a->ty == b->ty)) return false;
  if (a->kind == ExprKind::Cast && !(a->ty == b->ty && a->ty2 == b->ty2)) return false;
  if (a->kids.size() != b->kids.size() || a->arms.size() != b->arms.size()) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i) {
    if (!expr_equal(a->kids[i], b->kids[i])) return false;
  }
  for (std::size_t i = 0; i < a->arms.size(); ++i) {
    if (!pattern_equal(a->arms[i].pattern, b->arms[i].pattern)) return false;
    if (!expr_equal(a->arms[i].body, b->arms[i].body)) return false;
  }
  return true;
}

ExprPtr substitute(const ExprPtr& e, std::string_view x, const ExprPtr& v) {
  switch (e->kind) {
    case ExprKind::Var:
      return e->text == x ? v : e;
    case ExprKind::Lambda:
      if (e->text == x) return e;
      break;
    default:
      if (e->kids.empty() && e->arms.empty()) return e;
      break;
  }
  bool changed = false;
  std::vector<ExprPtr> kids;
  kids.reserve(e->kids.size());
  for (const auto& k : e->kids) {
    kids.push_back(substitute(k, x, v));
    changed = changed || kids.back() != k;
  }
  std::vector<MatchArm> arms;
  arms.reserve(e->arms.size());
  for (const auto& arm : e->arms) {
    if (arm.pattern.binds(x)) {
      arms.push_back(arm);
      continue;
    }
    arms.push_back({arm.pattern, substitute(arm.body, x, v)});
    changed = changed || arms.back().body != arm.body;
  }
  if (!changed) return e;
  Expr copy = *e;
  copy.kids = std::move(kids);
  copy.arms = std::move(arms);
  return make(std::move(copy));
}

namespace {

bool match_into(const Pattern& p, const ExprPtr& v, Bindings& out) {
  switch (p.kind) {
    case PatternKind::Var:
      out.emplace_back(p.name, v);
      return true;
    case PatternKind::Wildcard:
      return true;
    case PatternKind::Const:
      return expr_equal(p.literal, v);
    case PatternKind::Pair:
      return v->kind == ExprKind::Pair && match_into(p.kids[0], v->kids[0], out) &&
             match_into(p.kids[1], v->kids[1], out);
    case PatternKind::Nil:
      return v->kind == ExprKind::Nil;
    case PatternKind::Cons:
      return v->kind == ExprKind::Cons && match_into(p.kids[0], v->kids[0], out) &&
             match_into(p.kids[1], v->kids[1], out);
    case PatternKind::Left:
      return v->kind == ExprKind::Left && match_into(p.kids[0], v->kids[0], out);
    case PatternKind::Right:
      return v->kind == ExprKind::Right && match_into(p.kids[0], v->kids[0], out);
    case PatternKind::Some:
      return v->kind == ExprKind::Some && match_into(p.kids[0], v->kids[0], out);
    case PatternKind::None:
      return v->kind == ExprKind::None;
    case PatternKind::Included:
      return v->kind == ExprKind::Included && match_into(p.kids[0], v->kids[0], out);
    case PatternKind::FailWith:
      return v->kind == ExprKind::FailWith && match_into(p.kids[0], ex::str(v->text), out);
  }
  return false;
}

}  // namespace

std::optional<Bindings> match_pattern(const Pattern& p, const ExprPtr& v) {
  Bindings out;
  if (!match_into(p, v, out)) return std::nullopt;
  return out;
}

// --- decomposition --------------------------------------------------------------

std::string_view redex_kind_name(RedexKind kind) {
  switch (kind) {
    case RedexKind::AlreadyValue: return "AlreadyValue";
    case RedexKind::Pure: return "Pure";
    case RedexKind::BlockchainOp: return "BlockchainOp";
    case RedexKind::Query: return "Query";
    case RedexKind::DowncastProbe: return "DowncastProbe";
    case RedexKind::Uncaught: return "Uncaught";
    case RedexKind::Stuck: return "Stuck";
  }
  return "?";
}

namespace {

/// Number of leading children that an evaluation context may enter.
std::size_t evaluated_children(const Expr& e) {
  switch (e.kind) {
    case ExprKind::App:
    case ExprKind::Add:
    case ExprKind::Lt:
    case ExprKind::Eq:
    case ExprKind::And:
    case ExprKind::Or:
    case ExprKind::Pair:
    case ExprKind::Cons:
      return 2;
    case ExprKind::Not:
    case ExprKind::Left:
    case ExprKind::Right:
    case ExprKind::Some:
    case ExprKind::Included:
    case ExprKind::Match:
    case ExprKind::Raise:
    case ExprKind::Try:
    case ExprKind::Cast:
    case ExprKind::Query:
      return 1;
    case ExprKind::Transfer:
    case ExprKind::Originate:
      return 5;
    default:
      return 0;
  }
}

bool both(const Expr& e, ExprKind k) {
  return e.kids[0]->kind == k && e.kids[1]->kind == k;
}

/// Classifies a node all of whose evaluated children are values.
RedexKind classify(const Expr& e) {
  switch (e.kind) {
    case ExprKind::App: {
      const Expr& fn = *e.kids[0];
      if (fn.kind == ExprKind::Lambda) return RedexKind::Pure;
      if (fn.kind == ExprKind::Fix && e.kids[1]->kind == ExprKind::Lambda) return RedexKind::Pure;
      return RedexKind::Stuck;
    }
    case ExprKind::Add:
    case ExprKind::Lt:
      return both(e, ExprKind::Int) || both(e, ExprKind::Tz) ? RedexKind::Pure : RedexKind::Stuck;
    case ExprKind::And:
    case ExprKind::Or:
      return both(e, ExprKind::Bool) ? RedexKind::Pure : RedexKind::Stuck;
    case ExprKind::Not:
      return e.kids[0]->kind == ExprKind::Bool ? RedexKind::Pure : RedexKind::Stuck;
    case ExprKind::Eq:
    case ExprKind::Match:
    case ExprKind::Try:
      return RedexKind::Pure;
    case ExprKind::Cast:
      switch (cast_allowed(e.ty, e.ty2)) {
        case CastKind::Upcast: return RedexKind::Pure;
        case CastKind::Downcast: return RedexKind::DowncastProbe;
        case CastKind::Forbidden: return RedexKind::Stuck;
      }
      return RedexKind::Stuck;
    case ExprKind::Query:
      return RedexKind::Query;
    case ExprKind::Transfer:
    case ExprKind::Originate:
      return RedexKind::BlockchainOp;
    default:
      return RedexKind::Stuck;
  }
}

}  // namespace

Decomposition decompose(const ExprPtr& root) {
  Decomposition d;
  if (is_value(root)) {
    d.kind = RedexKind::AlreadyValue;
    d.redex = root;
    return d;
  }
  // Path prefix lengths at which an enclosing `try` sits.
  std::vector<std::size_t> tries;
  std::vector<const ExprPtr*> nodes{&root};
  const ExprPtr* cur = &root;
  for (;;) {
    const Expr& e = **cur;
    const std::size_t n = evaluated_children(e);
    std::size_t next = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_value(e.kids[i])) {
        next = i;
        break;
      }
    }
    if (next < n) {
      if (e.kind == ExprKind::Try) tries.push_back(d.path.size());
      d.path.push_back(static_cast<std::uint8_t>(next));
      cur = &e.kids[next];
      nodes.push_back(cur);
      continue;
    }
    if (e.kind == ExprKind::Raise) {
      d.exception = e.kids[0];
      if (tries.empty()) {
        d.kind = RedexKind::Uncaught;
        d.redex = *cur;
        return d;
      }
      const std::size_t depth = tries.back();
      d.path.resize(depth);
      d.kind = RedexKind::Pure;
      d.redex = *nodes[depth];
      return d;
    }
    d.kind = (e.kind == ExprKind::Var) ? RedexKind::Stuck : classify(e);
    d.redex = *cur;
    return d;
  }
}

const ExprPtr& subterm_at(const ExprPtr& e, const Path& path) {
  const ExprPtr* cur = &e;
  for (auto i : path) cur = &(*cur)->kids.at(i);
  return *cur;
}

namespace {

ExprPtr plug_from(const ExprPtr& e, const Path& path, std::size_t depth, const ExprPtr& r) {
  if (depth == path.size()) return r;
  Expr copy = *e;
  const auto i = path[depth];
  copy.kids.at(i) = plug_from(e->kids[i], path, depth + 1, r);
  return make(std::move(copy));
}

std::optional<std::int64_t> checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) return std::nullopt;
  return out;
}

}  // namespace

ExprPtr plug(const ExprPtr& e, const Path& path, const ExprPtr& replacement) {
  return plug_from(e, path, 0, replacement);
}

ExprPtr contract_pure_redex(const Decomposition& d) {
  const Expr& e = *d.redex;
  switch (e.kind) {
    case ExprKind::App: {
      const Expr& fn = *e.kids[0];
      if (fn.kind == ExprKind::Lambda) return substitute(fn.kids[0], fn.text, e.kids[1]);
      // fix (λself. body) ⇝ body[fix (λself. body) / self]
      const Expr& gen = *e.kids[1];
      return substitute(gen.kids[0], gen.text, d.redex);
    }
    case ExprKind::Add: {
      const auto sum = checked_add(e.kids[0]->number, e.kids[1]->number);
      if (!sum) return ex::raise(ex::error(ErrorKind::Overflow));
      return e.kids[0]->kind == ExprKind::Tz ? ex::tz(*sum) : ex::integer(*sum);
    }
    case ExprKind::Lt:
      return ex::boolean(e.kids[0]->number < e.kids[1]->number);
    case ExprKind::Eq:
      return ex::boolean(expr_equal(e.kids[0], e.kids[1]));
    case ExprKind::And:
      return ex::boolean(e.kids[0]->number != 0 && e.kids[1]->number != 0);
    case ExprKind::Or:
      return ex::boolean(e.kids[0]->number != 0 || e.kids[1]->number != 0);
    case ExprKind::Not:
      return ex::boolean(e.kids[0]->number == 0);
    case ExprKind::Match:
      for (const auto& arm : e.arms) {
        if (auto b = match_pattern(arm.pattern, e.kids[0])) {
          ExprPtr body = arm.body;
          for (const auto& [x, v] : *b) body = substitute(body, x, v);
          return body;
        }
      }
      return ex::raise(ex::error(ErrorKind::Match));
    case ExprKind::Try:
      if (is_value(e.kids[0])) return e.kids[0];
      return ex::app(e.kids[1], d.exception);
    case ExprKind::Cast:
      return e.kids[0];
    default:
      throw std::logic_error("contract_pure_redex: not a pure redex: " + to_string(d.redex));
  }
}

PureStep step_pure(const ExprPtr& e) {
  const Decomposition d = decompose(e);
  PureStep out;
  switch (d.kind) {
    case RedexKind::Pure:
      out.outcome = PureOutcome::Stepped;
      out.next = plug(e, d.path, contract_pure_redex(d));
      return out;
    case RedexKind::Uncaught:
      out.outcome = PureOutcome::Uncaught;
      out.exception = d.exception;
      return out;
    case RedexKind::Stuck:
      out.outcome = PureOutcome::Stuck;
      return out;
    default:
      out.outcome = PureOutcome::NoPureStep;
      return out;
  }
}

std::size_t expr_size(const ExprPtr& e) {
  std::size_t n = 1;
  for (const auto& k : e->kids) n += expr_size(k);
  for (const auto& arm : e->arms) n += expr_size(arm.body);
  return n;
}

// --- JSON -------------------------------------------------------------------------

namespace {

using nlohmann::json;

struct KindName {
  ExprKind kind;
  std::string_view tag;
};

constexpr std::array<KindName, 38> kExprTags = {{
    {ExprKind::Int, "int"},         {ExprKind::String, "string"},
    {ExprKind::Oph, "oph"},         {ExprKind::Puh, "puh"},
    {ExprKind::Puk, "puk"},         {ExprKind::Code, "code"},
    {ExprKind::Tz, "tz"},           {ExprKind::Unit, "unit"},
    {ExprKind::Bool, "bool"},       {ExprKind::Fix, "fix"},
    {ExprKind::Pending, "pending"}, {ExprKind::Timeout, "timeout"},
    {ExprKind::Included, "included"}, {ExprKind::Error, "error"},
    {ExprKind::FailWith, "failwith"}, {ExprKind::Var, "var"},
    {ExprKind::Lambda, "lam"},      {ExprKind::App, "app"},
    {ExprKind::Add, "add"},         {ExprKind::Lt, "lt"},
    {ExprKind::Eq, "eq"},           {ExprKind::And, "and"},
    {ExprKind::Or, "or"},           {ExprKind::Not, "not"},
    {ExprKind::Pair, "pair"},       {ExprKind::Nil, "nil"},
    {ExprKind::Cons, "cons"},       {ExprKind::Left, "left"},
    {ExprKind::Right, "right"},     {ExprKind::Some, "some"},
    {ExprKind::None, "none"},       {ExprKind::Match, "match"},
    {ExprKind::Raise, "raise"},     {ExprKind::Try, "try"},
    {ExprKind::Cast, "cast"},       {ExprKind::Query, "query"},
    {ExprKind::Transfer, "transfer"}, {ExprKind::Originate, "originate"},
}};

std::string_view tag_of(ExprKind kind) {
  for (const auto& kn : kExprTags) {
    if (kn.kind == kind) return kn.tag;
  }
  return "?";
}

ExprKind kind_of_tag(const std::string& tag) {
  for (const auto& kn : kExprTags) {
    if (kn.tag == tag) return kn.kind;
  }
  throw std::invalid_argument("unknown expression tag '" + tag + "'");
}

constexpr std::array<std::string_view, 5> kTransferFields = {"amount", "sender", "target", "param",
                                                             "fee"};
constexpr std::array<std::string_view, 5> kOriginateFields = {"amount", "sender", "code", "init",
                                                              "fee"};

const json& field(const json& j, std::string_view name) {
  auto it = j.find(std::string(name));
  if (it == j.end()) {
    throw std::invalid_argument("missing field '" + std::string(name) + "' in " + j.dump());
  }
  return *it;
}

}  // namespace

nlohmann::json expr_to_json(const ExprPtr& e) {
  json j;
  j["tag"] = std::string(tag_of(e->kind));
  switch (e->kind) {
    case ExprKind::Int:
    case ExprKind::Tz:
      j["value"] = e->number;
      break;
    case ExprKind::Bool:
      j["value"] = e->number != 0;
      break;
    case ExprKind::String:
    case ExprKind::Oph:
    case ExprKind::Puh:
    case ExprKind::Puk:
    case ExprKind::Code:
    case ExprKind::FailWith:
      j["value"] = e->text;
      break;
    case ExprKind::Var:
      j["name"] = e->text;
      break;
    case ExprKind::Error:
      j["value"] = std::string(error_name(e->error));
      break;
    case ExprKind::Lambda:
      j["var"] = e->text;
      j["type"] = ty_to_json(e->ty);
      j["body"] = expr_to_json(e->kids[0]);
      break;
    case ExprKind::App:
      j["fn"] = expr_to_json(e->kids[0]);
      j["arg"] = expr_to_json(e->kids[1]);
      break;
    case ExprKind::Add:
    case ExprKind::Lt:
    case ExprKind::Eq:
    case ExprKind::And:
    case ExprKind::Or:
    case ExprKind::Pair:
    case ExprKind::Cons:
      j["lhs"] = expr_to_json(e->kids[0]);
      j["rhs"] = expr_to_json(e->kids[1]);
      break;
    case ExprKind::Not:
    case ExprKind::Included:
    case ExprKind::Left:
    case ExprKind::Right:
    case ExprKind::Some:
    case ExprKind::Raise:
      j["arg"] = expr_to_json(e->kids[0]);
      break;
    case ExprKind::Match: {
      j["scrutinee"] = expr_to_json(e->kids[0]);
      json arms = json::array();
      for (const auto& arm : e->arms) {
        arms.push_back({{"pattern", pattern_to_json(arm.pattern)}, {"body", expr_to_json(arm.body)}});
      }
      j["arms"] = std::move(arms);
      break;
    }
    case ExprKind::Try:
      j["body"] = expr_to_json(e->kids[0]);
      j["handler"] = expr_to_json(e->kids[1]);
      break;
    case ExprKind::Cast:
      j["arg"] = expr_to_json(e->kids[0]);
      j["from"] = ty_to_json(e->ty);
      j["to"] = ty_to_json(e->ty2);
      break;
    case ExprKind::Query:
      j["query"] = std::string(query_name(e->query));
      j["arg"] = expr_to_json(e->kids[0]);
      break;
    case ExprKind::Transfer:
      for (std::size_t i = 0; i < 5; ++i) j[std::string(kTransferFields[i])] = expr_to_json(e->kids[i]);
      break;
    case ExprKind::Originate:
      for (std::size_t i = 0; i < 5; ++i) j[std::string(kOriginateFields[i])] = expr_to_json(e->kids[i]);
      break;
    case ExprKind::Unit:
    case ExprKind::Fix:
    case ExprKind::Pending:
    case ExprKind::Timeout:
    case ExprKind::Nil:
    case ExprKind::None:
      break;
  }
  return j;
}

ExprPtr expr_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("expression must be an object: " + j.dump());
  const ExprKind kind = kind_of_tag(field(j, "tag").get<std::string>());
  auto sub = [&](std::string_view name) { return expr_from_json(field(j, name)); };
  auto text = [&](std::string_view name) { return field(j, name).get<std::string>(); };
  switch (kind) {
    case ExprKind::Int: return ex::integer(field(j, "value").get<std::int64_t>());
    case ExprKind::Tz: return ex::tz(field(j, "value").get<std::int64_t>());
    case ExprKind::Bool: return ex::boolean(field(j, "value").get<bool>());
    case ExprKind::String: return ex::str(text("value"));
    case ExprKind::Oph: return ex::oph(text("value"));
    case ExprKind::Puh: return ex::puh(text("value"));
    case ExprKind::Puk: return ex::puk(text("value"));
    case ExprKind::Code: return ex::code(text("value"));
    case ExprKind::FailWith: return ex::failwith(text("value"));
    case ExprKind::Unit: return ex::unit();
    case ExprKind::Fix: return ex::fix();
    case ExprKind::Pending: return ex::pending();
    case ExprKind::Timeout: return ex::timeout();
    case ExprKind::Nil: return ex::nil();
    case ExprKind::None: return ex::none();
    case ExprKind::Error: {
      const auto err = error_from_name(text("value"));
      if (!err) throw std::invalid_argument("unknown error constant '" + text("value") + "'");
      return ex::error(*err);
    }
    case ExprKind::Var: return ex::var(text("name"));
    case ExprKind::Lambda: return ex::lam(text("var"), ty_from_json(field(j, "type")), sub("body"));
    case ExprKind::App: return ex::app(sub("fn"), sub("arg"));
    case ExprKind::Add: return ex::add(sub("lhs"), sub("rhs"));
    case ExprKind::Lt: return ex::lt(sub("lhs"), sub("rhs"));
    case ExprKind::Eq: return ex::eq(sub("lhs"), sub("rhs"));
    case ExprKind::And: return ex::and_(sub("lhs"), sub("rhs"));
    case ExprKind::Or: return ex::or_(sub("lhs"), sub("rhs"));
    case ExprKind::Pair: return ex::pair(sub("lhs"), sub("rhs"));
    case ExprKind::Cons: return ex::cons(sub("lhs"), sub("rhs"));
    case ExprKind::Not: return ex::not_(sub("arg"));
    case ExprKind::Included: return ex::included(sub("arg"));
    case ExprKind::Left: return ex::left(sub("arg"));
    case ExprKind::Right: return ex::right(sub("arg"));
    case ExprKind::Some: return ex::some(sub("arg"));
    case ExprKind::Raise: return ex::raise(sub("arg"));
    case ExprKind::Match: {
      std::vector<MatchArm> arms;
      for (const auto& a : field(j, "arms")) {
        arms.push_back({pattern_from_json(field(a, "pattern")), expr_from_json(field(a, "body"))});
      }
      return ex::match(sub("scrutinee"), std::move(arms));
    }
    case ExprKind::Try: return ex::try_(sub("body"), sub("handler"));
    case ExprKind::Cast:
      return ex::cast(sub("arg"), ty_from_json(field(j, "from")), ty_from_json(field(j, "to")));
    case ExprKind::Query: {
      const auto q = query_from_name(text("query"));
      if (!q) throw std::invalid_argument("unknown query '" + text("query") + "'");
      return ex::query(*q, sub("arg"));
    }
    case ExprKind::Transfer:
      return ex::transfer(sub(kTransferFields[0]), sub(kTransferFields[1]), sub(kTransferFields[2]),
                          sub(kTransferFields[3]), sub(kTransferFields[4]));
    case ExprKind::Originate:
      return ex::originate(sub(kOriginateFields[0]), sub(kOriginateFields[1]),
                           sub(kOriginateFields[2]), sub(kOriginateFields[3]),
                           sub(kOriginateFields[4]));
  }
  throw std::invalid_argument("unhandled expression tag");
}

namespace {

constexpr std::array<std::pair<PatternKind, std::string_view>, 12> kPatternTags = {{
    {PatternKind::Var, "pvar"},
    {PatternKind::Wildcard, "pwild"},
    {PatternKind::Const, "pconst"},
    {PatternKind::Pair, "ppair"},
    {PatternKind::Nil, "pnil"},
    {PatternKind::Cons, "pcons"},
    {PatternKind::Left, "pleft"},
    {PatternKind::Right, "pright"},
    {PatternKind::Some, "psome"},
    {PatternKind::None, "pnone"},
    {PatternKind::Included, "pincluded"},
    {PatternKind::FailWith, "pfailwith"},
}};

}  // namespace

nlohmann::json pattern_to_json(const Pattern& p) {
  json j;
  for (const auto& [k, tag] : kPatternTags) {
    if (k == p.kind) j["tag"] = std::string(tag);
  }
  if (p.kind == PatternKind::Var) j["name"] = p.name;
  if (p.kind == PatternKind::Const) j["value"] = expr_to_json(p.literal);
  if (!p.kids.empty()) {
    json kids = json::array();
    for (const auto& k : p.kids) kids.push_back(pattern_to_json(k));
    j["args"] = std::move(kids);
  }
  return j;
}

Pattern pattern_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("pattern must be an object: " + j.dump());
  const auto tag = field(j, "tag").get<std::string>();
  std::optional<PatternKind> kind;
  for (const auto& [k, t] : kPatternTags) {
    if (t == tag) kind = k;
  }
  if (!kind) throw std::invalid_argument("unknown pattern tag '" + tag + "'");
  Pattern p;
  p.kind = *kind;
  std::size_t expected = 0;
  switch (p.kind) {
    case PatternKind::Var:
      p.name = field(j, "name").get<std::string>();
      break;
    case PatternKind::Const:
      p.literal = expr_from_json(field(j, "value"));
      if (!is_value(p.literal)) throw std::invalid_argument("constant pattern must be a value");
      break;
    case PatternKind::Pair:
    case PatternKind::Cons:
      expected = 2;
      break;
    case PatternKind::Left:
    case PatternKind::Right:
    case PatternKind::Some:
    case PatternKind::Included:
    case PatternKind::FailWith:
      expected = 1;
      break;
    default:
      break;
  }
  if (expected > 0) {
    const auto& args = field(j, "args");
    if (!args.is_array() || args.size() != expected) {
      throw std::invalid_argument("pattern '" + tag + "' takes " + std::to_string(expected) +
                                  " argument(s)");
    }
    for (const auto& a : args) p.kids.push_back(pattern_from_json(a));
  }
  return p;
}

// --- printing -----------------------------------------------------------------------

std::string to_string(const Pattern& p) {
  switch (p.kind) {
    case PatternKind::Var: return p.name;
    case PatternKind::Wildcard: return "_";
    case PatternKind::Const: return to_string(p.literal);
    case PatternKind::Pair: return "(" + to_string(p.kids[0]) + ", " + to_string(p.kids[1]) + ")";
    case PatternKind::Nil: return "nil";
    case PatternKind::Cons: return "cons " + to_string(p.kids[0]) + " " + to_string(p.kids[1]);
    case PatternKind::Left: return "left " + to_string(p.kids[0]);
    case PatternKind::Right: return "right " + to_string(p.kids[0]);
    case PatternKind::Some: return "some " + to_string(p.kids[0]);
    case PatternKind::None: return "none";
    case PatternKind::Included: return "included " + to_string(p.kids[0]);
    case PatternKind::FailWith: return "failwith " + to_string(p.kids[0]);
  }
  return "?";
}

std::string to_string(const ExprPtr& e) {
  const auto& k = e->kids;
  auto bin = [&](std::string_view op) {
    return "(" + to_string(k[0]) + " " + std::string(op) + " " + to_string(k[1]) + ")";
  };
  switch (e->kind) {
    case ExprKind::Int: return std::to_string(e->number);
    case ExprKind::Tz: return std::to_string(e->number) + "tz";
    case ExprKind::String: return "\"" + e->text + "\"";
    case ExprKind::Oph:
    case ExprKind::Puh:
    case ExprKind::Puk: return e->text;
    case ExprKind::Code: return "<code>";
    case ExprKind::Unit: return "()";
    case ExprKind::Bool: return e->number ? "true" : "false";
    case ExprKind::Fix: return "fix";
    case ExprKind::Pending: return "pending";
    case ExprKind::Timeout: return "timeout";
    case ExprKind::Included: return "included(" + to_string(k[0]) + ")";
    case ExprKind::Error: return std::string(error_name(e->error));
    case ExprKind::FailWith: return "failwith \"" + e->text + "\"";
    case ExprKind::Var: return e->text;
    case ExprKind::Lambda:
      return "(\\" + e->text + ":" + e->ty.to_string() + ". " + to_string(k[0]) + ")";
    case ExprKind::App: return "(" + to_string(k[0]) + " " + to_string(k[1]) + ")";
    case ExprKind::Add: return bin("+");
    case ExprKind::Lt: return bin("<");
    case ExprKind::Eq: return bin("=");
    case ExprKind::And: return bin("and");
    case ExprKind::Or: return bin("or");
    case ExprKind::Not: return "(not " + to_string(k[0]) + ")";
    case ExprKind::Pair: return "(" + to_string(k[0]) + ", " + to_string(k[1]) + ")";
    case ExprKind::Nil: return "nil";
    case ExprKind::Cons: return "(cons " + to_string(k[0]) + " " + to_string(k[1]) + ")";
    case ExprKind::Left: return "(left " + to_string(k[0]) + ")";
    case ExprKind::Right: return "(right " + to_string(k[0]) + ")";
    case ExprKind::Some: return "(some " + to_string(k[0]) + ")";
    case ExprKind::None: return "none";
    case ExprKind::Match: {
      std::string out = "(match " + to_string(k[0]) + " with";
      for (const auto& arm : e->arms) out += " | " + to_string(arm.pattern) + " -> " + to_string(arm.body);
      return out + ")";
    }
    case ExprKind::Raise: return "(raise " + to_string(k[0]) + ")";
    case ExprKind::Try: return "(try " + to_string(k[0]) + " except " + to_string(k[1]) + ")";
    case ExprKind::Cast:
      return "(" + to_string(k[0]) + " : " + e->ty.to_string() + " => " + e->ty2.to_string() + ")";
    case ExprKind::Query: return "(" + std::string(query_name(e->query)) + " " + to_string(k[0]) + ")";
    case ExprKind::Transfer:
      return "(transfer[" + to_string(k[3]) + "] " + to_string(k[0]) + " " + to_string(k[1]) + " " +
             to_string(k[2]) + " " + to_string(k[4]) + ")";
    case ExprKind::Originate:
      return "(originate " + to_string(k[0]) + " " + to_string(k[1]) + " " + to_string(k[2]) + " " +
             to_string(k[3]) + " " + to_string(k[4]) + ")";
  }
  return "?";
}

}  // namespace chainsem
