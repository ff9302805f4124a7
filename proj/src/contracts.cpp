#include "chainsem/contracts.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <unordered_map>

namespace chainsem {

namespace {

// --- header parsing -----------------------------------------------------------------

class ScriptLexer {
 public:
  explicit ScriptLexer(std::string_view s) : s_(s) {}

  std::string next() {
    skip_ws();
    if (pos_ >= s_.size()) return {};
    const char c = s_[pos_];
    if (c == '(' || c == ')' || c == ';') {
      ++pos_;
      return std::string(1, c);
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           s_[pos_] != '(' && s_[pos_] != ')' && s_[pos_] != ';') {
      ++pos_;
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string peek() {
    const std::size_t saved = pos_;
    std::string tok = next();
    pos_ = saved;
    return tok;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void skip_annotations(ScriptLexer& lex) {
  while (!lex.peek().empty() && lex.peek()[0] == '%') lex.next();
}

Ty parse_type(ScriptLexer& lex);

Ty parse_application(const std::string& head, ScriptLexer& lex) {
  if (head == "unit") return Ty::unit();
  if (head == "bool") return Ty::boolean();
  if (head == "int" || head == "nat") return Ty::integer();
  if (head == "mutez") return Ty::tz();
  if (head == "string") return Ty::string();
  if (head == "address") return Ty::addr();
  if (head == "key" || head == "key_hash") return Ty::puk();
  if (head == "or" || head == "pair") {
    Ty a = parse_type(lex);
    Ty b = parse_type(lex);
    return head == "or" ? Ty::sum(a, b) : Ty::pair(a, b);
  }
  if (head == "option") return Ty::option(parse_type(lex));
  if (head == "list") return Ty::list(parse_type(lex));
  throw CodeTypeError("unknown type '" + head + "'");
}

Ty parse_type(ScriptLexer& lex) {
  std::string tok = lex.next();
  if (tok.empty()) throw CodeTypeError("unexpected end of script in type");
  if (tok == "(") {
    Ty t = parse_application(lex.next(), lex);
    skip_annotations(lex);
    if (lex.next() != ")") throw CodeTypeError("expected ')' in type");
    return t;
  }
  if (tok == ")" || tok == ";") throw CodeTypeError("unexpected '" + tok + "' in type");
  Ty t = parse_application(tok, lex);
  skip_annotations(lex);
  return t;
}

// --- registry -----------------------------------------------------------------------

struct StubInput {
  ExprPtr param;
  ExprPtr storage;
  std::int64_t balance;
  std::int64_t amount;
  std::string_view sender;
};

struct Stub {
  std::function<bool(const Ty& param, const Ty& storage)> accepts;
  std::function<StubOutcome(const StubInput&)> run;
};

StubOutcome fail(std::string message) {
  StubOutcome out;
  out.message = std::move(message);
  return out;
}

StubOutcome succeed(const ExprPtr& storage, std::optional<Refund> refund = std::nullopt) {
  StubOutcome out;
  out.ok = true;
  out.new_storage = serialize_stored(storage);
  if (refund && refund->amount > 0) out.refund = std::move(refund);
  return out;
}

Ty auction_param() { return Ty::sum(Ty::unit(), Ty::unit()); }
Ty auction_storage() { return Ty::pair(Ty::boolean(), Ty::pair(Ty::addr(), Ty::addr())); }

StubOutcome run_auction(const StubInput& in) {
  const bool bidding = in.storage->kids[0]->number != 0;
  const ExprPtr& owner = in.storage->kids[1]->kids[0];
  const ExprPtr& highest = in.storage->kids[1]->kids[1];
  if (!bidding) return fail("closed");
  if (in.param->kind == ExprKind::Left) {
    if (owner->text != in.sender) return fail("closed");
    auto closed = ex::pair(ex::boolean(false), in.storage->kids[1]);
    return succeed(closed, Refund{owner->text, in.balance + in.amount});
  }
  // The highest bid is the contract balance, so a bid must exceed it.
  if (in.amount <= in.balance) return fail("bid too low");
  auto bidder = in.sender.substr(0, 4) == "puh_" ? ex::puh(std::string(in.sender))
                                                 : ex::puk(std::string(in.sender));
  auto updated = ex::pair(ex::boolean(true), ex::pair(owner, bidder));
  return succeed(updated, Refund{highest->text, in.balance});
}

const std::map<std::string, Stub, std::less<>>& registry() {
  static const std::map<std::string, Stub, std::less<>> stubs = {
      {"auction",
       {[](const Ty& p, const Ty& s) { return p == auction_param() && s == auction_storage(); },
        run_auction}},
      {"identity",
       {[](const Ty& p, const Ty& s) { return p == s; },
        [](const StubInput& in) { return succeed(in.param); }}},
      {"keep",
       {[](const Ty&, const Ty&) { return true; },
        [](const StubInput& in) { return succeed(in.storage); }}},
      {"reject",
       {[](const Ty&, const Ty&) { return true; },
        [](const StubInput&) { return fail("rejected"); }}},
      {"counter",
       {[](const Ty& p, const Ty& s) { return p.is(TyKind::Int) && s.is(TyKind::Int); },
        [](const StubInput& in) {
          std::int64_t sum = 0;
          if (__builtin_add_overflow(in.storage->number, in.param->number, &sum)) {
            return fail("overflow");
          }
          return succeed(ex::integer(sum));
        }}},
  };
  return stubs;
}

CodeRef parse_code_header_uncached(std::string_view script) {
  ScriptLexer lex(script);
  std::optional<Ty> param;
  std::optional<Ty> storage;
  std::optional<std::string> code;
  for (std::string kw = lex.next(); !kw.empty(); kw = lex.next()) {
    if (kw == "parameter") {
      if (param) throw CodeTypeError("duplicate parameter clause");
      param = parse_type(lex);
    } else if (kw == "storage") {
      if (storage) throw CodeTypeError("duplicate storage clause");
      storage = parse_type(lex);
    } else if (kw == "code") {
      if (code) throw CodeTypeError("duplicate code clause");
      code = lex.next();
      if (code->empty() || *code == ";") throw CodeTypeError("code clause needs a stub name");
    } else {
      throw CodeTypeError("unexpected '" + kw + "' in script");
    }
    if (lex.next() != ";") throw CodeTypeError("clause '" + kw + "' must end with ';'");
  }
  if (!param) throw CodeTypeError("missing parameter declaration");
  if (!storage) throw CodeTypeError("missing storage declaration");
  if (!code) throw CodeTypeError("missing code clause");
  return CodeRef{*code, *param, *storage};
}

struct HeaderMemo {
  std::optional<CodeRef> ref;
  std::string error;
};

}  // namespace

CodeRef parse_code_header(std::string_view script) {
  // Scripts are few and immutable, and headers are re-read on every
  // invariant check, so parses are memoized per thread.
  thread_local std::unordered_map<std::string, HeaderMemo> memo;
  auto it = memo.find(std::string(script));
  if (it == memo.end()) {
    HeaderMemo m;
    try {
      m.ref = parse_code_header_uncached(script);
    } catch (const CodeTypeError& err) {
      m.error = err.what();
    }
    if (memo.size() > 4096) memo.clear();
    it = memo.emplace(std::string(script), std::move(m)).first;
  }
  if (!it->second.ref) throw CodeTypeError(it->second.error);
  return *it->second.ref;
}

Ty type_code(std::string_view script) {
  CodeRef ref = parse_code_header(script);
  const auto& stubs = registry();
  auto it = stubs.find(ref.stub_id);
  if (it == stubs.end()) throw CodeTypeError("unknown stub '" + ref.stub_id + "'");
  if (!it->second.accepts(ref.param_ty, ref.storage_ty)) {
    throw CodeTypeError("stub '" + ref.stub_id + "' does not accept signature " +
                        ref.param_ty.to_string() + " / " + ref.storage_ty.to_string());
  }
  return Ty::pair(ref.param_ty, ref.storage_ty);
}

bool code_typechecks(std::string_view script) {
  try {
    type_code(script);
    return true;
  } catch (const CodeTypeError&) {
    return false;
  }
}

StubOutcome apply_stub(const CodeRef& code, std::string_view param, std::string_view storage,
                       std::int64_t contract_balance, std::int64_t amount,
                       std::string_view sender) {
  const auto& stubs = registry();
  auto it = stubs.find(code.stub_id);
  if (it == stubs.end()) return fail("unknown stub");
  auto p = parse_stored(param, code.param_ty);
  auto s = parse_stored(storage, code.storage_ty);
  if (!p || !s) return fail("ill-typed input");
  return it->second.run(StubInput{*p, *s, contract_balance, amount, sender});
}

std::vector<std::string> stub_ids() {
  std::vector<std::string> out;
  for (const auto& [id, stub] : registry()) out.push_back(id);
  return out;
}

std::string michelson_type(const Ty& t) {
  switch (t.kind()) {
    case TyKind::Unit: return "unit";
    case TyKind::Bool: return "bool";
    case TyKind::Int: return "int";
    case TyKind::Tz: return "mutez";
    case TyKind::String: return "string";
    case TyKind::Addr: return "address";
    case TyKind::Puk: return "key";
    case TyKind::Pair: return "(pair " + michelson_type(t.first()) + " " + michelson_type(t.second()) + ")";
    case TyKind::Sum: return "(or " + michelson_type(t.first()) + " " + michelson_type(t.second()) + ")";
    case TyKind::Option: return "(option " + michelson_type(t.first()) + ")";
    case TyKind::List: return "(list " + michelson_type(t.first()) + ")";
    default:
      throw std::invalid_argument("type has no script spelling: " + t.to_string());
  }
}

std::string make_script(const Ty& param, const Ty& storage, std::string_view stub_id) {
  return "parameter " + michelson_type(param) + "; storage " + michelson_type(storage) +
         "; code " + std::string(stub_id) + ";";
}

std::string auction_script() {
  return "parameter (or (unit %close) (unit %bid)); "
         "storage (pair bool (pair address address)); code auction;";
}

CodeRef builtin_auction() { return parse_code_header(auction_script()); }

}  // namespace chainsem
