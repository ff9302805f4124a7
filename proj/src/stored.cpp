#include "chainsem/stored.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>

namespace chainsem {

namespace {

class Reader {
 public:
  explicit Reader(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(std::string_view token) {
    skip_ws();
    if (s_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }

  bool at_end() {
    skip_ws();
    return pos_ == s_.size();
  }

  std::string_view word() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    return s_.substr(start, pos_ - start);
  }

  std::optional<std::int64_t> number(bool allow_negative) {
    skip_ws();
    std::size_t end = pos_;
    if (allow_negative && end < s_.size() && s_[end] == '-') ++end;
    while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) ++end;
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + end, out);
    if (ec != std::errc() || ptr != s_.data() + end) return std::nullopt;
    pos_ = end;
    return out;
  }

  std::optional<std::string> quoted() {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '"') return std::nullopt;
    std::string out;
    for (std::size_t i = pos_ + 1; i < s_.size(); ++i) {
      const char c = s_[i];
      if (c == '"') {
        pos_ = i + 1;
        return out;
      }
      if (c == '\\') {
        if (++i >= s_.size()) return std::nullopt;
        out.push_back(s_[i]);
        continue;
      }
      out.push_back(c);
    }
    return std::nullopt;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool is_puk_token(std::string_view w) {
  return (starts_with(w, "puk_") && w.size() > 4) || (starts_with(w, "tz1") && w.size() > 3);
}

bool is_puh_token(std::string_view w) {
  return (starts_with(w, "puh_") && w.size() > 4) || (starts_with(w, "KT1") && w.size() > 3);
}

std::optional<ExprPtr> parse_at(Reader& r, const Ty& t);

std::optional<ExprPtr> parse_wrapped(Reader& r, std::string_view tag, const Ty& inner,
                                     ExprPtr (*wrap)(ExprPtr)) {
  if (!r.eat(tag) || !r.eat("(")) return std::nullopt;
  auto v = parse_at(r, inner);
  if (!v || !r.eat(")")) return std::nullopt;
  return wrap(*v);
}

std::optional<ExprPtr> parse_at(Reader& r, const Ty& t) {
  switch (t.kind()) {
    case TyKind::Unit:
      if (r.eat("(") && r.eat(")")) return ex::unit();
      return std::nullopt;
    case TyKind::Bool: {
      const auto w = r.word();
      if (w == "true") return ex::boolean(true);
      if (w == "false") return ex::boolean(false);
      return std::nullopt;
    }
    case TyKind::Int: {
      auto n = r.number(true);
      if (!n) return std::nullopt;
      return ex::integer(*n);
    }
    case TyKind::Tz: {
      auto n = r.number(false);
      if (!n) return std::nullopt;
      return ex::tz(*n);
    }
    case TyKind::String: {
      auto s = r.quoted();
      if (!s) return std::nullopt;
      return ex::str(std::move(*s));
    }
    case TyKind::Puk:
    case TyKind::Puh:
    case TyKind::Addr: {
      const std::string w(r.word());
      if (t.kind() != TyKind::Puh && is_puk_token(w)) return ex::puk(w);
      if (t.kind() != TyKind::Puk && is_puh_token(w)) return ex::puh(w);
      return std::nullopt;
    }
    case TyKind::Pair: {
      if (!r.eat("(")) return std::nullopt;
      auto a = parse_at(r, t.first());
      if (!a || !r.eat(",")) return std::nullopt;
      auto b = parse_at(r, t.second());
      if (!b || !r.eat(")")) return std::nullopt;
      return ex::pair(*a, *b);
    }
    case TyKind::Sum: {
      Reader probe = r;
      if (probe.word() == "left") return parse_wrapped(r, "left", t.first(), ex::left);
      return parse_wrapped(r, "right", t.second(), ex::right);
    }
    case TyKind::Option: {
      Reader probe = r;
      if (probe.word() == "none") {
        r.word();
        return ex::none();
      }
      return parse_wrapped(r, "some", t.first(), ex::some);
    }
    case TyKind::List: {
      if (!r.eat("[")) return std::nullopt;
      std::vector<ExprPtr> items;
      if (!r.eat("]")) {
        do {
          auto v = parse_at(r, t.first());
          if (!v) return std::nullopt;
          items.push_back(*v);
        } while (r.eat(";"));
        if (!r.eat("]")) return std::nullopt;
      }
      ExprPtr out = ex::nil();
      for (auto it = items.rbegin(); it != items.rend(); ++it) out = ex::cons(*it, out);
      return out;
    }
    default:
      return std::nullopt;
  }
}

void serialize_into(const ExprPtr& v, std::string& out) {
  switch (v->kind) {
    case ExprKind::Unit: out += "()"; return;
    case ExprKind::Bool: out += v->number ? "true" : "false"; return;
    case ExprKind::Int:
    case ExprKind::Tz: out += std::to_string(v->number); return;
    case ExprKind::String:
      out.push_back('"');
      for (char c : v->text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
      }
      out.push_back('"');
      return;
    case ExprKind::Puk:
    case ExprKind::Puh: out += v->text; return;
    case ExprKind::Pair:
      out.push_back('(');
      serialize_into(v->kids[0], out);
      out.push_back(',');
      serialize_into(v->kids[1], out);
      out.push_back(')');
      return;
    case ExprKind::Left:
    case ExprKind::Right:
    case ExprKind::Some:
      out += v->kind == ExprKind::Left ? "left(" : v->kind == ExprKind::Right ? "right(" : "some(";
      serialize_into(v->kids[0], out);
      out.push_back(')');
      return;
    case ExprKind::None: out += "none"; return;
    case ExprKind::Nil:
    case ExprKind::Cons: {
      out.push_back('[');
      const Expr* cur = v.get();
      bool first = true;
      while (cur->kind == ExprKind::Cons) {
        if (!first) out.push_back(';');
        first = false;
        serialize_into(cur->kids[0], out);
        cur = cur->kids[1].get();
      }
      out.push_back(']');
      return;
    }
    default:
      throw std::invalid_argument("value cannot be stored: " + to_string(v));
  }
}

}  // namespace

std::optional<ExprPtr> parse_stored(std::string_view s, const Ty& t) {
  Reader r(s);
  auto v = parse_at(r, t);
  if (!v || !r.at_end()) return std::nullopt;
  return v;
}

StoredValue serialize_stored(const ExprPtr& v) {
  if (!is_value(v)) throw std::invalid_argument("only values can be stored: " + to_string(v));
  std::string out;
  serialize_into(v, out);
  return out;
}

bool type_stored_value(std::string_view s, const Ty& t) { return parse_stored(s, t).has_value(); }

}  // namespace chainsem
