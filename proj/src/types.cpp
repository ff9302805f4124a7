#include "chainsem/types.hpp"

#include <array>
#include <stdexcept>

namespace chainsem {

namespace {

constexpr std::array<std::string_view, 19> kTyNames = {
    "Puh",  "Puk",  "Addr",   "Contract", "Code",  "Oph", "Status",
    "Exception", "Tz", "No",  "Int",      "Unit",  "Bool", "String",
    "Arrow", "Pair", "List",  "Sum",      "Option",
};

}  // namespace

std::string_view ty_kind_name(TyKind kind) {
  return kTyNames[static_cast<std::size_t>(kind)];
}

Ty::Ty() : kind_(TyKind::Unit) {}

Ty::Ty(TyKind kind, Ty a, Ty b)
    : kind_(kind),
      a_(std::make_shared<const Ty>(std::move(a))),
      b_(std::make_shared<const Ty>(std::move(b))) {}

Ty::Ty(TyKind kind, Ty a) : kind_(kind), a_(std::make_shared<const Ty>(std::move(a))) {}

Ty Ty::contract(Ty param, Ty storage) {
  return Ty(TyKind::Contract, std::move(param), std::move(storage));
}
Ty Ty::code(Ty param, Ty storage) {
  return Ty(TyKind::Code, std::move(param), std::move(storage));
}
Ty Ty::oph(Ty param, Ty storage) {
  return Ty(TyKind::Oph, std::move(param), std::move(storage));
}
Ty Ty::arrow(Ty from, Ty to) { return Ty(TyKind::Arrow, std::move(from), std::move(to)); }
Ty Ty::pair(Ty a, Ty b) { return Ty(TyKind::Pair, std::move(a), std::move(b)); }
Ty Ty::sum(Ty a, Ty b) { return Ty(TyKind::Sum, std::move(a), std::move(b)); }
Ty Ty::list(Ty elem) { return Ty(TyKind::List, std::move(elem)); }
Ty Ty::option(Ty elem) { return Ty(TyKind::Option, std::move(elem)); }

int Ty::arity() const {
  switch (kind_) {
    case TyKind::Contract:
    case TyKind::Code:
    case TyKind::Oph:
    case TyKind::Arrow:
    case TyKind::Pair:
    case TyKind::Sum:
      return 2;
    case TyKind::List:
    case TyKind::Option:
      return 1;
    default:
      return 0;
  }
}

const Ty& Ty::first() const {
  if (!a_) throw std::logic_error("Ty::first on nullary type " + to_string());
  return *a_;
}

const Ty& Ty::second() const {
  if (!b_) throw std::logic_error("Ty::second on type " + to_string());
  return *b_;
}

bool operator==(const Ty& a, const Ty& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.a_ != b.a_ && !(a.a_ && b.a_ && *a.a_ == *b.a_)) return false;
  if (a.b_ != b.b_ && !(a.b_ && b.b_ && *a.b_ == *b.b_)) return false;
  return true;
}

std::string Ty::to_string() const {
  std::string out(ty_kind_name(kind_));
  switch (arity()) {
    case 1:
      out += "(" + first().to_string() + ")";
      break;
    case 2:
      out += "(" + first().to_string() + "," + second().to_string() + ")";
      break;
    default:
      break;
  }
  return out;
}

bool subtype(const Ty& lhs, const Ty& rhs) {
  switch (lhs.kind()) {
    case TyKind::Puh:
    case TyKind::Puk:
      return rhs.is(TyKind::Addr);
    case TyKind::Contract:
      return rhs.is(TyKind::Puh);
    default:
      return false;
  }
}

CastKind cast_allowed(const Ty& from, const Ty& to) {
  if (subtype(from, to)) return CastKind::Upcast;
  if (subtype(to, from)) return CastKind::Downcast;
  return CastKind::Forbidden;
}

std::string_view cast_kind_name(CastKind kind) {
  switch (kind) {
    case CastKind::Upcast:
      return "Upcast";
    case CastKind::Downcast:
      return "Downcast";
    case CastKind::Forbidden:
      return "Forbidden";
  }
  return "?";
}

namespace {

bool well_formed_impl(const Ty& t, bool no_allowed) {
  if (t.is(TyKind::No)) return no_allowed;
  switch (t.arity()) {
    case 1:
      return well_formed_impl(t.first(), false);
    case 2: {
      const bool oph = t.is(TyKind::Oph);
      return well_formed_impl(t.first(), oph) && well_formed_impl(t.second(), oph);
    }
    default:
      return true;
  }
}

}  // namespace

bool well_formed_type(const Ty& t) { return well_formed_impl(t, false); }

bool subsumed(const Ty& actual, const Ty& expected) {
  if (actual == expected) return true;
  switch (actual.kind()) {
    case TyKind::Contract:
      return expected.is(TyKind::Puh) || expected.is(TyKind::Addr);
    case TyKind::Puh:
    case TyKind::Puk:
      return expected.is(TyKind::Addr);
    default:
      break;
  }
  if (actual.kind() != expected.kind()) return false;
  switch (actual.kind()) {
    case TyKind::Pair:
    case TyKind::Sum:
      return subsumed(actual.first(), expected.first()) &&
             subsumed(actual.second(), expected.second());
    case TyKind::List:
    case TyKind::Option:
      return subsumed(actual.first(), expected.first());
    case TyKind::Arrow:
      return subsumed(expected.first(), actual.first()) &&
             subsumed(actual.second(), expected.second());
    default:
      return false;
  }
}

bool storable_type(const Ty& t) {
  switch (t.kind()) {
    case TyKind::Unit:
    case TyKind::Bool:
    case TyKind::Int:
    case TyKind::Tz:
    case TyKind::String:
    case TyKind::Addr:
    case TyKind::Puk:
    case TyKind::Puh:
      return true;
    case TyKind::Pair:
    case TyKind::Sum:
      return storable_type(t.first()) && storable_type(t.second());
    case TyKind::List:
    case TyKind::Option:
      return storable_type(t.first());
    default:
      return false;
  }
}

nlohmann::json ty_to_json(const Ty& t) {
  if (t.arity() == 0) return std::string(ty_kind_name(t.kind()));
  nlohmann::json arr = nlohmann::json::array();
  arr.push_back(std::string(ty_kind_name(t.kind())));
  arr.push_back(ty_to_json(t.first()));
  if (t.arity() == 2) arr.push_back(ty_to_json(t.second()));
  return arr;
}

namespace {

TyKind kind_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kTyNames.size(); ++i) {
    if (kTyNames[i] == name) return static_cast<TyKind>(i);
  }
  throw std::invalid_argument("unknown type constructor '" + name + "'");
}

}  // namespace

Ty ty_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const TyKind kind = kind_from_name(j.get<std::string>());
    switch (kind) {
      case TyKind::Puh: return Ty::puh();
      case TyKind::Puk: return Ty::puk();
      case TyKind::Addr: return Ty::addr();
      case TyKind::Status: return Ty::status();
      case TyKind::Exception: return Ty::exception();
      case TyKind::Tz: return Ty::tz();
      case TyKind::No: return Ty::no();
      case TyKind::Int: return Ty::integer();
      case TyKind::Unit: return Ty::unit();
      case TyKind::Bool: return Ty::boolean();
      case TyKind::String: return Ty::string();
      default:
        throw std::invalid_argument("type constructor '" + j.get<std::string>() +
                                    "' needs arguments");
    }
  }
  if (!j.is_array() || j.empty() || !j[0].is_string()) {
    throw std::invalid_argument("malformed type JSON: " + j.dump());
  }
  const TyKind kind = kind_from_name(j[0].get<std::string>());
  auto need = [&](std::size_t n) {
    if (j.size() != n + 1) {
      throw std::invalid_argument("type constructor '" + j[0].get<std::string>() +
                                  "' takes " + std::to_string(n) + " argument(s)");
    }
  };
  switch (kind) {
    case TyKind::List:
      need(1);
      return Ty::list(ty_from_json(j[1]));
    case TyKind::Option:
      need(1);
      return Ty::option(ty_from_json(j[1]));
    case TyKind::Contract:
      need(2);
      return Ty::contract(ty_from_json(j[1]), ty_from_json(j[2]));
    case TyKind::Code:
      need(2);
      return Ty::code(ty_from_json(j[1]), ty_from_json(j[2]));
    case TyKind::Oph:
      need(2);
      return Ty::oph(ty_from_json(j[1]), ty_from_json(j[2]));
    case TyKind::Arrow:
      need(2);
      return Ty::arrow(ty_from_json(j[1]), ty_from_json(j[2]));
    case TyKind::Pair:
      need(2);
      return Ty::pair(ty_from_json(j[1]), ty_from_json(j[2]));
    case TyKind::Sum:
      need(2);
      return Ty::sum(ty_from_json(j[1]), ty_from_json(j[2]));
    default:
      throw std::invalid_argument("type constructor '" + j[0].get<std::string>() +
                                  "' takes no arguments");
  }
}

}  // namespace chainsem
