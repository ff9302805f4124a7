#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "json.hpp"

namespace chainsem {

enum class TyKind {
  Puh,
  Puk,
  Addr,
  Contract,
  Code,
  Oph,
  Status,
  Exception,
  Tz,
  No,
  Int,
  Unit,
  Bool,
  String,
  Arrow,
  Pair,
  List,
  Sum,
  Option,
};

std::string_view ty_kind_name(TyKind kind);

/// Immutable type term. Children are shared, so copies are cheap.
///
/// Binary constructors (Contract, Code, Oph, Arrow, Pair, Sum) use both
/// `first()` and `second()`; List and Option use `first()` only.
class Ty {
 public:
  Ty();  // Unit

  static Ty puh() { return Ty(TyKind::Puh); }
  static Ty puk() { return Ty(TyKind::Puk); }
  static Ty addr() { return Ty(TyKind::Addr); }
  static Ty status() { return Ty(TyKind::Status); }
  static Ty exception() { return Ty(TyKind::Exception); }
  static Ty tz() { return Ty(TyKind::Tz); }
  static Ty no() { return Ty(TyKind::No); }
  static Ty integer() { return Ty(TyKind::Int); }
  static Ty unit() { return Ty(TyKind::Unit); }
  static Ty boolean() { return Ty(TyKind::Bool); }
  static Ty string() { return Ty(TyKind::String); }

  static Ty contract(Ty param, Ty storage);
  static Ty code(Ty param, Ty storage);
  static Ty oph(Ty param, Ty storage);
  static Ty oph_transfer() { return oph(no(), no()); }
  static Ty arrow(Ty from, Ty to);
  static Ty pair(Ty a, Ty b);
  static Ty sum(Ty a, Ty b);
  static Ty list(Ty elem);
  static Ty option(Ty elem);

  TyKind kind() const { return kind_; }
  bool is(TyKind k) const { return kind_ == k; }
  int arity() const;
  const Ty& first() const;
  const Ty& second() const;

  friend bool operator==(const Ty& a, const Ty& b);

  /// Canonical text, e.g. `Contract(Sum(Unit,Unit),Pair(Bool,Addr))`.
  std::string to_string() const;

 private:
  explicit Ty(TyKind kind) : kind_(kind) {}
  Ty(TyKind kind, Ty a, Ty b);
  Ty(TyKind kind, Ty a);

  TyKind kind_;
  std::shared_ptr<const Ty> a_;
  std::shared_ptr<const Ty> b_;
};

/// The three axioms `Puh ⊲ Addr`, `Puk ⊲ Addr`, `Contract τ υ ⊲ Puh`.
/// Deliberately neither reflexive nor transitive.
bool subtype(const Ty& lhs, const Ty& rhs);

enum class CastKind { Upcast, Downcast, Forbidden };

CastKind cast_allowed(const Ty& from, const Ty& to);
std::string_view cast_kind_name(CastKind kind);

/// `No` may only appear directly as a parameter of `Oph`.
bool well_formed_type(const Ty& t);

/// Reflexive-transitive, structurally lifted closure of `subtype`. Used
/// only when typing runtime configurations, where erased upcasts leave a
/// value of the smaller type in place of the cast.
bool subsumed(const Ty& actual, const Ty& expected);

/// Types whose values can be serialized into contract parameters and
/// storage (first-order, no hashes of operations, no code).
bool storable_type(const Ty& t);

nlohmann::json ty_to_json(const Ty& t);
Ty ty_from_json(const nlohmann::json& j);

}  // namespace chainsem
