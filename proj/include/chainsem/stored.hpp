#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "chainsem/expr.hpp"
#include "chainsem/types.hpp"

namespace chainsem {

/// Serialized first-order value as kept in contract storage and operation
/// parameters, e.g. `(true,(puk_owner,puk_alice))` or `left(())`.
using StoredValue = std::string;

/// Parses `s` as a value of type `t`. Addresses accept `puk_…`/`tz1…`
/// (implicit accounts) and `puh_…`/`KT1…` (contracts). Returns nullopt on
/// any syntax or shape mismatch, including trailing input.
std::optional<ExprPtr> parse_stored(std::string_view s, const Ty& t);

/// Canonical text of a first-order value. Throws std::invalid_argument for
/// lambdas, hashes of operations, code, and exceptions.
StoredValue serialize_stored(const ExprPtr& v);

/// `⊢ s : t` for serialized values.
bool type_stored_value(std::string_view s, const Ty& t);

}  // namespace chainsem
