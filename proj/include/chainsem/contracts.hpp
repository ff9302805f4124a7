#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chainsem/stored.hpp"
#include "chainsem/types.hpp"

namespace chainsem {

/// Contract scripts are short headers in the style of
///
///     parameter (or (unit %close) (unit %bid));
///     storage (pair bool (pair address address));
///     code auction;
///
/// where `code` names a registered host-level behaviour.
struct CodeRef {
  std::string stub_id;
  Ty param_ty;
  Ty storage_ty;
};

class CodeTypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the three clauses without consulting the registry. This is what
/// a code literal's static type is read from.
CodeRef parse_code_header(std::string_view script);

/// The external judgment `⊢ code : Pair(param, storage)`: the header parses,
/// the stub exists, and the stub accepts the declared signature.
Ty type_code(std::string_view script);

/// type_code without exceptions.
bool code_typechecks(std::string_view script);

struct Refund {
  std::string target;  // puk or puh
  std::int64_t amount = 0;
};

struct StubOutcome {
  bool ok = false;
  StoredValue new_storage;       // ok
  std::optional<Refund> refund;  // ok
  std::string message;           // !ok, the FAILWITH argument
};

/// Runs a stub on serialized inputs. Inputs are assumed typed at the
/// declared signature; a parse failure is reported as a FAILWITH.
StubOutcome apply_stub(const CodeRef& code, std::string_view param, std::string_view storage,
                       std::int64_t contract_balance, std::int64_t amount,
                       std::string_view sender);

/// Registered stub ids, sorted.
std::vector<std::string> stub_ids();

/// Script text for the auction contract.
std::string auction_script();
CodeRef builtin_auction();

/// `parameter <p>; storage <s>; code <id>;` with Michelson-style type text.
std::string make_script(const Ty& param, const Ty& storage, std::string_view stub_id);

/// Michelson-style rendering of a storable type (`pair bool address`, ...).
std::string michelson_type(const Ty& t);

}  // namespace chainsem
