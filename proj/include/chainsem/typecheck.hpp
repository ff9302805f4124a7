#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chainsem/chain.hpp"
#include "chainsem/expr.hpp"
#include "chainsem/node.hpp"
#include "chainsem/types.hpp"
#include "json.hpp"

namespace chainsem {

/// A failed typing judgment: which rule, where (slash-separated child
/// indices from the root, `armN` for match arms), and the types involved.
class TypeError : public std::runtime_error {
 public:
  TypeError(std::string rule, std::string path, std::string message, std::string expected = {},
            std::string actual = {});

  const std::string& rule() const { return rule_; }
  const std::string& path() const { return path_; }
  const std::string& expected() const { return expected_; }
  const std::string& actual() const { return actual_; }
  nlohmann::json to_json() const;

 private:
  std::string rule_;
  std::string path_;
  std::string expected_;
  std::string actual_;
};

/// Γ. Later bindings shadow earlier ones.
using TyEnv = std::vector<std::pair<std::string, Ty>>;

/// Δ: public hash to Pair(param, storage).
using ContractTyEnv = std::map<std::string, Ty>;

enum class TypingMode {
  /// Source programs: types must agree exactly, coercions are explicit.
  Strict,
  /// Configurations mid-run. Upcasts have been erased, so a value of a
  /// subtype may sit where the supertype was expected, and public-hash
  /// literals known to Δ are typed as contract handles.
  Runtime,
};

struct AmbientInfo {
  const Blockchain* chain = nullptr;      // types oph literals from the pool
  const ContractTyEnv* delta = nullptr;   // Runtime mode only
  TypingMode mode = TypingMode::Strict;
};

/// Synthesis. Throws TypeError.
Ty type_of(const TyEnv& env, const ExprPtr& e, const AmbientInfo& ambient);
/// Checking against an expected type. Throws TypeError.
void check_type(const TyEnv& env, const ExprPtr& e, const Ty& expected, const AmbientInfo& ambient);

/// The type a source program is checked at (Unit), as a diagnostic.
std::optional<TypeError> program_type_error(const ExprPtr& program, const AmbientInfo& ambient);

/// Δ read off the contractors of a chain.
ContractTyEnv delta_of(const Blockchain& b);

bool type_blockchain(const ContractTyEnv& delta, const Blockchain& b);
std::optional<std::string> blockchain_type_error(const ContractTyEnv& delta, const Blockchain& b);

bool type_config(const ContractTyEnv& delta, const Config& cfg,
                 TypingMode mode = TypingMode::Runtime);
/// First failure of type_config as text, or nullopt.
std::optional<std::string> config_type_error(const ContractTyEnv& delta, const Config& cfg,
                                             TypingMode mode = TypingMode::Runtime);

/// Canonical forms: the value shape that a closed value of type `t` must
/// have relative to the chain. `accounts` are the local node's keys.
bool canonical_form_ok(const ExprPtr& v, const Ty& t, const std::vector<std::string>& accounts,
                       const Blockchain& chain);

/// Paths of `match` expressions whose arms may not cover every value.
std::vector<std::string> exhaustiveness_warnings(const ExprPtr& e);

}  // namespace chainsem
