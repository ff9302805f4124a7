#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chainsem/chain.hpp"
#include "chainsem/expr.hpp"

namespace chainsem {

struct Account {
  std::string pak;  // opaque, never used cryptographically
  std::string puk;

  friend bool operator==(const Account&, const Account&) = default;
};

struct Node {
  std::vector<ExprPtr> programs;
  std::vector<Account> accounts;

  bool owns(const std::string& puk) const;
};

struct Config {
  Blockchain chain;
  std::vector<Node> nodes;
};

/// Structural equality (programs compared as trees).
bool config_equal(const Config& a, const Config& b);

/// Accounts pairwise disjoint across nodes and all registered as managers.
std::optional<std::string> check_config_well_formed(const Config& cfg);

/// The operation record described by a fully evaluated transfer/originate
/// redex, or nullopt if the arguments do not have the expected shapes.
std::optional<Operation> operation_of(const Expr& redex);

struct InjectOutcome {
  bool accepted = false;
  Blockchain chain;                  // accepted
  std::string oph;                   // accepted
  std::vector<std::string> dropped;  // accepted: entries timed out by the pool cap
  ExprPtr exception;                 // rejected
};

/// Node-Inject / Node-Reject for `transfer` (including contract calls).
InjectOutcome try_inject_transfer(const Node& node, const Blockchain& chain, const Expr& redex);
/// Node-Inject / Node-Reject for `originate`.
InjectOutcome try_inject_originate(const Node& node, const Blockchain& chain, const Expr& redex);
/// Dispatches on the redex kind.
InjectOutcome try_inject(const Node& node, const Blockchain& chain, const Expr& redex);

enum class QueryOutcome { Value, Raise, Blocked };

struct QueryResult {
  QueryOutcome kind = QueryOutcome::Blocked;
  ExprPtr value;  // the result, or the raised exception
};

QueryResult run_query(const Blockchain& chain, QueryKind kind, const ExprPtr& arg);

struct CastResult {
  bool ok = false;
  ExprPtr value;  // the cast value, or the raised exception
};

/// Chain-checked downcast along one of the three axioms.
CastResult perform_downcast(const Blockchain& chain, const ExprPtr& v, const Ty& from,
                            const Ty& to);

}  // namespace chainsem
