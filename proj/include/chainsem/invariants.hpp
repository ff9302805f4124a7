#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chainsem/chain.hpp"
#include "chainsem/node.hpp"
#include "chainsem/typecheck.hpp"

namespace chainsem {

/// Per-step assertions a run or exploration can enable.
enum class Check {
  References,    // every hash/key literal in a program resolves
  ChainSteps,    // the nine per-step chain properties
  Consistency,   // each pool entry satisfies its typing clause
  Preservation,  // the configuration stays typed under the extended Δ
  Progress,      // typed and not finished implies some transition
  Canonical,     // query and cast results have canonical shapes
  Conservation,  // tokens are neither created nor destroyed
  WellFormed,    // pool/contract hash equations, counters, disjoint accounts
};

inline constexpr std::size_t kCheckCount = 8;

std::string_view check_name(Check c);
std::optional<Check> check_from_name(std::string_view name);

struct CheckSet {
  std::array<bool, kCheckCount> on{};

  bool has(Check c) const { return on[static_cast<std::size_t>(c)]; }
  CheckSet& enable(Check c) {
    on[static_cast<std::size_t>(c)] = true;
    return *this;
  }

  static CheckSet all();
  static CheckSet none();
  /// "all", "none", or a comma-separated list of check names.
  static CheckSet parse(std::string_view spec);
  std::string to_string() const;
};

struct Violation {
  std::string check;  // check name, with ".itemN" for chain-step items
  std::size_t step = 0;
  std::string message;
};

/// Literals in live programs resolve in the chain.
std::optional<std::string> check_references(const Config& cfg);

/// The nine chain-step properties between consecutive chain states.
/// `effect` carries the credits of a block step (nullptr for other steps).
/// Returns (item number, message) pairs.
std::vector<std::pair<int, std::string>> check_chain_step(const Blockchain& before,
                                                          const Blockchain& after,
                                                          const BlockEffect* effect);

/// Consistency: every pool entry against its clause.
std::optional<std::string> check_consistency(const Blockchain& b);

enum class ProgramStatus { Done, Aborted, Active, Blocked, Stuck };

ProgramStatus program_status(const Node& node, const Blockchain& chain, const ExprPtr& program);

/// Progress: with no enabled transition, every program must be a value or
/// an uncaught exception; no program may ever be stuck.
std::optional<std::string> check_progress(const Config& cfg, std::size_t enabled_count);

/// True if every program of every node is the unit value.
bool all_programs_unit(const Config& cfg);

/// Well-formed configuration and chain, with the full hash recomputation.
std::optional<std::string> check_config(const Config& cfg);

/// Tally of evaluations and failures per check.
struct CheckStats {
  std::map<std::string, std::size_t> evaluated;
  std::map<std::string, std::size_t> failed;

  void merge(const CheckStats& other);
  std::size_t total_failed() const;
};

}  // namespace chainsem
