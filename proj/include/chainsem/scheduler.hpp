#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainsem/invariants.hpp"
#include "chainsem/node.hpp"
#include "json.hpp"

namespace chainsem {

enum class TransitionKind {
  NodeEval,
  NodeInject,
  NodeReject,
  Query,
  Cast,
  BlockAccept,
  BlockTimeout,
  BlockOriginateAccept,
};

std::string_view transition_kind_name(TransitionKind kind);
std::optional<TransitionKind> transition_kind_from_name(std::string_view name);

struct TransitionId {
  TransitionKind kind = TransitionKind::NodeEval;
  int node = -1;     // program transitions
  int program = -1;  // program transitions
  std::string oph;   // block transitions

  bool is_block() const;
  friend bool operator==(const TransitionId&, const TransitionId&) = default;
};

nlohmann::json transition_to_json(const TransitionId& t);
TransitionId transition_from_json(const nlohmann::json& j);
std::string to_string(const TransitionId& t);

/// Thrown by apply() for a transition that is not enabled.
class StaleTransition : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every rule instance whose premises hold, in a fixed order: programs by
/// (node, program), then pool entries by hash.
std::vector<TransitionId> enabled_transitions(const Config& cfg);

/// Observable outcome of one transition.
struct StepEffect {
  BlockEffect block;                 // block transitions
  std::string oph;                   // NodeInject
  std::vector<std::string> dropped;  // NodeInject under a pool cap
  ExprPtr raised;                    // NodeReject, or a query/cast that raised
  ExprPtr result;                    // query/cast value
  std::optional<Ty> result_ty;       // its type, for the canonical-forms check
  std::string status;                // new status of the affected entry

  nlohmann::json to_json() const;
};

Config apply(const Config& cfg, const TransitionId& t, StepEffect* effect = nullptr);

enum class Policy { Uniform, AcceptEager, TimeoutForcing };

std::string_view policy_name(Policy p);
std::optional<Policy> policy_from_name(std::string_view name);

/// Picks one index into `enabled` (non-empty) according to the policy.
std::size_t choose_transition(const Config& cfg, const std::vector<TransitionId>& enabled,
                              Policy policy, std::mt19937_64& rng);

/// Short content digest of a configuration (hex).
std::string config_digest(const Config& cfg);

/// Per-step invariant monitor. Tracks Δ constructively: it starts from the
/// initial contractors and grows by each accepted origination.
class Monitor {
 public:
  Monitor(const Config& initial, CheckSet checks);
  Monitor(ContractTyEnv delta, CheckSet checks);

  /// Checks of the initial configuration.
  void start(const Config& cfg, std::vector<Violation>& out);
  /// Checks for one transition `before --t--> after`.
  void step(std::size_t index, const Config& before, const TransitionId& t,
            const StepEffect& effect, const Config& after, std::vector<Violation>& out);
  /// Progress for a visited configuration, given how many transitions it
  /// enables.
  void state(std::size_t index, const Config& cfg, std::size_t enabled_count,
             std::vector<Violation>& out);
  /// Full well-formedness of the configuration reached last.
  void finish(std::size_t index, const Config& cfg, std::vector<Violation>& out);

  const ContractTyEnv& delta() const { return delta_; }
  const CheckStats& stats() const { return stats_; }

 private:
  void record(Check c, bool failed);
  void fail(std::vector<Violation>& out, std::string check, std::size_t index, std::string msg);

  CheckSet checks_;
  ContractTyEnv delta_;
  CheckStats stats_;
};

struct TraceEvent {
  std::size_t step = 0;
  TransitionId transition;
  std::string pre;
  std::string post;
  nlohmann::json payload;
};

struct RunOptions {
  std::uint64_t seed = 0;
  std::size_t max_steps = 1000;
  Policy policy = Policy::Uniform;
  CheckSet checks = CheckSet::all();
  bool record = true;  // keep events and digests
  bool stop_on_violation = true;
};

struct RunResult {
  std::vector<TraceEvent> events;
  Config final;
  std::vector<Violation> violations;
  CheckStats stats;
  std::size_t steps = 0;
  bool terminal = false;  // stopped because nothing was enabled
  std::string final_digest;
};

RunResult run(const Config& cfg, const RunOptions& options);

/// JSON-lines: a header, one line per event, and a closing summary.
std::string trace_to_jsonl(const RunResult& result, const RunOptions& options,
                           const std::string& scenario_name);

struct ReplayResult {
  bool ok = false;
  std::size_t steps = 0;
  std::string final_digest;
  std::string message;
};

/// Re-applies the transitions of a JSON-lines trace and compares digests.
ReplayResult replay(const Config& cfg, const std::string& jsonl);

}  // namespace chainsem
