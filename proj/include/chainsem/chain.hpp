#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainsem/contracts.hpp"
#include "chainsem/stored.hpp"
#include "json.hpp"

namespace chainsem {

/// Blocks accept an operation at most this many time units after injection.
inline constexpr std::int64_t kAcceptWindow = 60;

struct Counter {
  std::int64_t n = 0;
  bool busy = false;  // one operation from this account is in flight

  friend bool operator==(const Counter&, const Counter&) = default;
};

struct ManagerEntry {
  std::int64_t bal = 0;
  Counter cnt;

  friend bool operator==(const ManagerEntry&, const ManagerEntry&) = default;
};

struct ContractorEntry {
  std::string code;  // script text
  std::int64_t t = 0;
  std::int64_t bal = 0;
  StoredValue storage;

  friend bool operator==(const ContractorEntry&, const ContractorEntry&) = default;
};

enum class OpKind { Transfer, Originate };

struct Operation {
  OpKind kind = OpKind::Transfer;
  std::int64_t nt = 0;
  std::string sender;  // puk
  std::string target;  // transfer: puk or puh
  std::string code;    // originate: script
  StoredValue arg;     // transfer: parameter; originate: initial storage
  std::int64_t fee = 0;

  friend bool operator==(const Operation&, const Operation&) = default;
};

enum class StatusKind { Pending, Included, Timeout };

struct Status {
  StatusKind kind = StatusKind::Pending;
  std::int64_t t = 0;  // Included only

  friend bool operator==(const Status&, const Status&) = default;
};

struct PoolEntry {
  Operation op;
  std::int64_t t = 0;  // injection time
  Status status;
  /// Included, but the contract refused the call when the block ran it, so
  /// only the fee was taken.
  bool backtracked = false;

  friend bool operator==(const PoolEntry&, const PoolEntry&) = default;
};

struct ChainParams {
  std::int64_t min_fee = 1;
  std::optional<std::size_t> pool_cap;

  friend bool operator==(const ChainParams&, const ChainParams&) = default;
};

using Pool = std::map<std::string, PoolEntry>;
using Managers = std::map<std::string, ManagerEntry>;
using Contractors = std::map<std::string, ContractorEntry>;

struct Blockchain {
  Pool pool;
  Managers managers;
  Contractors contractors;
  std::int64_t time = 0;
  /// Fees collected so far; kept so that the token total is checkable.
  std::int64_t burnt = 0;
  ChainParams params;

  friend bool operator==(const Blockchain&, const Blockchain&) = default;
};

/// Raised when a block-level transition is applied outside its premises.
class ChainFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// --- hashes -----------------------------------------------------------------------------

std::string gen_op_hash(const Operation& op, std::int64_t t);
std::string gen_contract_hash(const std::string& code, std::int64_t t);
std::string puk_of(const std::string& name);  // "alice" -> "puk_alice"

/// First 16 bytes of SHA-256, hex encoded.
std::string digest_hex(const std::string& data);

/// Canonical text fed to the hash; also used for state canonicalization.
std::string operation_key(const Operation& op);

// --- checks -----------------------------------------------------------------------------

bool chk_bal(const Managers& m, const std::string& puk, std::int64_t nt, std::int64_t fee);
bool chk_count(const Managers& m, const std::string& puk);
bool chk_puh(const Contractors& c, const std::string& puh);
bool chk_arg(const Contractors& c, const std::string& puh, const StoredValue& param);
bool chk_fee(const ChainParams& params, std::int64_t fee);
bool chk_init(const std::string& code, const StoredValue& init);
bool chk_prg(const std::string& code);

/// Every puk/puh token inside a stored value names a registered account.
bool stored_refs_resolve(const Blockchain& b, const StoredValue& s, const Ty& t);

// --- updates ----------------------------------------------------------------------------

Managers upd_count(Managers m, const std::string& puk, bool busy);
Managers upd_succ(Managers m, const std::string& puk, std::int64_t nt, std::int64_t fee);

struct ContractEffect {
  bool ok = false;
  std::string message;           // !ok
  std::optional<Refund> refund;  // ok and the target is registered
};

/// Runs the contract for an accepted call and updates its storage and
/// balance. On FAILWITH the contractors are returned unchanged.
Contractors upd_constr(Contractors c, const std::string& puh, std::int64_t nt,
                       const StoredValue& param, const std::string& sender,
                       ContractEffect* effect = nullptr);

// --- block transitions ------------------------------------------------------------------

/// Side information of a block step that the invariant checks need.
struct BlockEffect {
  std::map<std::string, std::int64_t> credits;  // address -> tokens received
  bool backtracked = false;
  std::string message;         // contract refusal when backtracked
  std::string originated;      // new puh for an accepted origination
};

bool accept_enabled(const Blockchain& b, const std::string& oph);
bool timeout_enabled(const Blockchain& b, const std::string& oph);

/// Block-Accept for transfers and invocations.
Blockchain block_accept(const Blockchain& b, const std::string& oph, BlockEffect* effect = nullptr);
Blockchain block_originate_accept(const Blockchain& b, const std::string& oph,
                                  BlockEffect* effect = nullptr);
Blockchain block_timeout(const Blockchain& b, const std::string& oph);

/// Adds a pending entry and marks the sender busy. Premises are the
/// caller's business; only hash freshness is enforced here.
Blockchain inject(const Blockchain& b, const Operation& op, std::string* oph_out = nullptr);

/// Pool-capacity enforcement: while the pending count is at or above the
/// cap, time out the oldest pending entry. Returns the hashes timed out.
std::vector<std::string> enforce_pool_cap(Blockchain& b);

// --- well-formedness ----------------------------------------------------------------------

/// Pool hash equation, inclusion times, contractor hash equation, busy flags
/// matching pending entries. Returns the first problem found.
std::optional<std::string> check_well_formed(const Blockchain& b);
bool well_formed(const Blockchain& b);

std::int64_t token_total(const Blockchain& b);

std::string status_name(const Status& s);

// --- JSON snapshot ------------------------------------------------------------------------

nlohmann::json chain_to_json(const Blockchain& b);
Blockchain chain_from_json(const nlohmann::json& j);

}  // namespace chainsem
