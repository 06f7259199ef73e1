#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "odontoceti/linearizer.hpp"

namespace odon {

/// FIFO of pending transactions; each id at most once.
class Mempool {
 public:
  explicit Mempool(std::size_t capacity = 1'000'000) : capacity_(capacity) {}

  /// False if full or the id was already seen.
  bool push(Transaction tx);
  /// Pops transactions in arrival order while their total size fits in `max_bytes`.
  std::vector<Transaction> drain(std::size_t max_bytes);

  std::size_t size() const { return queue_.size(); }
  bool empty() const { return queue_.empty(); }
  std::size_t dropped() const { return dropped_; }

 private:
  std::size_t capacity_;
  std::deque<Transaction> queue_;
  std::unordered_set<std::uint64_t> seen_;
  std::size_t dropped_ = 0;
};

struct RoundState {
  Round round = 0;     // round of this validator's latest block
  Micros entered = 0;  // when that block was produced
  Micros deadline = 0; // entered + 2 * delta
};

enum class AdvanceReason { AllLeaders, Timeout, LeaderBlames };
std::string_view to_string(AdvanceReason reason);

/// Every round-`round` leader slot without a block is blamed by >= 2f+1
/// distinct round-(round+1) authors.
bool force_due_to_leader_blames(Round round, const DagStore& store, const LeaderSchedule& schedule,
                                const Committee& committee);

/// The block-collection quorum for `rs.round` is present and either every
/// leader block of that round arrived, the 2*delta deadline passed, or (with
/// the optimization) every missing leader is sufficiently blamed.
std::optional<AdvanceReason> ready_to_propose(const RoundState& rs, const DagStore& store,
                                              const LeaderSchedule& schedule,
                                              const Committee& committee, Micros now,
                                              bool early_block_optimization);

struct BlockLimits {
  std::size_t max_parents = 0;        // 0: reference every received block
  std::size_t max_block_bytes = 512 * 1024;
};

/// Builds this validator's block for round rs.round + 1: own previous block
/// first, then round leaders, then everyone else by author; payload drained
/// from the mempool.
Block create_block(ValidatorId self, const RoundState& rs, Mempool& mempool, const DagStore& store,
                   const LeaderSchedule& schedule, const Authenticator& auth, BlockLimits limits,
                   std::vector<Transaction> extra_payload = {});

// ---------------------------------------------------------------------------
// Messages exchanged over the simulated network.

using WireBytes = std::shared_ptr<const std::vector<std::uint8_t>>;

struct BlockMessage {
  WireBytes wire;
};
struct FetchRequest {
  std::vector<BlockRef> refs;
};
struct FetchResponse {
  std::vector<WireBytes> blocks;
};
using Message = std::variant<BlockMessage, FetchRequest, FetchResponse>;

struct Outgoing {
  ValidatorId to;
  Message message;
};

struct TimerRequest {
  Micros at;
  Round round;
};

/// Side effects requested by one validator step; the simulator carries them out.
struct Effects {
  std::vector<Outgoing> sends;
  std::vector<TimerRequest> timers;
  bool crashed = false;
};

struct FaultBehavior {
  enum class Kind { Honest, Crash, Equivocate };
  Kind kind = Kind::Honest;
  Round crash_round = 0;      // Crash: stops before producing this round
  std::uint32_t copies = 2;   // Equivocate: conflicting blocks per round

  bool byzantine() const { return kind == Kind::Equivocate; }
};

struct ValidatorConfig {
  Micros delta = millis(100);
  bool early_block_optimization = true;
  BlockLimits block_limits;
  std::size_t mempool_capacity = 1'000'000;
  DagLimits dag_limits;
};

struct CreatedBlock {
  BlockRef ref;
  Micros time = 0;
};

struct RoundRecord {
  Round round = 0;
  Micros entered = 0;
  Micros advanced = 0;
  AdvanceReason reason = AdvanceReason::AllLeaders;
};

struct DecidedRecord {
  LeaderStatus status;
  Micros time = 0;
};

struct LatencySample {
  std::uint64_t tx = 0;
  ValidatorId validator;
  Micros created = 0;
  Micros committed = 0;
};

struct ValidatorCounters {
  std::uint64_t blocks_received = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t invalid = 0;
  std::uint64_t fetch_requests = 0;
};

/// Per-validator state machine. Single logical thread; all interaction goes
/// through the returned Effects.
class Validator {
 public:
  Validator(ValidatorId id, const Committee& committee, const LeaderSchedule& schedule,
            const Authenticator& auth, ValidatorConfig config, FaultBehavior behavior = {});

  Validator(const Validator&) = delete;
  Validator& operator=(const Validator&) = delete;

  Effects start(Micros now);
  Effects on_message(ValidatorId from, const Message& message, Micros now);
  Effects on_timer(Round round, Micros now);
  Effects on_transaction(Transaction tx, Micros now);
  /// Stops producing new blocks; message handling continues.
  void stop_proposing() { proposing_ = false; }

  ValidatorId id() const { return id_; }
  bool crashed() const { return crashed_; }
  const FaultBehavior& behavior() const { return behavior_; }
  const DagStore& store() const { return store_; }
  const Linearizer& linearizer() const { return linearizer_; }
  const RoundState& round_state() const { return round_; }
  const Mempool& mempool() const { return mempool_; }

  const std::vector<CreatedBlock>& created_blocks() const { return created_; }
  const std::vector<RoundRecord>& round_records() const { return rounds_; }
  const std::vector<DecidedRecord>& decided_records() const { return decided_; }
  const std::vector<LatencySample>& latency_samples() const { return latency_; }
  const ValidatorCounters& counters() const { return counters_; }

 private:
  void receive_block(ValidatorId from, const WireBytes& wire, Micros now, Effects& fx,
                     bool& dag_grew);
  void after_dag_change(Micros now, Effects& fx);
  void try_advance(Micros now, Effects& fx);
  void propose(AdvanceReason reason, Micros now, Effects& fx);
  void run_commit_rule(Micros now);
  void crash(Effects& fx);

  ValidatorId id_;
  const Committee* committee_;
  const LeaderSchedule* schedule_;
  const Authenticator* auth_;
  ValidatorConfig config_;
  FaultBehavior behavior_;

  DagStore store_;
  UniversalCommitter committer_;
  Linearizer linearizer_;
  Mempool mempool_;
  RoundState round_;
  bool proposing_ = true;
  bool crashed_ = false;

  std::map<BlockRef, std::set<std::uint32_t>> fetch_asked_;
  std::unordered_map<std::uint64_t, Micros> pending_tx_;  // own submitted, not yet ordered

  std::vector<CreatedBlock> created_;
  std::vector<RoundRecord> rounds_;
  std::vector<DecidedRecord> decided_;
  std::vector<LatencySample> latency_;
  ValidatorCounters counters_;
};

}  // namespace odon
