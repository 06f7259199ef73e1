#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "odontoceti/committer.hpp"

namespace odon {

/// One block in the total order.
struct OrderedBlock {
  BlockPtr block;
  LeaderSlot leader_slot;  // committed leader whose sub-DAG emitted the block
  std::uint64_t emit_index = 0;
  Micros commit_time = 0;
};

/// Emits every block in the causal history of each leader (in order) that is
/// not already in `emitted`, sorted by (round, author, digest). Updates `emitted`.
std::vector<BlockPtr> linearize_sub_dags(std::span<const BlockPtr> leaders, const DagStore& store,
                                         std::unordered_set<BlockRef>& emitted);

/// What one extension step added.
struct CommitStep {
  std::vector<LeaderStatus> decided;  // newly decided slots, sequencing order
  std::vector<OrderedBlock> ordered;  // newly ordered blocks
};

/// Per-validator commit sequence and total order. Append-only.
class Linearizer {
 public:
  explicit Linearizer(const UniversalCommitter& committer) : committer_(&committer) {}

  /// Runs the decision rule from the last decided slot up to the highest
  /// round in `store`, extends the leader sequence up to the first undecided
  /// slot and linearizes the new leaders' sub-DAGs at time `now`.
  CommitStep extend_commit_sequence(const DagStore& store, Micros now);

  const std::vector<LeaderStatus>& decided_slots() const { return decided_; }
  const std::vector<BlockPtr>& commit_sequence() const { return committed_leaders_; }
  const std::vector<OrderedBlock>& order() const { return order_; }
  std::optional<LeaderSlot> last_decided() const { return last_decided_; }
  bool is_ordered(const BlockRef& ref) const { return emitted_.contains(ref); }

  /// Leader slots after the last decided one, up to `highest_round`.
  std::uint64_t undecided_tail(Round highest_round) const;

 private:
  const UniversalCommitter* committer_;
  std::optional<LeaderSlot> last_decided_;
  std::vector<LeaderStatus> decided_;
  std::vector<BlockPtr> committed_leaders_;
  std::vector<OrderedBlock> order_;
  std::unordered_set<BlockRef> emitted_;
};

}  // namespace odon
