#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "odontoceti/block.hpp"
#include "odontoceti/committee.hpp"

namespace odon {

enum class RejectReason {
  BadSignature,
  UnknownAuthor,
  BadParentRound,
  InsufficientParents,
  DuplicateParentAuthor,
  MissingSelfParent,
  InvalidGenesis,
  SuspendedBufferFull,
};

std::string_view to_string(RejectReason reason);

struct Accepted {};
struct Suspended {
  std::vector<BlockRef> missing;
};
struct Rejected {
  RejectReason reason;
};
using Validation = std::variant<Accepted, Suspended, Rejected>;

struct DagLimits {
  std::size_t suspended_capacity = 10'000;
};

/// Result of feeding one block into the store.
struct AcceptOutcome {
  bool duplicate = false;
  std::optional<RejectReason> rejected;
  /// Newly stored blocks in causal order: the block itself and any suspended
  /// descendants it unblocked.
  std::vector<BlockPtr> inserted;
  /// Unknown ancestors that must be fetched (neither stored nor suspended).
  std::vector<BlockRef> missing;
};

/// Round- and author-indexed block storage. Several blocks may share an
/// (author, round) pair. Every stored block's causal history is stored too.
///
/// Single owner; not safe for concurrent mutation.
class DagStore {
 public:
  DagStore(const Committee& committee, const Authenticator& auth, DagLimits limits = {});

  const Committee& committee() const { return *committee_; }

  /// Structural and signature checks plus parent resolution. Pure.
  Validation validate(const Block& block) const;

  /// Inserts a block that passed validate(). Idempotent for identical blocks.
  void insert(BlockPtr block);

  /// validate + insert or suspend, then re-run suspended descendants.
  AcceptOutcome accept(BlockPtr block);

  bool contains(const BlockRef& ref) const { return by_ref_.contains(ref); }
  bool is_suspended(const BlockRef& ref) const { return suspended_.contains(ref); }
  BlockPtr get(const BlockRef& ref) const;

  /// Blocks of a round ordered by (author, digest).
  std::vector<BlockPtr> get_blocks_by_round(Round round) const;
  /// Equivocation-aware; ordered by digest.
  std::vector<BlockPtr> get_blocks_at_authority_round(ValidatorId author, Round round) const;
  bool block_exists_at_authority_round(ValidatorId author, Round round) const;
  /// Earliest-inserted block of (author, round), if any.
  BlockPtr first_block_at_authority_round(ValidatorId author, Round round) const;

  Round highest_round() const { return highest_round_; }
  std::size_t size() const { return by_ref_.size(); }
  std::size_t suspended_count() const { return suspended_.size(); }

  /// True iff a parent-edge path leads from `newer` back to `older`. Reflexive.
  bool link(const BlockRef& older, const BlockRef& newer) const;

  /// Blocks at `round` in the causal history of `from` (inclusive of `from`
  /// itself when from.round == round).
  std::unordered_set<BlockRef> ancestors_at_round(const BlockRef& from, Round round) const;

 private:
  struct Slot {
    std::vector<BlockPtr> blocks;  // insertion order
  };
  struct Pending {
    BlockPtr block;
    std::size_t unresolved = 0;
  };

  void store(BlockPtr block);
  Validation check_structure(const Block& block) const;

  const Committee* committee_;
  const Authenticator* auth_;
  DagLimits limits_;
  std::unordered_map<BlockRef, BlockPtr> by_ref_;
  std::map<Round, std::map<std::uint32_t, Slot>> by_round_;
  Round highest_round_ = 0;

  std::unordered_map<BlockRef, Pending> suspended_;
  std::unordered_map<BlockRef, std::vector<BlockRef>> waiting_on_;
};

}  // namespace odon
