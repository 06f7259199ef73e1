#include "odontoceti/dag_store.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <stdexcept>

namespace odon {

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::BadSignature: return "bad-signature";
    case RejectReason::UnknownAuthor: return "unknown-author";
    case RejectReason::BadParentRound: return "bad-parent-round";
    case RejectReason::InsufficientParents: return "insufficient-parents";
    case RejectReason::DuplicateParentAuthor: return "duplicate-parent-author";
    case RejectReason::MissingSelfParent: return "missing-self-parent";
    case RejectReason::InvalidGenesis: return "invalid-genesis";
    case RejectReason::SuspendedBufferFull: return "suspended-buffer-full";
  }
  return "unknown";
}

DagStore::DagStore(const Committee& committee, const Authenticator& auth, DagLimits limits)
    : committee_(&committee), auth_(&auth), limits_(limits) {
  for (auto id : committee.validators()) store(std::make_shared<const Block>(Block::genesis(id, auth)));
}

Validation DagStore::check_structure(const Block& block) const {
  if (!committee_->contains(block.author())) return Rejected{RejectReason::UnknownAuthor};
  if (!auth_->verify(block.author(), block.digest(), block.signature())) {
    return Rejected{RejectReason::BadSignature};
  }
  if (block.round() == 0) {
    // Genesis is installed at construction; nothing else may claim round 0.
    if (contains(block.reference())) return Accepted{};
    return Rejected{RejectReason::InvalidGenesis};
  }
  const auto& parents = block.parents();
  for (const auto& p : parents) {
    if (p.round + 1 != block.round()) return Rejected{RejectReason::BadParentRound};
  }
  std::vector<bool> seen(committee_->size(), false);
  for (const auto& p : parents) {
    if (!committee_->contains(p.author)) return Rejected{RejectReason::UnknownAuthor};
    if (seen[p.author.index]) return Rejected{RejectReason::DuplicateParentAuthor};
    seen[p.author.index] = true;
  }
  if (parents.size() < committee_->parent_threshold()) {
    return Rejected{RejectReason::InsufficientParents};
  }
  if (parents.front().author != block.author()) return Rejected{RejectReason::MissingSelfParent};
  return Accepted{};
}

Validation DagStore::validate(const Block& block) const {
  auto structural = check_structure(block);
  if (!std::holds_alternative<Accepted>(structural)) return structural;
  Suspended suspended;
  for (const auto& p : block.parents()) {
    if (!contains(p)) suspended.missing.push_back(p);
  }
  if (!suspended.missing.empty()) return suspended;
  return Accepted{};
}

void DagStore::store(BlockPtr block) {
  auto ref = block->reference();
  if (!by_ref_.emplace(ref, block).second) return;
  by_round_[ref.round][ref.author.index].blocks.push_back(block);
  highest_round_ = std::max(highest_round_, ref.round);
}

void DagStore::insert(BlockPtr block) {
  for (const auto& p : block->parents()) {
    // Parents sit exactly one round below, so the DAG cannot contain a cycle.
    assert(p.round + 1 == block->round());
    if (!contains(p)) throw std::logic_error("insert: unresolved parent " + p.to_string());
  }
  store(std::move(block));
}

AcceptOutcome DagStore::accept(BlockPtr block) {
  AcceptOutcome out;
  auto ref = block->reference();
  if (contains(ref) || is_suspended(ref)) {
    out.duplicate = true;
    return out;
  }
  auto verdict = validate(*block);
  if (auto* rej = std::get_if<Rejected>(&verdict)) {
    out.rejected = rej->reason;
    return out;
  }
  if (auto* sus = std::get_if<Suspended>(&verdict)) {
    if (suspended_.size() >= limits_.suspended_capacity) {
      out.rejected = RejectReason::SuspendedBufferFull;
      return out;
    }
    suspended_.emplace(ref, Pending{block, sus->missing.size()});
    for (const auto& m : sus->missing) {
      waiting_on_[m].push_back(ref);
      if (!is_suspended(m)) out.missing.push_back(m);
    }
    return out;
  }

  std::deque<BlockPtr> ready{block};
  while (!ready.empty()) {
    auto next = ready.front();
    ready.pop_front();
    auto next_ref = next->reference();
    insert(next);
    out.inserted.push_back(next);
    auto it = waiting_on_.find(next_ref);
    if (it == waiting_on_.end()) continue;
    auto children = std::move(it->second);
    waiting_on_.erase(it);
    for (const auto& child_ref : children) {
      auto pit = suspended_.find(child_ref);
      if (pit == suspended_.end()) continue;
      if (--pit->second.unresolved == 0) {
        ready.push_back(pit->second.block);
        suspended_.erase(pit);
      }
    }
  }
  return out;
}

BlockPtr DagStore::get(const BlockRef& ref) const {
  auto it = by_ref_.find(ref);
  return it == by_ref_.end() ? nullptr : it->second;
}

std::vector<BlockPtr> DagStore::get_blocks_by_round(Round round) const {
  std::vector<BlockPtr> out;
  auto it = by_round_.find(round);
  if (it == by_round_.end()) return out;
  for (const auto& [author, slot] : it->second) {
    auto blocks = slot.blocks;
    std::sort(blocks.begin(), blocks.end(),
              [](const BlockPtr& a, const BlockPtr& b) { return a->digest() < b->digest(); });
    out.insert(out.end(), blocks.begin(), blocks.end());
  }
  return out;
}

std::vector<BlockPtr> DagStore::get_blocks_at_authority_round(ValidatorId author, Round round) const {
  auto it = by_round_.find(round);
  if (it == by_round_.end()) return {};
  auto sit = it->second.find(author.index);
  if (sit == it->second.end()) return {};
  auto blocks = sit->second.blocks;
  std::sort(blocks.begin(), blocks.end(),
            [](const BlockPtr& a, const BlockPtr& b) { return a->digest() < b->digest(); });
  return blocks;
}

bool DagStore::block_exists_at_authority_round(ValidatorId author, Round round) const {
  return first_block_at_authority_round(author, round) != nullptr;
}

BlockPtr DagStore::first_block_at_authority_round(ValidatorId author, Round round) const {
  auto it = by_round_.find(round);
  if (it == by_round_.end()) return nullptr;
  auto sit = it->second.find(author.index);
  if (sit == it->second.end() || sit->second.blocks.empty()) return nullptr;
  return sit->second.blocks.front();
}

std::unordered_set<BlockRef> DagStore::ancestors_at_round(const BlockRef& from, Round round) const {
  std::unordered_set<BlockRef> result;
  if (from.round < round || !contains(from)) return result;
  if (from.round == round) {
    result.insert(from);
    return result;
  }
  std::unordered_set<BlockRef> frontier{from};
  for (Round r = from.round; r > round; --r) {
    std::unordered_set<BlockRef> next;
    for (const auto& ref : frontier) {
      for (const auto& p : get(ref)->parents()) next.insert(p);
    }
    frontier = std::move(next);
  }
  return frontier;
}

bool DagStore::link(const BlockRef& older, const BlockRef& newer) const {
  if (older == newer) return contains(older);
  if (older.round >= newer.round) return false;
  return ancestors_at_round(newer, older.round).contains(older);
}

}  // namespace odon
