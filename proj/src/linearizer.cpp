#include "odontoceti/linearizer.hpp"

#include <algorithm>

namespace odon {

std::vector<BlockPtr> linearize_sub_dags(std::span<const BlockPtr> leaders, const DagStore& store,
                                         std::unordered_set<BlockRef>& emitted) {
  std::vector<BlockPtr> out;
  for (const auto& leader : leaders) {
    // Emitted sets are always parent-closed, so the walk can stop at any
    // already-emitted block.
    std::vector<BlockPtr> sub_dag;
    std::vector<BlockPtr> stack;
    if (emitted.insert(leader->reference()).second) stack.push_back(leader);
    while (!stack.empty()) {
      auto block = stack.back();
      stack.pop_back();
      sub_dag.push_back(block);
      for (const auto& p : block->parents()) {
        if (emitted.insert(p).second) stack.push_back(store.get(p));
      }
    }
    std::sort(sub_dag.begin(), sub_dag.end(), [](const BlockPtr& a, const BlockPtr& b) {
      return RoundAuthorDigestLess{}(a->reference(), b->reference());
    });
    out.insert(out.end(), sub_dag.begin(), sub_dag.end());
  }
  return out;
}

CommitStep Linearizer::extend_commit_sequence(const DagStore& store, Micros now) {
  CommitStep step;
  Round r_committed = last_decided_ ? last_decided_->round - 1 : 0;
  auto statuses = committer_->try_decide(r_committed, store.highest_round(), store);

  std::vector<BlockPtr> new_leaders;
  std::vector<LeaderSlot> new_leader_slots;
  for (auto& status : statuses) {
    if (last_decided_ && !last_decided_->precedes(status.slot)) continue;
    if (!status.decided()) break;
    last_decided_ = status.slot;
    if (status.state == Decision::Commit) {
      new_leaders.push_back(status.block);
      new_leader_slots.push_back(status.slot);
      committed_leaders_.push_back(status.block);
    }
    decided_.push_back(status);
    step.decided.push_back(std::move(status));
  }

  for (std::size_t i = 0; i < new_leaders.size(); ++i) {
    auto delta = linearize_sub_dags(std::span(&new_leaders[i], 1), store, emitted_);
    for (auto& block : delta) {
      OrderedBlock entry{std::move(block), new_leader_slots[i], order_.size(), now};
      order_.push_back(entry);
      step.ordered.push_back(std::move(entry));
    }
  }
  return step;
}

std::uint64_t Linearizer::undecided_tail(Round highest_round) const {
  const auto& schedule = committer_->schedule();
  std::uint64_t tail = 0;
  Round start = last_decided_ ? last_decided_->round : 1;
  for (Round r = start; r <= highest_round; ++r) {
    for (const auto& slot : schedule.slots(r)) {
      if (!last_decided_ || last_decided_->precedes(slot)) ++tail;
    }
  }
  return tail;
}

}  // namespace odon
