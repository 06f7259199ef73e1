#include "odontoceti/committer.hpp"

#include <algorithm>

namespace odon {

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Undecided: return "undecided";
    case Decision::Commit: return "commit";
    case Decision::Skip: return "skip";
  }
  return "unknown";
}

LeaderSchedule::LeaderSchedule(const Committee& committee, bool pipelined)
    : leaders_per_round_(committee.leaders_per_round()),
      pipelined_(pipelined),
      elect_([n = committee.size()](Round round, std::uint32_t rank) {
        return ValidatorId{static_cast<std::uint32_t>((round + rank) % n)};
      }) {}

LeaderSchedule::LeaderSchedule(std::uint32_t leaders_per_round, bool pipelined, Elect elect)
    : leaders_per_round_(leaders_per_round), pipelined_(pipelined), elect_(std::move(elect)) {}

std::vector<LeaderSlot> LeaderSchedule::slots(Round round) const {
  std::vector<LeaderSlot> out;
  if (!is_leader_round(round)) return out;
  for (std::uint32_t rank = 0; rank < leaders_per_round_; ++rank) out.push_back(slot(round, rank));
  return out;
}

WaveRounds wave_arithmetic(Round wave_offset, Round round) {
  Round wave = (round - wave_offset) / kWaveLength;
  Round propose = wave * kWaveLength + wave_offset;
  return {wave, propose, propose + kWaveLength - 1};
}

Decider::Decider(const Committee& committee, const LeaderSchedule& schedule, Round wave_offset,
                 std::uint32_t leader_offset)
    : committee_(&committee),
      schedule_(&schedule),
      wave_offset_(wave_offset),
      leader_offset_(leader_offset) {}

LeaderSlot Decider::slot(Round wave) const { return schedule_->slot(propose_round(wave), leader_offset_); }

bool Decider::supported_leader(Round wave, const BlockRef& leader, const DagStore& store) const {
  QuorumCounter support(*committee_, committee_->quorum_threshold());
  for (const auto& block : store.get_blocks_by_round(decision_round(wave))) {
    if (is_support(*block, leader) && support.add(block->author())) return true;
  }
  return false;
}

bool Decider::skipped_leader(Round wave, const DagStore& store) const {
  auto leader_slot = slot(wave);
  QuorumCounter blame(*committee_, committee_->quorum_threshold());
  for (const auto& block : store.get_blocks_by_round(decision_round(wave))) {
    const auto& parents = block->parents();
    bool references_leader = std::any_of(parents.begin(), parents.end(), [&](const BlockRef& p) {
      return p.author == leader_slot.authority && p.round == leader_slot.round;
    });
    if (!references_leader && blame.add(block->author())) return true;
  }
  return false;
}

LeaderStatus Decider::try_direct_decide(Round wave, const DagStore& store) const {
  LeaderStatus status;
  status.slot = slot(wave);
  if (skipped_leader(wave, store)) {
    status.state = Decision::Skip;
    status.path = DecisionPath::Direct;
    return status;
  }
  for (const auto& leader : store.get_blocks_at_authority_round(status.slot.authority, status.slot.round)) {
    if (supported_leader(wave, leader->reference(), store)) {
      status.state = Decision::Commit;
      status.block = leader;
      status.path = DecisionPath::Direct;
      return status;
    }
  }
  return status;
}

LeaderStatus Decider::try_indirect_decide(Round wave, std::span<const LeaderStatus> later,
                                          const DagStore& store) const {
  LeaderStatus status;
  status.slot = slot(wave);
  Round r_decision = decision_round(wave);
  auto anchor = std::find_if(later.begin(), later.end(), [&](const LeaderStatus& s) {
    return s.slot.round > r_decision && s.state != Decision::Skip;
  });
  if (anchor == later.end() || anchor->state != Decision::Commit) return status;

  status.path = DecisionPath::Indirect;
  auto anchor_ref = anchor->block->reference();
  for (const auto& leader : store.get_blocks_at_authority_round(status.slot.authority, status.slot.round)) {
    if (thick_link(anchor_ref, leader->reference(), store, *committee_)) {
      status.state = Decision::Commit;
      status.block = leader;
      return status;
    }
  }
  status.state = Decision::Skip;
  return status;
}

bool thick_link(const BlockRef& anchor, const BlockRef& leader, const DagStore& store,
                const Committee& committee) {
  Round decision = leader.round + 1;
  if (anchor.round < decision) return false;
  QuorumCounter support(committee, committee.indirect_quorum_threshold());
  for (const auto& ref : store.ancestors_at_round(anchor, decision)) {
    if (is_support(*store.get(ref), leader) && support.add(ref.author)) return true;
  }
  return false;
}

UniversalCommitter::UniversalCommitter(const Committee& committee, LeaderSchedule schedule)
    : committee_(&committee), schedule_(std::move(schedule)) {}

std::vector<LeaderStatus> UniversalCommitter::try_decide(Round r_committed, Round r_highest,
                                                         const DagStore& store) const {
  // Filled back to front so the already decided later slots are always a
  // contiguous suffix in sequencing order.
  std::size_t count = 0;
  for (Round r = r_committed + 1; r <= r_highest; ++r) {
    if (schedule_.is_leader_round(r)) count += schedule_.leaders_per_round();
  }
  std::vector<LeaderStatus> out(count);
  std::size_t next = count;
  for (Round r = r_highest; r > r_committed; --r) {
    if (!schedule_.is_leader_round(r)) continue;
    for (std::uint32_t rank = schedule_.leaders_per_round(); rank-- > 0;) {
      Decider decider(*committee_, schedule_, r % kWaveLength, rank);
      Round wave = decider.wave_number(r);
      auto status = decider.try_direct_decide(wave, store);
      if (!status.decided()) {
        status = decider.try_indirect_decide(wave, std::span<const LeaderStatus>(out).subspan(next), store);
      }
      out[--next] = std::move(status);
    }
  }
  return out;
}

}  // namespace odon
