#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "odontoceti/committee.hpp"
#include "odontoceti/dag_store.hpp"

namespace odon {

constexpr Round kWaveLength = 2;

struct LeaderSlot {
  Round round = 0;
  std::uint32_t rank = 0;
  ValidatorId authority;

  auto operator<=>(const LeaderSlot&) const = default;

  /// Sequencing order: round ascending, then rank ascending (rank 0 first).
  bool precedes(const LeaderSlot& other) const {
    return round != other.round ? round < other.round : rank < other.rank;
  }
};

enum class Decision { Undecided, Commit, Skip };
enum class DecisionPath { None, Direct, Indirect };

std::string_view to_string(Decision d);

struct LeaderStatus {
  LeaderSlot slot;
  Decision state = Decision::Undecided;
  BlockPtr block;  // set iff state == Commit
  DecisionPath path = DecisionPath::None;

  bool decided() const { return state != Decision::Undecided; }
};

/// Which (round, rank) pairs are leader slots and who holds them.
class LeaderSchedule {
 public:
  using Elect = std::function<ValidatorId(Round, std::uint32_t)>;

  /// Round-robin schedule from the committee.
  explicit LeaderSchedule(const Committee& committee, bool pipelined = true);
  /// Custom assignment, for hand-built DAGs.
  LeaderSchedule(std::uint32_t leaders_per_round, bool pipelined, Elect elect);

  std::uint32_t leaders_per_round() const { return leaders_per_round_; }
  bool pipelined() const { return pipelined_; }

  /// Round 0 is genesis and never a leader round. Without pipelining only
  /// waves with offset 0 exist, so only even rounds hold leaders.
  bool is_leader_round(Round round) const {
    return round >= 1 && (pipelined_ || round % kWaveLength == 0);
  }
  ValidatorId leader(Round round, std::uint32_t rank) const { return elect_(round, rank); }
  LeaderSlot slot(Round round, std::uint32_t rank) const { return {round, rank, leader(round, rank)}; }
  std::vector<LeaderSlot> slots(Round round) const;

 private:
  std::uint32_t leaders_per_round_;
  bool pipelined_;
  Elect elect_;
};

/// Decides one leader offset of one wave offset.
class Decider {
 public:
  Decider(const Committee& committee, const LeaderSchedule& schedule, Round wave_offset,
          std::uint32_t leader_offset);

  Round wave_number(Round round) const { return (round - wave_offset_) / kWaveLength; }
  Round propose_round(Round wave) const { return wave * kWaveLength + wave_offset_; }
  Round decision_round(Round wave) const { return propose_round(wave) + (kWaveLength - 1); }

  LeaderSlot slot(Round wave) const;

  /// >= 4f+1 distinct decision-round authors include `leader` as a parent.
  bool supported_leader(Round wave, const BlockRef& leader, const DagStore& store) const;
  /// >= 4f+1 distinct decision-round authors reference no propose-round block
  /// of the slot's authority.
  bool skipped_leader(Round wave, const DagStore& store) const;

  LeaderStatus try_direct_decide(Round wave, const DagStore& store) const;
  /// `later` holds the statuses already produced for slots after this one, in
  /// sequencing order.
  LeaderStatus try_indirect_decide(Round wave, std::span<const LeaderStatus> later,
                                   const DagStore& store) const;

 private:
  const Committee* committee_;
  const LeaderSchedule* schedule_;
  Round wave_offset_;
  std::uint32_t leader_offset_;
};

/// Wave arithmetic for a given offset: (wave, propose round, decision round).
struct WaveRounds {
  Round wave;
  Round propose;
  Round decision;
};
WaveRounds wave_arithmetic(Round wave_offset, Round round);

/// >= 2f+1 distinct-author decision blocks that support `leader` and are in
/// the causal history of `anchor`.
bool thick_link(const BlockRef& anchor, const BlockRef& leader, const DagStore& store,
                const Committee& committee);

/// Runs the decision rule over every leader slot in rounds
/// (r_committed, r_highest], highest round and lowest rank first. Returns
/// the statuses in sequencing order (round ascending, rank ascending).
class UniversalCommitter {
 public:
  UniversalCommitter(const Committee& committee, LeaderSchedule schedule);

  const LeaderSchedule& schedule() const { return schedule_; }
  const Committee& committee() const { return *committee_; }

  std::vector<LeaderStatus> try_decide(Round r_committed, Round r_highest,
                                       const DagStore& store) const;

 private:
  const Committee* committee_;
  LeaderSchedule schedule_;
};

}  // namespace odon
