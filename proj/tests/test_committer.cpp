#include <map>
#include <random>
#include <set>

#include "dag_builder.hpp"
#include "reference_dag.hpp"
#include "doctest.h"
#include "odontoceti/linearizer.hpp"

using namespace odon;
using odon::testing::DagBuilder;
using namespace odon::testing::reference;

namespace {

const LeaderStatus& find(const std::vector<LeaderStatus>& statuses, Round round, std::uint32_t rank) {
  for (const auto& s : statuses) {
    if (s.slot.round == round && s.slot.rank == rank) return s;
  }
  throw std::logic_error("slot not found");
}

// Independent oracle for thick links: explicit ancestor closure, then count
// distinct supporting authors one round above the leader.
bool thick_link_oracle(DagStore& store, const BlockRef& anchor, const BlockRef& leader) {
  std::set<BlockRef> seen{anchor};
  std::vector<BlockRef> todo{anchor};
  while (!todo.empty()) {
    auto ref = todo.back();
    todo.pop_back();
    for (const auto& p : store.get(ref)->parents()) {
      if (seen.insert(p).second) todo.push_back(p);
    }
  }
  std::set<std::uint32_t> authors;
  for (const auto& ref : seen) {
    if (ref.round != leader.round + 1) continue;
    const auto& parents = store.get(ref)->parents();
    if (std::find(parents.begin(), parents.end(), leader) != parents.end()) authors.insert(ref.author.index);
  }
  return authors.size() >= store.committee().indirect_quorum_threshold();
}

}  // namespace

TEST_CASE("wave arithmetic") {
  auto w = wave_arithmetic(0, 4);
  CHECK(w.wave == 2);
  CHECK(w.propose == 4);
  CHECK(w.decision == 5);
  w = wave_arithmetic(1, 5);
  CHECK(w.wave == 2);
  CHECK(w.propose == 5);
  CHECK(w.decision == 6);
  w = wave_arithmetic(1, 1);
  CHECK(w.wave == 0);
  CHECK(w.propose == 1);
  CHECK(w.decision == 2);

  Committee c(6);
  LeaderSchedule s(c, true);
  Decider odd(c, s, 1, 0);
  CHECK(odd.propose_round(odd.wave_number(7)) == 7);
  CHECK(odd.decision_round(odd.wave_number(7)) == 8);
}

TEST_CASE("leader rounds with and without pipelining") {
  Committee c(6, 2);
  LeaderSchedule piped(c, true);
  LeaderSchedule plain(c, false);
  CHECK_FALSE(piped.is_leader_round(0));
  CHECK(piped.is_leader_round(1));
  CHECK(piped.is_leader_round(2));
  CHECK_FALSE(plain.is_leader_round(1));
  CHECK(plain.is_leader_round(2));
  CHECK_FALSE(plain.is_leader_round(3));
  auto slots = piped.slots(5);
  REQUIRE(slots.size() == 2);
  CHECK(slots[0].authority == ValidatorId{5});
  CHECK(slots[1].authority == ValidatorId{0});
  CHECK(slots[0].precedes(slots[1]));
  CHECK(slots[1].precedes(piped.slot(6, 0)));
}

TEST_CASE("reference two-leader DAG: every slot outcome and the leader sequence") {
  DagBuilder d(6, 2);
  build_reference_dag(d);
  auto schedule = reference_schedule();
  UniversalCommitter committer(d.committee(), schedule);
  auto statuses = committer.try_decide(0, d.store().highest_round(), d.store());
  REQUIRE(statuses.size() == 8);

  const auto& l1a = find(statuses, 1, 0);
  const auto& l1b = find(statuses, 1, 1);
  const auto& l2a = find(statuses, 2, 0);
  const auto& l2b = find(statuses, 2, 1);
  const auto& l3a = find(statuses, 3, 0);
  const auto& l3b = find(statuses, 3, 1);
  CHECK(l3a.state == Decision::Commit);
  CHECK(l3a.path == DecisionPath::Direct);
  CHECK(l3a.block->reference() == d.ref(V2, 3));
  CHECK(l3b.state == Decision::Skip);
  CHECK(l3b.path == DecisionPath::Direct);
  CHECK(l2b.state == Decision::Commit);
  CHECK(l2b.path == DecisionPath::Direct);
  CHECK(l2a.state == Decision::Undecided);
  CHECK(l1b.state == Decision::Commit);
  CHECK(l1b.path == DecisionPath::Indirect);
  CHECK(l1b.block->reference() == d.ref(V3, 1));
  CHECK(l1a.state == Decision::Skip);
  CHECK(l1a.path == DecisionPath::Indirect);
  CHECK(find(statuses, 4, 0).state == Decision::Undecided);
  CHECK(find(statuses, 4, 1).state == Decision::Undecided);

  for (std::size_t i = 1; i < statuses.size(); ++i) CHECK(statuses[i - 1].slot.precedes(statuses[i].slot));

  Linearizer lin(committer);
  auto step = lin.extend_commit_sequence(d.store(), 0);
  REQUIRE(lin.commit_sequence().size() == 1);
  CHECK(lin.commit_sequence()[0]->reference() == d.ref(V3, 1));
  REQUIRE(step.decided.size() == 2);
  CHECK(step.decided[0].state == Decision::Skip);
  CHECK(lin.last_decided()->round == 1);
  CHECK(lin.last_decided()->rank == 1);
  // L1b's history: its own block plus all genesis blocks.
  CHECK(step.ordered.size() == 7);
  CHECK(step.ordered.back().block->reference() == d.ref(V3, 1));
}

TEST_CASE("21 fully connected rounds with 5 leaders commit 100 leaders") {
  DagBuilder d(6, 5);
  d.fully_connected(1, 21, d.everyone());
  UniversalCommitter committer(d.committee(), LeaderSchedule(d.committee(), true));
  Linearizer lin(committer);
  lin.extend_commit_sequence(d.store(), 0);
  const auto& seq = lin.commit_sequence();
  REQUIRE(seq.size() == 100);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    Round round = 1 + i / 5;
    auto rank = static_cast<std::uint32_t>(i % 5);
    CHECK(seq[i]->round() == round);
    CHECK(seq[i]->author() == d.committee().elect_leader(round, rank));
  }
  for (const auto& s : lin.decided_slots()) CHECK(s.path == DecisionPath::Direct);
  CHECK(lin.undecided_tail(21) == 5);
}

TEST_CASE("non-pipelined committer only decides even rounds") {
  DagBuilder d(6, 1);
  d.fully_connected(1, 9, d.everyone());
  UniversalCommitter committer(d.committee(), LeaderSchedule(d.committee(), false));
  auto statuses = committer.try_decide(0, 9, d.store());
  REQUIRE(statuses.size() == 4);
  for (std::size_t i = 0; i < statuses.size(); ++i) {
    CHECK(statuses[i].slot.round == 2 * (i + 1));
    CHECK(statuses[i].state == Decision::Commit);
  }
}

TEST_CASE("empty slot is skipped once 4f+1 decision authors exist") {
  DagBuilder d(6);
  std::vector<std::uint32_t> without_v1{0, 2, 3, 4, 5};  // round-1 leader is validator 1
  d.fully_connected(1, 1, without_v1);
  UniversalCommitter committer(d.committee(), LeaderSchedule(d.committee(), true));
  auto statuses = committer.try_decide(0, 1, d.store());
  CHECK(statuses.at(0).state == Decision::Undecided);

  d.add(0, 2, {0, 2, 3, 4, 5});
  d.add(2, 2, {2, 0, 3, 4, 5});
  d.add(3, 2, {3, 0, 2, 4, 5});
  d.add(4, 2, {4, 0, 2, 3, 5});
  statuses = committer.try_decide(0, 2, d.store());
  CHECK(statuses.at(0).state == Decision::Undecided);  // 4 blames only
  d.add(5, 2, {5, 0, 2, 3, 4});
  statuses = committer.try_decide(0, 2, d.store());
  CHECK(statuses.at(0).state == Decision::Skip);
  CHECK(statuses.at(0).path == DecisionPath::Direct);
}

TEST_CASE("equivocating leader: the supported variant commits, blame is per author") {
  DagBuilder d(6);
  d.fully_connected(1, 1, d.everyone());
  // Validator 2 leads round 2 with two variants.
  auto a = d.add(2, 2, {2, 0, 1, 3, 4}, 1);
  auto b = d.add(2, 2, {2, 0, 1, 3, 5}, 2);
  for (std::uint32_t v : {0u, 1u, 3u, 4u, 5u}) {
    std::vector<std::uint32_t> parents{v};
    for (std::uint32_t p = 0; p < 6; ++p) if (p != v && p != 2) parents.push_back(p);
    d.add(v, 2, parents);
  }
  // Four round-3 blocks support a, one supports b; none blames the author.
  std::vector<BlockRef> round2;
  for (std::uint32_t v = 0; v < 6; ++v) if (v != 2) round2.push_back(d.ref(v, 2));
  auto with = [&](std::uint32_t author, const BlockRef& leader) {
    std::vector<BlockRef> parents{d.ref(author, 2), leader};
    for (const auto& r : round2) if (r.author.index != author && parents.size() < 5) parents.push_back(r);
    return d.add_refs(author, 3, parents);
  };
  for (std::uint32_t v : {0u, 1u, 3u, 4u}) with(v, a);
  with(5, b);

  Committee c(6);
  LeaderSchedule schedule(c, true);
  Decider decider(d.committee(), schedule, 0, 0);
  auto wave = decider.wave_number(2);
  CHECK_FALSE(decider.skipped_leader(wave, d.store()));
  CHECK_FALSE(decider.supported_leader(wave, a, d.store()));  // 4 < 4f+1
  CHECK(decider.try_direct_decide(wave, d.store()).state == Decision::Undecided);

  // The equivocator itself adds a round-3 block supporting a: 5 supporters.
  d.add_refs(2, 3, {a, d.ref(0, 2), d.ref(1, 2), d.ref(3, 2), d.ref(4, 2)});
  auto status = decider.try_direct_decide(wave, d.store());
  CHECK(status.state == Decision::Commit);
  CHECK(status.block->reference() == a);
  CHECK_FALSE(decider.supported_leader(wave, b, d.store()));
}

TEST_CASE("thick link agrees with a brute-force oracle on random DAGs") {
  std::mt19937_64 rng(7);
  int positives = 0;
  for (int trial = 0; trial < 40; ++trial) {
    DagBuilder d(6);
    for (Round r = 1; r <= 5; ++r) {
      for (std::uint32_t a = 0; a < 6; ++a) {
        std::vector<std::uint32_t> others;
        for (std::uint32_t b = 0; b < 6; ++b) if (b != a) others.push_back(b);
        std::shuffle(others.begin(), others.end(), rng);
        std::vector<std::uint32_t> parents{a};
        parents.insert(parents.end(), others.begin(), others.begin() + 4 + rng() % 2);
        d.add(a, r, parents);
      }
    }
    for (Round lr = 1; lr <= 3; ++lr) {
      for (std::uint32_t la = 0; la < 6; ++la) {
        for (Round ar = lr + 1; ar <= 5; ++ar) {
          for (std::uint32_t aa = 0; aa < 6; ++aa) {
            auto leader = d.ref(la, lr);
            auto anchor = d.ref(aa, ar);
            bool expect = thick_link_oracle(d.store(), anchor, leader);
            positives += expect;
            CHECK(thick_link(anchor, leader, d.store(), d.committee()) == expect);
          }
        }
      }
    }
  }
  CHECK(positives > 0);
}
