#include <random>
#include <set>

#include "dag_builder.hpp"
#include "doctest.h"

using namespace odon;
using odon::testing::DagBuilder;

namespace {

BlockPtr make(std::uint32_t author, Round round, std::vector<BlockRef> parents, std::uint64_t tag = 0) {
  std::vector<Transaction> payload;
  if (tag) payload.push_back({tag, author, 0, {}});
  return std::make_shared<const Block>(
      Block::create(ValidatorId{author}, round, std::move(parents), std::move(payload), default_authenticator()));
}

std::vector<BlockRef> genesis_refs(DagBuilder& d, std::vector<std::uint32_t> authors) {
  std::vector<BlockRef> out;
  for (auto a : authors) out.push_back(d.ref(a, 0));
  return out;
}

}  // namespace

TEST_CASE("store starts with one genesis block per validator") {
  DagBuilder d(6);
  CHECK(d.store().size() == 6);
  CHECK(d.store().highest_round() == 0);
  CHECK(d.store().get_blocks_by_round(0).size() == 6);
}

TEST_CASE("validation accepts, suspends and rejects") {
  DagBuilder d(6);
  auto& store = d.store();

  SUBCASE("4f+1 parents with own parent first") {
    CHECK(std::holds_alternative<Accepted>(store.validate(*make(0, 1, genesis_refs(d, {0, 1, 2, 3, 4})))));
  }
  SUBCASE("too few parents") {
    auto v = store.validate(*make(0, 1, genesis_refs(d, {0, 1, 2, 3})));
    REQUIRE(std::holds_alternative<Rejected>(v));
    CHECK(std::get<Rejected>(v).reason == RejectReason::InsufficientParents);
  }
  SUBCASE("own parent missing or not first") {
    auto v = store.validate(*make(0, 1, genesis_refs(d, {1, 2, 3, 4, 5})));
    CHECK(std::get<Rejected>(v).reason == RejectReason::MissingSelfParent);
    v = store.validate(*make(0, 1, genesis_refs(d, {1, 0, 2, 3, 4})));
    CHECK(std::get<Rejected>(v).reason == RejectReason::MissingSelfParent);
  }
  SUBCASE("duplicate parent author") {
    auto refs = genesis_refs(d, {0, 1, 2, 3, 4});
    refs.push_back(refs[1]);
    CHECK(std::get<Rejected>(store.validate(*make(0, 1, refs))).reason == RejectReason::DuplicateParentAuthor);
  }
  SUBCASE("parent from the wrong round") {
    auto r1 = d.add(1, 1, {1, 0, 2, 3, 4});
    auto refs = genesis_refs(d, {0, 2, 3, 4});
    refs.push_back(r1);
    CHECK(std::get<Rejected>(store.validate(*make(0, 1, refs))).reason == RejectReason::BadParentRound);
  }
  SUBCASE("bad signature") {
    auto good = make(0, 1, genesis_refs(d, {0, 1, 2, 3, 4}));
    Block forged(good->author(), good->round(), good->parents(), good->payload(), Signature{});
    CHECK(std::get<Rejected>(store.validate(forged)).reason == RejectReason::BadSignature);
  }
  SUBCASE("unknown author") {
    auto b = make(9, 1, genesis_refs(d, {0, 1, 2, 3, 4}));
    CHECK(std::get<Rejected>(store.validate(*b)).reason == RejectReason::UnknownAuthor);
  }
  SUBCASE("forged genesis") {
    CHECK(std::get<Rejected>(store.validate(*make(0, 0, {}, 5))).reason == RejectReason::InvalidGenesis);
  }
  SUBCASE("unknown parent suspends") {
    auto r1 = make(1, 1, genesis_refs(d, {1, 0, 2, 3, 4}));
    auto refs = genesis_refs(d, {2, 0, 3, 4, 5});
    auto child = make(2, 2, {make(2, 1, refs)->reference(), r1->reference(), make(0, 1, genesis_refs(d, {0, 1, 2, 3, 4}))->reference(),
                             make(3, 1, genesis_refs(d, {3, 0, 1, 2, 4}))->reference(),
                             make(4, 1, genesis_refs(d, {4, 0, 1, 2, 3}))->reference()});
    auto v = store.validate(*child);
    REQUIRE(std::holds_alternative<Suspended>(v));
    CHECK(std::get<Suspended>(v).missing.size() == 5);
  }
}

TEST_CASE("a block resolving suspended descendants inserts them in causal order") {
  DagBuilder d(6);
  auto& store = d.store();
  std::vector<BlockPtr> r1;
  for (std::uint32_t a = 0; a < 6; ++a) {
    std::vector<std::uint32_t> order{a};
    for (std::uint32_t b = 0; b < 6; ++b) if (b != a) order.push_back(b);
    std::vector<BlockRef> refs;
    for (auto p : order) refs.push_back(d.ref(p, 0));
    r1.push_back(make(a, 1, refs));
  }
  std::vector<BlockRef> r1_refs;
  for (auto& b : r1) r1_refs.push_back(b->reference());
  auto r2 = make(0, 2, r1_refs);
  std::vector<BlockRef> r3_parents{r2->reference()};
  auto r2b = make(1, 2, {r1_refs[1], r1_refs[0], r1_refs[2], r1_refs[3], r1_refs[4]});
  r3_parents.push_back(r2b->reference());
  for (auto& b : r1) store.accept(b);
  for (std::uint32_t a = 2; a < 5; ++a) {
    std::vector<BlockRef> refs{r1_refs[a]};
    for (std::uint32_t b = 0; refs.size() < 5; ++b) if (b != a) refs.push_back(r1_refs[b]);
    auto extra = make(a, 2, refs);
    r3_parents.push_back(extra->reference());
    store.accept(extra);
  }

  // r1 is all present; r2b is held back, r2 arrives, then a round-3 block
  // depending on both; delivering r2b unblocks the round-3 block too.
  CHECK(store.accept(r2).inserted.size() == 1);
  auto r3 = make(0, 3, r3_parents);
  auto out = store.accept(r3);
  CHECK(out.inserted.empty());
  CHECK(out.missing == std::vector<BlockRef>{r2b->reference()});
  CHECK(store.is_suspended(r3->reference()));

  auto dup = store.accept(r3);
  CHECK(dup.duplicate);

  out = store.accept(r2b);
  REQUIRE(out.inserted.size() == 2);
  CHECK(out.inserted[0]->reference() == r2b->reference());
  CHECK(out.inserted[1]->reference() == r3->reference());
  CHECK(store.suspended_count() == 0);
  CHECK(store.accept(r2b).duplicate);
}

TEST_CASE("chain of suspensions resolves recursively") {
  DagBuilder d(6);
  auto& store = d.store();
  // Build round 1..3 blocks outside the store, then deliver newest first.
  std::vector<std::vector<BlockPtr>> rounds(4);
  for (std::uint32_t a = 0; a < 6; ++a) rounds[0].push_back(store.get(d.ref(a, 0)));
  for (Round r = 1; r <= 3; ++r) {
    for (std::uint32_t a = 0; a < 6; ++a) {
      std::vector<BlockRef> refs{rounds[r - 1][a]->reference()};
      for (std::uint32_t b = 0; b < 6; ++b) if (b != a) refs.push_back(rounds[r - 1][b]->reference());
      rounds[r].push_back(make(a, r, refs));
    }
  }
  for (Round r = 3; r >= 2; --r) {
    for (auto& b : rounds[r]) CHECK(store.accept(b).inserted.empty());
  }
  std::size_t inserted = 0;
  for (auto& b : rounds[1]) inserted += store.accept(b).inserted.size();
  CHECK(inserted == 18);
  CHECK(store.highest_round() == 3);
  CHECK(store.suspended_count() == 0);
}

TEST_CASE("suspended buffer is bounded") {
  Committee c(6);
  DagStore store(c, default_authenticator(), DagLimits{1});
  std::vector<BlockRef> unknown;
  for (std::uint32_t a = 0; a < 5; ++a) unknown.push_back(make(a, 1, {}, a + 1)->reference());
  auto b1 = make(0, 2, unknown, 1);
  auto b2 = make(0, 2, unknown, 2);
  CHECK_FALSE(store.accept(b1).rejected);
  auto out = store.accept(b2);
  REQUIRE(out.rejected);
  CHECK(*out.rejected == RejectReason::SuspendedBufferFull);
}

TEST_CASE("equivocating blocks coexist at one authority round") {
  DagBuilder d(6);
  auto a = d.add(2, 1, {2, 0, 1, 3, 4}, 1);
  auto b = d.add(2, 1, {2, 0, 1, 3, 5}, 2);
  auto blocks = d.store().get_blocks_at_authority_round(ValidatorId{2}, 1);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0]->digest() < blocks[1]->digest());
  CHECK(d.store().first_block_at_authority_round(ValidatorId{2}, 1)->reference() == a);
  CHECK(d.store().contains(b));
  CHECK(d.store().block_exists_at_authority_round(ValidatorId{2}, 1));
  CHECK_FALSE(d.store().block_exists_at_authority_round(ValidatorId{3}, 1));
}

TEST_CASE("link and ancestors match an independent closure on random DAGs") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    DagBuilder d(6);
    std::vector<BlockRef> all;
    for (std::uint32_t a = 0; a < 6; ++a) all.push_back(d.ref(a, 0));
    for (Round r = 1; r <= 6; ++r) {
      for (std::uint32_t a = 0; a < 6; ++a) {
        std::vector<std::uint32_t> parents{a};
        std::vector<std::uint32_t> others;
        for (std::uint32_t b = 0; b < 6; ++b) if (b != a) others.push_back(b);
        std::shuffle(others.begin(), others.end(), rng);
        std::size_t extra = 4 + rng() % 2;
        parents.insert(parents.end(), others.begin(), others.begin() + extra);
        all.push_back(d.add(a, r, parents));
      }
    }
    auto& store = d.store();
    // Oracle: transitive closure by fixpoint over explicit parent lists.
    std::map<BlockRef, std::set<BlockRef>> closure;
    for (const auto& ref : all) {  // rounds ascending
      std::set<BlockRef> reach{ref};
      for (const auto& p : store.get(ref)->parents()) reach.insert(closure[p].begin(), closure[p].end());
      closure[ref] = reach;
    }
    for (const auto& newer : all) {
      for (const auto& older : all) {
        CHECK(store.link(older, newer) == closure[newer].contains(older));
      }
      for (Round r = 0; r <= newer.round; ++r) {
        std::set<BlockRef> expect;
        for (const auto& x : closure[newer]) if (x.round == r) expect.insert(x);
        auto got = store.ancestors_at_round(newer, r);
        CHECK(std::set<BlockRef>(got.begin(), got.end()) == expect);
      }
    }
  }
}
