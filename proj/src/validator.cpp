#include "odontoceti/validator.hpp"

#include <algorithm>
#include <limits>

namespace odon {

namespace {

constexpr std::uint64_t kMarkerTxBit = std::uint64_t{1} << 63;
constexpr std::uint32_t kMarkerClient = std::numeric_limits<std::uint32_t>::max();

std::uint32_t distinct_authors(const DagStore& store, Round round) {
  std::uint32_t count = 0;
  std::uint32_t last = std::numeric_limits<std::uint32_t>::max();
  for (const auto& b : store.get_blocks_by_round(round)) {  // ordered by author
    if (b->author().index != last) {
      ++count;
      last = b->author().index;
    }
  }
  return count;
}

}  // namespace

bool Mempool::push(Transaction tx) {
  if (queue_.size() >= capacity_ || !seen_.insert(tx.id).second) {
    ++dropped_;
    return false;
  }
  queue_.push_back(std::move(tx));
  return true;
}

std::vector<Transaction> Mempool::drain(std::size_t max_bytes) {
  std::vector<Transaction> out;
  std::size_t used = 0;
  while (!queue_.empty() && used + queue_.front().bytes.size() <= max_bytes) {
    used += queue_.front().bytes.size();
    out.push_back(std::move(queue_.front()));
    queue_.pop_front();
  }
  return out;
}

std::string_view to_string(AdvanceReason reason) {
  switch (reason) {
    case AdvanceReason::AllLeaders: return "all-leaders";
    case AdvanceReason::Timeout: return "timeout";
    case AdvanceReason::LeaderBlames: return "leader-blames";
  }
  return "unknown";
}

bool force_due_to_leader_blames(Round round, const DagStore& store, const LeaderSchedule& schedule,
                                const Committee& committee) {
  Round quorum_round = round + 1;
  auto quorum_blocks = store.get_blocks_by_round(quorum_round);
  for (const auto& slot : schedule.slots(round)) {
    if (store.block_exists_at_authority_round(slot.authority, round)) continue;
    QuorumCounter blame(committee, committee.indirect_quorum_threshold());
    bool reached = false;
    for (const auto& block : quorum_blocks) {
      const auto& parents = block->parents();
      bool blames = std::none_of(parents.begin(), parents.end(),
                                 [&](const BlockRef& p) { return p.author == slot.authority; });
      if (blames && blame.add(block->author())) {
        reached = true;
        break;
      }
    }
    if (!reached) return false;
  }
  return true;
}

std::optional<AdvanceReason> ready_to_propose(const RoundState& rs, const DagStore& store,
                                              const LeaderSchedule& schedule,
                                              const Committee& committee, Micros now,
                                              bool early_block_optimization) {
  if (distinct_authors(store, rs.round) < committee.parent_threshold()) return std::nullopt;
  auto slots = schedule.slots(rs.round);
  bool all_leaders = std::all_of(slots.begin(), slots.end(), [&](const LeaderSlot& s) {
    return store.block_exists_at_authority_round(s.authority, rs.round);
  });
  if (all_leaders) return AdvanceReason::AllLeaders;
  if (now >= rs.deadline) return AdvanceReason::Timeout;
  if (early_block_optimization && force_due_to_leader_blames(rs.round, store, schedule, committee)) {
    return AdvanceReason::LeaderBlames;
  }
  return std::nullopt;
}

Block create_block(ValidatorId self, const RoundState& rs, Mempool& mempool, const DagStore& store,
                   const LeaderSchedule& schedule, const Authenticator& auth, BlockLimits limits,
                   std::vector<Transaction> extra_payload) {
  const Committee& committee = store.committee();
  std::vector<BlockRef> parents;
  std::vector<bool> taken(committee.size(), false);
  auto take = [&](ValidatorId author) {
    if (taken[author.index]) return;
    if (limits.max_parents != 0 && parents.size() >= limits.max_parents) return;
    if (auto b = store.first_block_at_authority_round(author, rs.round)) {
      parents.push_back(b->reference());
      taken[author.index] = true;
    }
  };
  take(self);
  for (const auto& slot : schedule.slots(rs.round)) take(slot.authority);
  for (auto id : committee.validators()) take(id);

  auto payload = mempool.drain(limits.max_block_bytes);
  payload.insert(payload.end(), std::make_move_iterator(extra_payload.begin()),
                 std::make_move_iterator(extra_payload.end()));
  return Block::create(self, rs.round + 1, std::move(parents), std::move(payload), auth);
}

Validator::Validator(ValidatorId id, const Committee& committee, const LeaderSchedule& schedule,
                     const Authenticator& auth, ValidatorConfig config, FaultBehavior behavior)
    : id_(id),
      committee_(&committee),
      schedule_(&schedule),
      auth_(&auth),
      config_(config),
      behavior_(behavior),
      store_(committee, auth, config.dag_limits),
      committer_(committee, schedule),
      linearizer_(committer_),
      mempool_(config.mempool_capacity) {}

Effects Validator::start(Micros now) {
  Effects fx;
  round_ = RoundState{0, now, now + 2 * config_.delta};
  if (behavior_.kind == FaultBehavior::Kind::Crash && behavior_.crash_round == 0) {
    crash(fx);
    return fx;
  }
  try_advance(now, fx);
  return fx;
}

Effects Validator::on_message(ValidatorId from, const Message& message, Micros now) {
  Effects fx;
  if (crashed_) return fx;
  bool dag_grew = false;
  if (const auto* bm = std::get_if<BlockMessage>(&message)) {
    receive_block(from, bm->wire, now, fx, dag_grew);
  } else if (const auto* req = std::get_if<FetchRequest>(&message)) {
    FetchResponse response;
    for (const auto& ref : req->refs) {
      if (auto b = store_.get(ref)) {
        response.blocks.push_back(std::make_shared<const std::vector<std::uint8_t>>(encode_block(*b)));
      }
    }
    if (!response.blocks.empty()) fx.sends.push_back({from, std::move(response)});
  } else if (const auto* resp = std::get_if<FetchResponse>(&message)) {
    for (const auto& wire : resp->blocks) receive_block(from, wire, now, fx, dag_grew);
  }
  if (dag_grew) after_dag_change(now, fx);
  return fx;
}

Effects Validator::on_timer(Round round, Micros now) {
  Effects fx;
  if (crashed_ || round != round_.round) return fx;
  try_advance(now, fx);
  return fx;
}

Effects Validator::on_transaction(Transaction tx, Micros now) {
  Effects fx;
  if (crashed_) return fx;
  auto id = tx.id;
  auto created = tx.created;
  if (mempool_.push(std::move(tx))) pending_tx_.emplace(id, created);
  (void)now;
  return fx;
}

void Validator::receive_block(ValidatorId from, const WireBytes& wire, Micros now, Effects& fx,
                              bool& dag_grew) {
  (void)now;
  ++counters_.blocks_received;
  BlockPtr block;
  try {
    block = std::make_shared<const Block>(decode_block(*wire));
  } catch (const DecodeError&) {
    ++counters_.invalid;
    return;
  }
  auto outcome = store_.accept(block);
  if (outcome.duplicate) {
    ++counters_.duplicates;
    return;
  }
  if (outcome.rejected) {
    ++counters_.invalid;
    return;
  }
  if (!outcome.inserted.empty()) dag_grew = true;

  FetchRequest request;
  for (const auto& ref : outcome.missing) {
    if (fetch_asked_[ref].insert(from.index).second) request.refs.push_back(ref);
  }
  if (!request.refs.empty()) {
    ++counters_.fetch_requests;
    fx.sends.push_back({from, std::move(request)});
  }
}

void Validator::after_dag_change(Micros now, Effects& fx) {
  run_commit_rule(now);
  try_advance(now, fx);
}

void Validator::run_commit_rule(Micros now) {
  auto step = linearizer_.extend_commit_sequence(store_, now);
  for (auto& status : step.decided) decided_.push_back({std::move(status), now});
  for (const auto& entry : step.ordered) {
    if (entry.block->author() != id_) continue;
    for (const auto& tx : entry.block->payload()) {
      auto it = pending_tx_.find(tx.id);
      if (it == pending_tx_.end()) continue;
      latency_.push_back({tx.id, id_, it->second, now});
      pending_tx_.erase(it);
    }
  }
}

void Validator::try_advance(Micros now, Effects& fx) {
  while (proposing_ && !crashed_) {
    auto reason = ready_to_propose(round_, store_, *schedule_, *committee_, now,
                                   config_.early_block_optimization);
    if (!reason) return;
    propose(*reason, now, fx);
  }
}

void Validator::propose(AdvanceReason reason, Micros now, Effects& fx) {
  Round next = round_.round + 1;
  if (behavior_.kind == FaultBehavior::Kind::Crash && next >= behavior_.crash_round) {
    crash(fx);
    return;
  }

  std::vector<BlockPtr> variants;
  if (behavior_.kind == FaultBehavior::Kind::Equivocate) {
    auto base = mempool_.drain(config_.block_limits.max_block_bytes);
    for (std::uint32_t v = 0; v < std::max<std::uint32_t>(behavior_.copies, 1); ++v) {
      Mempool scratch;
      for (const auto& tx : base) scratch.push(tx);
      Transaction marker{kMarkerTxBit | (next << 8) | v, kMarkerClient, now, {static_cast<std::uint8_t>(v)}};
      variants.push_back(std::make_shared<const Block>(create_block(
          id_, round_, scratch, store_, *schedule_, *auth_, config_.block_limits, {marker})));
    }
  } else {
    variants.push_back(std::make_shared<const Block>(
        create_block(id_, round_, mempool_, store_, *schedule_, *auth_, config_.block_limits)));
  }

  for (const auto& block : variants) {
    store_.accept(block);
    created_.push_back({block->reference(), now});
  }
  rounds_.push_back({round_.round, round_.entered, now, reason});
  round_ = RoundState{next, now, now + 2 * config_.delta};
  fx.timers.push_back({round_.deadline, next});

  std::vector<WireBytes> wires;
  for (const auto& block : variants) {
    wires.push_back(std::make_shared<const std::vector<std::uint8_t>>(encode_block(*block)));
  }
  for (auto peer : committee_->validators()) {
    if (peer == id_) continue;
    fx.sends.push_back({peer, BlockMessage{wires[peer.index % wires.size()]}});
  }
  run_commit_rule(now);
}

void Validator::crash(Effects& fx) {
  crashed_ = true;
  fx.crashed = true;
}

}  // namespace odon
