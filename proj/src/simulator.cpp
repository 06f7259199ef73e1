#include "odontoceti/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <variant>

namespace odon {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stable_name_hash(std::string_view name) {
  // FNV-1a: std::hash is not guaranteed stable across library versions.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t root_seed, std::string_view name) {
  std::uint64_t tag = stable_name_hash(name);
  std::seed_seq seq{static_cast<std::uint32_t>(root_seed), static_cast<std::uint32_t>(root_seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  gen_.seed(seq);
}

std::uint64_t RngStream::below(std::uint64_t bound) {
  // Rejection sampling keeps the result unbiased and identical on every
  // standard library (std distributions are implementation-defined).
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                        std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return x % bound;
}

Micros RngStream::between(Micros lo, Micros hi) {
  if (hi <= lo) return lo;
  return lo + static_cast<Micros>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

NetworkModel::NetworkModel(const Scenario& scenario, std::uint64_t seed)
    : delay_(scenario.delay),
      adversary_(scenario.adversary),
      delta_(scenario.delta),
      gst_(scenario.gst),
      adversary_key_(RngStream(seed, "adversary").next()),
      rng_(seed, "delays") {}

Micros NetworkModel::base_delay(ValidatorId from, ValidatorId to) {
  switch (delay_.kind) {
    case DelayModel::Kind::Fixed:
      return delay_.fixed;
    case DelayModel::Kind::Uniform:
      return rng_.between(delay_.lo, delay_.hi);
    case DelayModel::Kind::Matrix:
      return delay_.matrix[from.index][to.index] + (delay_.jitter > 0 ? rng_.between(0, delay_.jitter) : 0);
  }
  return delay_.fixed;
}

bool NetworkModel::targeted(ValidatorId from, ValidatorId to, Micros send_time) const {
  auto epoch = static_cast<std::uint64_t>(send_time / adversary_.epoch);
  std::uint64_t h = mix64(adversary_key_ ^ mix64((epoch << 16) ^ (std::uint64_t{to.index} << 8) ^ from.index));
  return h % 100 < adversary_.targeted_percent;
}

Micros NetworkModel::schedule_delivery(ValidatorId from, ValidatorId to, Micros send_time) {
  Micros delay = base_delay(from, to);
  if (send_time < gst_) {
    if (adversary_.cap > 0 && targeted(from, to, send_time)) {
      delay = rng_.between(delay, std::max(delay, adversary_.cap));
    }
    return std::min(send_time + delay, gst_ + delta_);
  }
  return send_time + std::min(delay, delta_);
}

LoadGenerator::LoadGenerator(const Scenario& scenario, std::uint64_t seed)
    : n_(scenario.n),
      tx_size_(scenario.load.tx_size),
      interval_us_(scenario.load.rate_tps > 0 ? 1e6 / scenario.load.rate_tps : 0.0),
      total_(scenario.load.rate_tps > 0
                 ? static_cast<std::uint64_t>(std::floor(scenario.load.rate_tps *
                                                         static_cast<double>(scenario.duration) / 1e6))
                 : 0),
      rng_(seed, "load") {}

std::optional<LoadItem> LoadGenerator::next() {
  if (produced_ >= total_) return std::nullopt;
  std::uint64_t k = produced_++;
  auto slot_start = static_cast<Micros>(std::floor(static_cast<double>(k) * interval_us_));
  auto jitter_span = static_cast<Micros>(interval_us_ / 2);
  Micros created = slot_start + (jitter_span > 0 ? rng_.between(0, jitter_span - 1) : 0);

  Transaction tx;
  tx.id = k + 1;
  tx.client = static_cast<std::uint32_t>(k % n_);
  tx.created = created;
  tx.bytes.resize(tx_size_);
  for (std::size_t i = 0; i < tx_size_; ++i) {
    tx.bytes[i] = static_cast<std::uint8_t>((tx.id * 131 + i) & 0xff);
  }
  return LoadItem{std::move(tx), ValidatorId{static_cast<std::uint32_t>(k % n_)}};
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Honest: return "honest";
    case Role::Crashed: return "crashed";
    case Role::Byzantine: return "byzantine";
  }
  return "unknown";
}

namespace {

struct Delivery {
  ValidatorId from;
  ValidatorId to;
  Micros sent;
  Message message;
};
struct TimerFire {
  ValidatorId who;
  Round round;
};
struct ClientSubmit {
  LoadItem item;
};
struct StopProposing {};

struct Event {
  Micros time;
  std::uint64_t seq;
  std::variant<Delivery, TimerFire, ClientSubmit, StopProposing> body;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    return a.time != b.time ? a.time > b.time : a.seq > b.seq;
  }
};

Committee make_committee(const Scenario& s) {
  s.validate();
  return Committee(s.n, s.leaders_per_round, s.unsafe_parent_threshold);
}

}  // namespace

Simulation::Simulation(Scenario scenario)
    : scenario_(std::move(scenario)),
      committee_(make_committee(scenario_)),
      schedule_(committee_, scenario_.pipelined) {
  ValidatorConfig config;
  config.delta = scenario_.delta;
  config.early_block_optimization = scenario_.early_block_optimization;
  config.block_limits = scenario_.block_limits;
  config.mempool_capacity = scenario_.mempool_capacity;
  config.dag_limits.suspended_capacity = scenario_.suspended_capacity;
  for (auto id : committee_.validators()) {
    validators_.push_back(std::make_unique<Validator>(id, committee_, schedule_, default_authenticator(),
                                                      config, scenario_.behavior_of(id)));
  }
}

RunReport Simulation::run() {
  if (ran_) throw std::logic_error("simulation already ran");
  ran_ = true;

  NetworkModel network(scenario_, scenario_.seed);
  LoadGenerator load(scenario_, scenario_.seed);
  SimCounters counters;

  std::priority_queue<Event, std::vector<Event>, EventLater> queue;
  std::uint64_t seq = 0;
  auto push = [&](Micros time, auto body) { queue.push(Event{time, seq++, std::move(body)}); };

  auto apply = [&](ValidatorId who, Effects fx, Micros now) {
    for (auto& out : fx.sends) {
      ++counters.messages_sent;
      Micros arrival = network.schedule_delivery(who, out.to, now);
      if (now >= scenario_.gst && arrival - now > scenario_.delta) ++counters.post_gst_violations;
      push(arrival, Delivery{who, out.to, now, std::move(out.message)});
    }
    for (const auto& timer : fx.timers) push(timer.at, TimerFire{who, timer.round});
  };

  if (auto first = load.next()) push(first->tx.created, ClientSubmit{std::move(*first)});
  push(scenario_.duration, StopProposing{});
  for (auto& v : validators_) apply(v->id(), v->start(0), 0);

  while (!queue.empty()) {
    if (++counters.events > scenario_.event_budget) {
      throw LivenessError("event budget of " + std::to_string(scenario_.event_budget) +
                          " exhausted at t=" + std::to_string(to_millis(queue.top().time)) + " ms");
    }
    Event ev = queue.top();
    queue.pop();
    Micros now = ev.time;
    counters.end_time = now;

    if (auto* d = std::get_if<Delivery>(&ev.body)) {
      auto& target = *validators_[d->to.index];
      if (target.crashed()) {
        ++counters.messages_dropped;
        continue;
      }
      ++counters.messages_delivered;
      if (observer_) observer_(DeliveryTrace{d->from, d->to, d->sent, now, &d->message});
      apply(d->to, target.on_message(d->from, d->message, now), now);
    } else if (auto* t = std::get_if<TimerFire>(&ev.body)) {
      apply(t->who, validators_[t->who.index]->on_timer(t->round, now), now);
    } else if (auto* c = std::get_if<ClientSubmit>(&ev.body)) {
      ++counters.transactions_submitted;
      auto target = c->item.target;
      apply(target, validators_[target.index]->on_transaction(std::move(c->item.tx), now), now);
      if (auto next = load.next()) push(next->tx.created, ClientSubmit{std::move(*next)});
    } else {
      for (auto& v : validators_) v->stop_proposing();
    }
  }

  RunReport report;
  report.scenario = scenario_;
  report.counters = counters;
  for (const auto& v : validators_) {
    ValidatorReport r;
    r.id = v->id();
    r.role = v->behavior().byzantine() ? Role::Byzantine : v->crashed() ? Role::Crashed : Role::Honest;
    r.round = v->round_state().round;
    r.highest_round = v->store().highest_round();
    r.last_decided = v->linearizer().last_decided();
    r.undecided_tail = v->linearizer().undecided_tail(r.highest_round);
    r.decisions = v->decided_records();
    r.order = v->linearizer().order();
    r.rounds = v->round_records();
    r.created = v->created_blocks();
    r.latency = v->latency_samples();
    r.counters = v->counters();
    r.mempool_left = v->mempool().size();
    report.validators.push_back(std::move(r));
  }
  return report;
}

RunReport run_scenario(const Scenario& scenario) {
  Simulation sim(scenario);
  return sim.run();
}

}  // namespace odon
