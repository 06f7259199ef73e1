#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "odontoceti/scenario.hpp"

namespace odon {

/// Event budget exceeded: the run did not quiesce.
class LivenessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Independent pseudo-random stream derived from the root seed and a
/// stream name, so adding draws to one stream never shifts another.
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::string_view name);

  std::uint64_t next() { return gen_(); }
  /// Uniform in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform in [lo, hi].
  Micros between(Micros lo, Micros hi);

 private:
  std::mt19937_64 gen_;
};

/// Delay model plus GST switch and the bounded pre-GST adversary.
class NetworkModel {
 public:
  NetworkModel(const Scenario& scenario, std::uint64_t seed);

  Micros schedule_delivery(ValidatorId from, ValidatorId to, Micros send_time);

 private:
  Micros base_delay(ValidatorId from, ValidatorId to);
  bool targeted(ValidatorId from, ValidatorId to, Micros send_time) const;

  DelayModel delay_;
  Adversary adversary_;
  Micros delta_;
  Micros gst_;
  std::uint64_t adversary_key_;
  RngStream rng_;
};

struct LoadItem {
  Transaction tx;
  ValidatorId target;
};

/// Evenly spaced arrivals with seeded jitter, round-robin over validators.
/// Produces floor(rate * duration) transactions.
class LoadGenerator {
 public:
  LoadGenerator(const Scenario& scenario, std::uint64_t seed);

  std::optional<LoadItem> next();
  std::uint64_t total() const { return total_; }

 private:
  std::uint32_t n_;
  std::size_t tx_size_;
  double interval_us_;
  std::uint64_t total_;
  std::uint64_t produced_ = 0;
  RngStream rng_;
};

struct SimCounters {
  std::uint64_t events = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_delivered = 0;
  std::uint64_t messages_dropped = 0;
  std::uint64_t post_gst_violations = 0;
  std::uint64_t transactions_submitted = 0;
  Micros end_time = 0;
};

enum class Role { Honest, Crashed, Byzantine };
std::string_view to_string(Role role);

struct ValidatorReport {
  ValidatorId id;
  Role role = Role::Honest;
  Round round = 0;          // own latest block
  Round highest_round = 0;  // highest round in its DAG
  std::optional<LeaderSlot> last_decided;
  std::uint64_t undecided_tail = 0;
  std::vector<DecidedRecord> decisions;
  std::vector<OrderedBlock> order;
  std::vector<RoundRecord> rounds;
  std::vector<CreatedBlock> created;
  std::vector<LatencySample> latency;
  ValidatorCounters counters;
  std::size_t mempool_left = 0;
};

struct RunReport {
  Scenario scenario;
  std::vector<ValidatorReport> validators;
  SimCounters counters;
};

/// Observes every delivered message; used by tests that need arrival times.
struct DeliveryTrace {
  ValidatorId from;
  ValidatorId to;
  Micros sent = 0;
  Micros arrived = 0;
  const Message* message = nullptr;
};

class Simulation {
 public:
  /// Validates the scenario (throws ScenarioError).
  explicit Simulation(Scenario scenario);

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  void set_delivery_observer(std::function<void(const DeliveryTrace&)> observer) {
    observer_ = std::move(observer);
  }

  /// Runs until the load duration elapses and in-flight messages drain.
  /// Throws LivenessError when the event budget is exhausted.
  RunReport run();

  const Committee& committee() const { return committee_; }
  const LeaderSchedule& schedule() const { return schedule_; }
  const Validator& validator(ValidatorId id) const { return *validators_.at(id.index); }

 private:
  Scenario scenario_;
  Committee committee_;
  LeaderSchedule schedule_;
  std::vector<std::unique_ptr<Validator>> validators_;
  std::function<void(const DeliveryTrace&)> observer_;
  bool ran_ = false;
};

/// Convenience: construct, run and return the report.
RunReport run_scenario(const Scenario& scenario);

}  // namespace odon
