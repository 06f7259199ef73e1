#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "odontoceti/validator.hpp"

namespace odon {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DelayModel {
  enum class Kind { Fixed, Uniform, Matrix };
  Kind kind = Kind::Fixed;
  Micros fixed = millis(50);
  Micros lo = millis(10);
  Micros hi = millis(100);
  std::vector<std::vector<Micros>> matrix;  // [from][to]
  Micros jitter = 0;                        // Matrix only: extra uniform [0, jitter]
};

/// Bounded pre-GST adversary. Before GST each recipient has a seeded,
/// per-epoch set of targeted senders whose messages are held back up to
/// `cap`. Arrival never exceeds max(send, GST) + delta.
struct Adversary {
  Micros cap = 0;  // 0 disables
  Micros epoch = millis(200);
  std::uint32_t targeted_percent = 40;
};

struct FaultSpec {
  ValidatorId validator;
  FaultBehavior behavior;
};

struct LoadSpec {
  double rate_tps = 0.0;
  std::size_t tx_size = 512;
};

struct Scenario {
  std::uint32_t n = 6;
  std::uint32_t leaders_per_round = 1;
  bool pipelined = true;
  Micros delta = millis(100);
  Micros gst = 0;
  DelayModel delay;
  Adversary adversary;
  std::vector<FaultSpec> faults;
  LoadSpec load;
  Micros duration = millis(2000);
  std::uint64_t seed = 0;
  bool unsafe_parent_threshold = false;
  bool early_block_optimization = true;
  BlockLimits block_limits;
  std::size_t mempool_capacity = 1'000'000;
  std::size_t suspended_capacity = 10'000;
  std::uint64_t event_budget = 50'000'000;

  /// Throws ScenarioError on any inconsistency (n not 5f+1, more than f
  /// faults, malformed delay model, ...).
  void validate() const;

  FaultBehavior behavior_of(ValidatorId id) const;
  std::uint32_t faulty_count() const { return static_cast<std::uint32_t>(faults.size()); }
};

/// Scenario files are JSON documents with nested sections; see README.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);
std::string scenario_to_json(const Scenario& scenario);

}  // namespace odon
