#include "odontoceti/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace odon {

using json = nlohmann::ordered_json;

namespace {

Micros ms_field(const json& j, const char* key, Micros fallback) {
  if (!j.contains(key)) return fallback;
  return static_cast<Micros>(j.at(key).get<double>() * 1000.0);
}

double to_ms_value(Micros us) { return to_millis(us); }

FaultBehavior parse_behavior(const json& j) {
  FaultBehavior b;
  auto kind = j.at("kind").get<std::string>();
  if (kind == "crash") {
    b.kind = FaultBehavior::Kind::Crash;
    b.crash_round = j.value("at_round", Round{0});
  } else if (kind == "equivocate") {
    b.kind = FaultBehavior::Kind::Equivocate;
    b.copies = j.value("copies", 2u);
  } else {
    throw ScenarioError("unknown fault kind '" + kind + "'");
  }
  return b;
}

}  // namespace

void Scenario::validate() const {
  std::uint32_t f = 0;
  try {
    Committee committee(n, leaders_per_round, unsafe_parent_threshold);
    f = committee.max_faulty();
  } catch (const std::exception& e) {
    throw ScenarioError(e.what());
  }
  if (faults.size() > f) {
    throw ScenarioError(std::to_string(faults.size()) + " faulty validators exceed f = " +
                        std::to_string(f));
  }
  std::set<std::uint32_t> seen;
  for (const auto& fault : faults) {
    if (fault.validator.index >= n) throw ScenarioError("fault names unknown validator");
    if (!seen.insert(fault.validator.index).second) throw ScenarioError("validator listed twice in faults");
    if (fault.behavior.kind == FaultBehavior::Kind::Equivocate && fault.behavior.copies < 2) {
      throw ScenarioError("equivocation needs at least 2 copies");
    }
  }
  if (delta <= 0) throw ScenarioError("delta must be positive");
  if (gst < 0 || duration <= 0) throw ScenarioError("gst and duration must be non-negative/positive");
  switch (delay.kind) {
    case DelayModel::Kind::Fixed:
      if (delay.fixed < 0) throw ScenarioError("fixed delay must be non-negative");
      break;
    case DelayModel::Kind::Uniform:
      if (delay.lo < 0 || delay.hi < delay.lo) throw ScenarioError("uniform delay needs 0 <= lo <= hi");
      break;
    case DelayModel::Kind::Matrix:
      if (delay.matrix.size() != n) throw ScenarioError("delay matrix must be n x n");
      for (const auto& row : delay.matrix) {
        if (row.size() != n) throw ScenarioError("delay matrix must be n x n");
        for (auto d : row) {
          if (d < 0) throw ScenarioError("delay matrix entries must be non-negative");
        }
      }
      if (delay.jitter < 0) throw ScenarioError("jitter must be non-negative");
      break;
  }
  if (adversary.cap < 0 || adversary.epoch <= 0 || adversary.targeted_percent > 100) {
    throw ScenarioError("invalid adversary settings");
  }
  if (load.rate_tps < 0.0) throw ScenarioError("load rate must be non-negative");
  if (load.tx_size == 0) throw ScenarioError("tx size must be positive");
}

FaultBehavior Scenario::behavior_of(ValidatorId id) const {
  for (const auto& fault : faults) {
    if (fault.validator == id) return fault.behavior;
  }
  return {};
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  Scenario s;
  try {
    if (j.contains("committee")) {
      const auto& c = j.at("committee");
      s.n = c.value("n", s.n);
      s.leaders_per_round = c.value("leaders_per_round", s.leaders_per_round);
      s.pipelined = c.value("pipelined", s.pipelined);
    }
    if (j.contains("timing")) {
      const auto& t = j.at("timing");
      s.delta = ms_field(t, "delta_ms", s.delta);
      s.gst = ms_field(t, "gst_ms", s.gst);
      s.duration = ms_field(t, "duration_ms", s.duration);
    }
    if (j.contains("delay")) {
      const auto& d = j.at("delay");
      auto model = d.value("model", std::string("fixed"));
      if (model == "fixed") {
        s.delay.kind = DelayModel::Kind::Fixed;
        s.delay.fixed = ms_field(d, "fixed_ms", s.delay.fixed);
      } else if (model == "uniform") {
        s.delay.kind = DelayModel::Kind::Uniform;
        s.delay.lo = ms_field(d, "lo_ms", s.delay.lo);
        s.delay.hi = ms_field(d, "hi_ms", s.delay.hi);
      } else if (model == "matrix") {
        s.delay.kind = DelayModel::Kind::Matrix;
        for (const auto& row : d.at("matrix_ms")) {
          std::vector<Micros> r;
          for (const auto& v : row) r.push_back(static_cast<Micros>(v.get<double>() * 1000.0));
          s.delay.matrix.push_back(std::move(r));
        }
        s.delay.jitter = ms_field(d, "jitter_ms", 0);
      } else {
        throw ScenarioError("unknown delay model '" + model + "'");
      }
    }
    if (j.contains("adversary")) {
      const auto& a = j.at("adversary");
      s.adversary.cap = ms_field(a, "pre_gst_cap_ms", s.adversary.cap);
      s.adversary.epoch = ms_field(a, "epoch_ms", s.adversary.epoch);
      s.adversary.targeted_percent = a.value("targeted_percent", s.adversary.targeted_percent);
    }
    if (j.contains("faults")) {
      for (const auto& f : j.at("faults")) {
        s.faults.push_back({ValidatorId{f.at("validator").get<std::uint32_t>()}, parse_behavior(f)});
      }
    }
    if (j.contains("load")) {
      const auto& l = j.at("load");
      s.load.rate_tps = l.value("rate_tps", s.load.rate_tps);
      s.load.tx_size = l.value("tx_size", s.load.tx_size);
    }
    s.seed = j.value("seed", s.seed);
    if (j.contains("flags")) {
      const auto& f = j.at("flags");
      s.unsafe_parent_threshold = f.value("unsafe_parent_threshold", s.unsafe_parent_threshold);
      s.early_block_optimization = f.value("early_block_optimization", s.early_block_optimization);
    }
    if (j.contains("limits")) {
      const auto& l = j.at("limits");
      s.block_limits.max_parents = l.value("max_parents", s.block_limits.max_parents);
      s.block_limits.max_block_bytes = l.value("max_block_bytes", s.block_limits.max_block_bytes);
      s.mempool_capacity = l.value("mempool_capacity", s.mempool_capacity);
      s.suspended_capacity = l.value("suspended_capacity", s.suspended_capacity);
      s.event_budget = l.value("event_budget", s.event_budget);
    }
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("malformed scenario field: ") + e.what());
  }
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot read scenario file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["committee"] = {{"n", s.n}, {"leaders_per_round", s.leaders_per_round}, {"pipelined", s.pipelined}};
  j["timing"] = {{"delta_ms", to_ms_value(s.delta)},
                 {"gst_ms", to_ms_value(s.gst)},
                 {"duration_ms", to_ms_value(s.duration)}};
  json d;
  switch (s.delay.kind) {
    case DelayModel::Kind::Fixed:
      d = {{"model", "fixed"}, {"fixed_ms", to_ms_value(s.delay.fixed)}};
      break;
    case DelayModel::Kind::Uniform:
      d = {{"model", "uniform"}, {"lo_ms", to_ms_value(s.delay.lo)}, {"hi_ms", to_ms_value(s.delay.hi)}};
      break;
    case DelayModel::Kind::Matrix: {
      json rows = json::array();
      for (const auto& row : s.delay.matrix) {
        json r = json::array();
        for (auto v : row) r.push_back(to_ms_value(v));
        rows.push_back(r);
      }
      d = {{"model", "matrix"}, {"matrix_ms", rows}, {"jitter_ms", to_ms_value(s.delay.jitter)}};
      break;
    }
  }
  j["delay"] = d;
  j["adversary"] = {{"pre_gst_cap_ms", to_ms_value(s.adversary.cap)},
                    {"epoch_ms", to_ms_value(s.adversary.epoch)},
                    {"targeted_percent", s.adversary.targeted_percent}};
  json faults = json::array();
  for (const auto& f : s.faults) {
    json entry = {{"validator", f.validator.index}};
    if (f.behavior.kind == FaultBehavior::Kind::Crash) {
      entry["kind"] = "crash";
      entry["at_round"] = f.behavior.crash_round;
    } else {
      entry["kind"] = "equivocate";
      entry["copies"] = f.behavior.copies;
    }
    faults.push_back(entry);
  }
  j["faults"] = faults;
  j["load"] = {{"rate_tps", s.load.rate_tps}, {"tx_size", s.load.tx_size}};
  j["seed"] = s.seed;
  j["flags"] = {{"unsafe_parent_threshold", s.unsafe_parent_threshold},
                {"early_block_optimization", s.early_block_optimization}};
  j["limits"] = {{"max_parents", s.block_limits.max_parents},
                 {"max_block_bytes", s.block_limits.max_block_bytes},
                 {"mempool_capacity", s.mempool_capacity},
                 {"suspended_capacity", s.suspended_capacity},
                 {"event_budget", s.event_budget}};
  return j.dump(2);
}

}  // namespace odon
