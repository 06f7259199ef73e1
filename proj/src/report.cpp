#include "odontoceti/report.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace odon {

using json = nlohmann::ordered_json;

namespace {

const char* path_name(DecisionPath p) {
  switch (p) {
    case DecisionPath::None: return "none";
    case DecisionPath::Direct: return "direct";
    case DecisionPath::Indirect: return "indirect";
  }
  return "none";
}

json slot_json(const LeaderSlot& slot) {
  return {{"round", slot.round}, {"rank", slot.rank}, {"authority", slot.authority.index}};
}

json ref_json(const BlockRef& ref) {
  return {{"author", ref.author.index}, {"round", ref.round}, {"digest", ref.digest.hex()}};
}

void emit(std::ostream& out, const json& j) { out << j.dump() << '\n'; }

}  // namespace

std::optional<double> nearest_rank(std::vector<double> samples, double percentile) {
  if (samples.empty()) return std::nullopt;
  std::sort(samples.begin(), samples.end());
  auto rank = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(samples.size())));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());
  return samples[rank - 1];
}

void write_report(const RunReport& report, std::ostream& out) {
  const auto& s = report.scenario;
  emit(out, {{"type", "run"},
             {"seed", s.seed},
             {"n", s.n},
             {"leaders_per_round", s.leaders_per_round},
             {"pipelined", s.pipelined},
             {"delta_ms", to_millis(s.delta)},
             {"gst_ms", to_millis(s.gst)},
             {"duration_ms", to_millis(s.duration)},
             {"unsafe_parent_threshold", s.unsafe_parent_threshold},
             {"early_block_optimization", s.early_block_optimization}});

  for (const auto& v : report.validators) {
    std::uint64_t committed = 0;
    for (const auto& d : v.decisions) committed += d.status.state == Decision::Commit;
    json rec = {{"type", "validator"},
                {"id", v.id.index},
                {"role", to_string(v.role)},
                {"round", v.round},
                {"highest_round", v.highest_round},
                {"decided_slots", v.decisions.size()},
                {"committed_leaders", committed},
                {"ordered_blocks", v.order.size()},
                {"undecided_tail", v.undecided_tail},
                {"blocks_received", v.counters.blocks_received},
                {"duplicates", v.counters.duplicates},
                {"invalid", v.counters.invalid},
                {"fetch_requests", v.counters.fetch_requests},
                {"mempool_left", v.mempool_left}};
    rec["last_decided"] = v.last_decided ? slot_json(*v.last_decided) : json(nullptr);
    emit(out, rec);
  }

  for (const auto& v : report.validators) {
    for (const auto& c : v.created) {
      emit(out, {{"type", "block"},
                 {"author", c.ref.author.index},
                 {"round", c.ref.round},
                 {"digest", c.ref.digest.hex()},
                 {"created_ms", to_millis(c.time)}});
    }
  }

  for (const auto& v : report.validators) {
    for (const auto& r : v.rounds) {
      emit(out, {{"type", "round"},
                 {"validator", v.id.index},
                 {"round", r.round},
                 {"entered_ms", to_millis(r.entered)},
                 {"advanced_ms", to_millis(r.advanced)},
                 {"duration_ms", to_millis(r.advanced - r.entered)},
                 {"reason", to_string(r.reason)}});
    }
  }

  for (const auto& v : report.validators) {
    for (const auto& d : v.decisions) {
      json rec = {{"type", "decision"},
                  {"observer", v.id.index},
                  {"leader_slot", slot_json(d.status.slot)},
                  {"status", to_string(d.status.state)},
                  {"path", path_name(d.status.path)}};
      rec["digest"] = d.status.block ? json(d.status.block->digest().hex()) : json(nullptr);
      rec["sim_time_ms"] = to_millis(d.time);
      emit(out, rec);
    }
  }

  for (const auto& v : report.validators) {
    for (const auto& o : v.order) {
      emit(out, {{"type", "commit"},
                 {"observer", v.id.index},
                 {"leader_slot", slot_json(o.leader_slot)},
                 {"block_ref", ref_json(o.block->reference())},
                 {"emit_index", o.emit_index},
                 {"sim_time_ms", to_millis(o.commit_time)}});
    }
  }

  for (const auto& v : report.validators) {
    for (const auto& l : v.latency) {
      emit(out, {{"type", "latency"},
                 {"tx", l.tx},
                 {"validator", l.validator.index},
                 {"created_ms", to_millis(l.created)},
                 {"committed_ms", to_millis(l.committed)},
                 {"latency_ms", to_millis(l.committed - l.created)}});
    }
  }

  const auto& c = report.counters;
  emit(out, {{"type", "counters"},
             {"events", c.events},
             {"messages_sent", c.messages_sent},
             {"messages_delivered", c.messages_delivered},
             {"messages_dropped", c.messages_dropped},
             {"post_gst_violations", c.post_gst_violations},
             {"transactions_submitted", c.transactions_submitted},
             {"end_time_ms", to_millis(c.end_time)}});
}

void write_commit_log(const ValidatorReport& v, std::ostream& out) {
  for (const auto& o : v.order) {
    emit(out, {{"observer", v.id.index},
               {"leader_slot", slot_json(o.leader_slot)},
               {"block_ref", ref_json(o.block->reference())},
               {"emit_index", o.emit_index},
               {"sim_time_ms", to_millis(o.commit_time)}});
  }
}

SummaryStats summarize_report(std::istream& in) {
  SummaryStats stats;
  std::map<std::uint32_t, std::string> roles;
  std::vector<std::pair<std::uint32_t, double>> rounds;
  std::vector<double> latencies;
  bool saw_run = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      auto type = j.at("type").get<std::string>();
      if (type == "run") {
        saw_run = true;
      } else if (type == "validator") {
        auto role = j.at("role").get<std::string>();
        roles[j.at("id").get<std::uint32_t>()] = role;
        if (role == "honest") {
          stats.committed_slots = std::max(stats.committed_slots, j.at("committed_leaders").get<std::uint64_t>());
          stats.undecided_tail = std::max(stats.undecided_tail, j.at("undecided_tail").get<std::uint64_t>());
        }
      } else if (type == "round") {
        rounds.emplace_back(j.at("validator").get<std::uint32_t>(), j.at("duration_ms").get<double>());
      } else if (type == "latency") {
        latencies.push_back(j.at("latency_ms").get<double>());
      }
    } catch (const json::exception& e) {
      throw ReportError("corrupt report at line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!saw_run) throw ReportError("not a run report (no run record)");

  stats.latency_samples = latencies.size();
  stats.committed_tx = latencies.size();
  stats.median_latency_ms = nearest_rank(latencies, 50);
  stats.p90_latency_ms = nearest_rank(latencies, 90);

  std::vector<double> honest_rounds;
  for (const auto& [who, ms] : rounds) {
    if (roles[who] == "honest") honest_rounds.push_back(ms);
  }
  if (!honest_rounds.empty()) {
    stats.mean_round_ms = std::accumulate(honest_rounds.begin(), honest_rounds.end(), 0.0) /
                          static_cast<double>(honest_rounds.size());
  }
  stats.median_round_ms = nearest_rank(honest_rounds, 50);
  return stats;
}

SummaryStats summarize(const RunReport& report) {
  std::stringstream buffer;
  write_report(report, buffer);
  return summarize_report(buffer);
}

std::string summary_to_json(const SummaryStats& s) {
  json j;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j["median_latency_ms"] = opt(s.median_latency_ms);
  j["p90_latency_ms"] = opt(s.p90_latency_ms);
  j["latency_samples"] = s.latency_samples;
  j["committed_tx"] = s.committed_tx;
  j["committed_slots"] = s.committed_slots;
  j["undecided_tail"] = s.undecided_tail;
  j["mean_round_ms"] = opt(s.mean_round_ms);
  j["median_round_ms"] = opt(s.median_round_ms);
  return j.dump(2) + "\n";
}

VerifyResult verify_commit_logs(const std::vector<std::string>& names,
                                const std::vector<std::string>& contents) {
  if (contents.size() < 2) return {false, "need at least two commit logs"};

  std::vector<std::vector<std::string>> logs;
  for (std::size_t i = 0; i < contents.size(); ++i) {
    std::vector<std::string> records;
    std::set<std::string> seen;
    std::istringstream in(contents[i]);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      json j;
      try {
        j = json::parse(line);
        json key = {{"leader_slot", j.at("leader_slot")},
                    {"block_ref", j.at("block_ref")},
                    {"emit_index", j.at("emit_index")}};
        auto block = j.at("block_ref").dump();
        if (!seen.insert(block).second) {
          return {false, names[i] + ":" + std::to_string(line_no) + ": duplicate block " + block};
        }
        records.push_back(key.dump());
      } catch (const json::exception& e) {
        return {false, names[i] + ":" + std::to_string(line_no) + ": malformed record: " + e.what()};
      }
    }
    logs.push_back(std::move(records));
  }

  for (std::size_t a = 0; a < logs.size(); ++a) {
    for (std::size_t b = a + 1; b < logs.size(); ++b) {
      std::size_t common = std::min(logs[a].size(), logs[b].size());
      for (std::size_t k = 0; k < common; ++k) {
        if (logs[a][k] != logs[b][k]) {
          return {false, "divergence at record " + std::to_string(k + 1) + ": " + names[a] + " has " +
                             logs[a][k] + ", " + names[b] + " has " + logs[b][k]};
        }
      }
    }
  }
  return {true, "ok: " + std::to_string(logs.size()) + " logs prefix-consistent"};
}

VerifyResult verify_orders(const RunReport& report) {
  std::vector<std::string> names;
  std::vector<std::string> contents;
  for (const auto& v : report.validators) {
    if (v.role == Role::Byzantine) continue;
    std::ostringstream out;
    write_commit_log(v, out);
    names.push_back("validator-" + std::to_string(v.id.index));
    contents.push_back(out.str());
  }
  if (contents.size() < 2) return {true, "fewer than two non-Byzantine validators"};
  return verify_commit_logs(names, contents);
}

}  // namespace odon
