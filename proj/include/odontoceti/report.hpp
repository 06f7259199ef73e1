#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "odontoceti/simulator.hpp"

namespace odon {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SummaryStats {
  std::optional<double> median_latency_ms;
  std::optional<double> p90_latency_ms;
  std::uint64_t latency_samples = 0;
  std::uint64_t committed_tx = 0;
  std::uint64_t committed_slots = 0;
  std::uint64_t undecided_tail = 0;
  std::optional<double> mean_round_ms;
  std::optional<double> median_round_ms;
};

/// Nearest-rank percentile: the ceil(p/100 * N)-th smallest sample.
/// Empty input gives nullopt. `samples` need not be sorted.
std::optional<double> nearest_rank(std::vector<double> samples, double percentile);

/// Line-delimited JSON records, one object per line, fixed field order.
void write_report(const RunReport& report, std::ostream& out);
/// One record per ordered block: observer, leader_slot, block_ref, emit_index, sim_time_ms.
void write_commit_log(const ValidatorReport& validator, std::ostream& out);

/// Computed from the report records only.
SummaryStats summarize_report(std::istream& in);
SummaryStats summarize(const RunReport& report);
std::string summary_to_json(const SummaryStats& stats);

struct VerifyResult {
  bool ok = true;
  std::string message;
};

/// Every log is duplicate-free and every pair agrees on the consensus fields
/// (leader_slot, block_ref, emit_index) up to the shorter length. The
/// observer and local commit time legitimately differ between validators.
VerifyResult verify_commit_logs(const std::vector<std::string>& names,
                                const std::vector<std::string>& contents);

/// Same check on in-memory orders of the non-Byzantine validators.
VerifyResult verify_orders(const RunReport& report);

}  // namespace odon
