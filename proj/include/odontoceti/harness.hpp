#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace odon {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInvariant = 2, kExitLiveness = 3 };

/// Flags that override scenario-file fields.
struct ScenarioOverrides {
  std::optional<std::uint32_t> n;
  std::optional<std::uint32_t> leaders_per_round;
  std::optional<bool> pipelined;
  std::optional<double> delta_ms;
  std::optional<double> gst_ms;
  std::optional<double> duration_ms;
  std::optional<double> rate_tps;
  std::optional<bool> unsafe_parent_threshold;
  std::optional<bool> early_block_optimization;
};

struct RunOptions {
  std::string scenario_path;  // empty: built-in defaults
  std::string output_dir;
  std::uint64_t seed = 0;
  ScenarioOverrides overrides;
};

/// Writes <out>/report.jsonl, <out>/summary.json, <out>/scenario.json and
/// <out>/commits/validator-<i>.jsonl for every non-Byzantine validator.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_verify(const std::vector<std::string>& log_paths, std::ostream& out, std::ostream& err);
int cmd_summarize(const std::string& report_path, std::ostream& out, std::ostream& err);

/// Full command line: subcommand dispatch, help and usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace odon
