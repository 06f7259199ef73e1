#include "odontoceti/harness.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "odontoceti/report.hpp"

namespace odon {

namespace fs = std::filesystem;

namespace {

void apply_overrides(Scenario& s, const ScenarioOverrides& o) {
  if (o.n) s.n = *o.n;
  if (o.leaders_per_round) s.leaders_per_round = *o.leaders_per_round;
  if (o.pipelined) s.pipelined = *o.pipelined;
  if (o.delta_ms) s.delta = static_cast<Micros>(*o.delta_ms * 1000.0);
  if (o.gst_ms) s.gst = static_cast<Micros>(*o.gst_ms * 1000.0);
  if (o.duration_ms) s.duration = static_cast<Micros>(*o.duration_ms * 1000.0);
  if (o.rate_tps) s.load.rate_tps = *o.rate_tps;
  if (o.unsafe_parent_threshold) s.unsafe_parent_threshold = *o.unsafe_parent_threshold;
  if (o.early_block_optimization) s.early_block_optimization = *o.early_block_optimization;
}

bool write_file(const fs::path& path, const std::string& content, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) {
    err << "error: cannot write " << path.string() << "\n";
    return false;
  }
  return true;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::stringstream buffer;
  buffer << f.rdbuf();
  return buffer.str();
}

}  // namespace

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  Scenario scenario;
  try {
    if (!options.scenario_path.empty()) scenario = load_scenario_file(options.scenario_path);
    scenario.seed = options.seed;
    apply_overrides(scenario, options.overrides);
    scenario.validate();
  } catch (const ScenarioError& e) {
    err << "error: invalid scenario: " << e.what() << "\n";
    return kExitUsage;
  }

  RunReport report;
  try {
    report = run_scenario(scenario);
  } catch (const LivenessError& e) {
    err << "error: liveness watchdog: " << e.what() << "\n";
    return kExitLiveness;
  }

  fs::path dir(options.output_dir);
  std::error_code ec;
  fs::create_directories(dir / "commits", ec);
  if (ec) {
    err << "error: cannot create " << (dir / "commits").string() << ": " << ec.message() << "\n";
    return kExitUsage;
  }

  std::ostringstream report_text;
  write_report(report, report_text);
  auto stats = summarize(report);
  if (!write_file(dir / "report.jsonl", report_text.str(), err) ||
      !write_file(dir / "summary.json", summary_to_json(stats), err) ||
      !write_file(dir / "scenario.json", scenario_to_json(scenario) + "\n", err)) {
    return kExitUsage;
  }
  for (const auto& v : report.validators) {
    if (v.role == Role::Byzantine) continue;
    std::ostringstream log;
    write_commit_log(v, log);
    if (!write_file(dir / "commits" / ("validator-" + std::to_string(v.id.index) + ".jsonl"), log.str(), err)) {
      return kExitUsage;
    }
  }

  const auto& c = report.counters;
  if (c.post_gst_violations != 0) {
    err << "invariant violated: " << c.post_gst_violations << " post-GST deliveries exceeded delta\n";
    return kExitInvariant;
  }
  if (c.messages_sent != c.messages_delivered + c.messages_dropped) {
    err << "invariant violated: message conservation (" << c.messages_sent << " sent, "
        << c.messages_delivered << " delivered, " << c.messages_dropped << " dropped)\n";
    return kExitInvariant;
  }
  auto verdict = verify_orders(report);
  if (!verdict.ok) {
    err << "invariant violated: " << verdict.message << "\n";
    return kExitInvariant;
  }

  out << summary_to_json(stats);
  return kExitOk;
}

int cmd_verify(const std::vector<std::string>& log_paths, std::ostream& out, std::ostream& err) {
  if (log_paths.size() < 2) {
    err << "error: verify needs at least two commit logs\n";
    return kExitUsage;
  }
  std::vector<std::string> contents;
  for (const auto& path : log_paths) {
    auto text = read_file(path);
    if (!text) {
      err << "error: cannot read " << path << "\n";
      return kExitUsage;
    }
    contents.push_back(std::move(*text));
  }
  auto result = verify_commit_logs(log_paths, contents);
  if (!result.ok) {
    err << "FAIL " << result.message << "\n";
    return kExitInvariant;
  }
  out << result.message << "\n";
  return kExitOk;
}

int cmd_summarize(const std::string& report_path, std::ostream& out, std::ostream& err) {
  std::ifstream in(report_path);
  if (!in) {
    err << "error: cannot read " << report_path << "\n";
    return kExitUsage;
  }
  try {
    out << summary_to_json(summarize_report(in));
  } catch (const ReportError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic simulator and tools for the odontoceti consensus protocol", "odon"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto& o = run_opts.overrides;
  auto* run = app.add_subcommand("run", "Run a scenario and write report, summary and commit logs");
  run->add_option("scenario", run_opts.scenario_path, "Scenario file (JSON); defaults are used if omitted")
      ->check(CLI::ExistingFile);
  run->add_option("-o,--out", run_opts.output_dir, "Output directory")->required();
  run->add_option("--seed", run_opts.seed, "Root seed for every random stream")->required();
  run->add_option("--n", o.n, "Committee size (5f+1)");
  run->add_option("--leaders", o.leaders_per_round, "Leaders per round");
  run->add_option("--pipelined", o.pipelined, "Start a wave every round (true/false)");
  run->add_option("--delta-ms", o.delta_ms, "Post-GST delay bound; timeout is 2x this");
  run->add_option("--gst-ms", o.gst_ms, "Global stabilization time");
  run->add_option("--duration-ms", o.duration_ms, "Proposing and load duration");
  run->add_option("--rate", o.rate_tps, "Client load in transactions per second");
  run->add_option("--unsafe-parent-threshold", o.unsafe_parent_threshold,
                  "UNSAFE: advance rounds after ceil(2n/3) parents instead of 4f+1 (true/false)");
  run->add_option("--early-block", o.early_block_optimization,
                  "Advance early when missing leaders are blamed by 2f+1 (true/false)");

  std::vector<std::string> logs;
  auto* verify = app.add_subcommand("verify", "Check commit logs for prefix consistency and duplicates");
  verify->add_option("logs", logs, "Commit log files")->required();

  std::string report_path;
  auto* summarize_cmd = app.add_subcommand("summarize", "Print summary statistics of a run report");
  summarize_cmd->add_option("report", report_path, "report.jsonl")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (run->parsed()) return cmd_run(run_opts, out, err);
  if (verify->parsed()) return cmd_verify(logs, out, err);
  return cmd_summarize(report_path, out, err);
}

}  // namespace odon
