#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "odontoceti/harness.hpp"
#include "odontoceti/report.hpp"

using namespace odon;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("odon-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "odon");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string log_line(std::uint32_t observer, Round round, const std::string& digest, std::uint64_t index) {
  std::ostringstream s;
  s << R"({"observer":)" << observer << R"(,"leader_slot":{"round":)" << round
    << R"(,"rank":0,"authority":1},"block_ref":{"author":1,"round":)" << round << R"(,"digest":")" << digest
    << R"("},"emit_index":)" << index << R"(,"sim_time_ms":)" << 10 * index + observer << "}\n";
  return s.str();
}

}  // namespace

TEST_CASE("nearest-rank percentiles") {
  CHECK(*nearest_rank({1, 2, 3}, 50) == 2);
  CHECK(*nearest_rank(std::vector<double>(10, 1.0), 90) == 1);
  CHECK(*nearest_rank({5, 1, 4, 2, 3, 10, 9, 8, 7, 6}, 90) == 9);
  CHECK(*nearest_rank({7}, 90) == 7);
  CHECK(*nearest_rank({1, 2, 3, 4}, 50) == 2);
  CHECK_FALSE(nearest_rank({}, 50));
}

TEST_CASE("verify accepts prefixes and reports the first divergence") {
  auto a = log_line(0, 1, "aa", 0) + log_line(0, 2, "bb", 1) + log_line(0, 3, "cc", 2);
  auto b = log_line(1, 1, "aa", 0) + log_line(1, 2, "bb", 1);
  CHECK(verify_commit_logs({"a", "b"}, {a, b}).ok);

  auto swapped = log_line(1, 2, "bb", 0) + log_line(1, 1, "aa", 1);
  auto r = verify_commit_logs({"a", "swapped"}, {a, swapped});
  CHECK_FALSE(r.ok);
  CHECK(r.message.find("record 1") != std::string::npos);
  CHECK(r.message.find("swapped") != std::string::npos);

  auto dup = log_line(0, 1, "aa", 0) + log_line(0, 1, "aa", 1);
  r = verify_commit_logs({"a", "dup"}, {a, dup});
  CHECK_FALSE(r.ok);
  CHECK(r.message.find("duplicate") != std::string::npos);

  CHECK_FALSE(verify_commit_logs({"a"}, {a}).ok);
  CHECK_FALSE(verify_commit_logs({"a", "junk"}, {a, "not json\n"}).ok);
}

TEST_CASE("cli run writes outputs, verifies and summarizes") {
  auto dir = scratch("run");
  std::string out, err;
  int code = cli({"run", "--seed", "3", "-o", dir.string(), "--rate", "300", "--duration-ms", "800"}, &out, &err);
  REQUIRE_MESSAGE(code == kExitOk, err);
  CHECK(fs::exists(dir / "report.jsonl"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(out.find("committed_slots") != std::string::npos);

  std::vector<std::string> logs{"verify"};
  for (int i = 0; i < 6; ++i) logs.push_back((dir / "commits" / ("validator-" + std::to_string(i) + ".jsonl")).string());
  CHECK(cli(logs) == kExitOk);

  std::string summary;
  CHECK(cli({"summarize", (dir / "report.jsonl").string()}, &summary) == kExitOk);
  CHECK(summary == slurp(dir / "summary.json"));

  auto again = scratch("run-again");
  CHECK(cli({"run", "--seed", "3", "-o", again.string(), "--rate", "300", "--duration-ms", "800"}) == kExitOk);
  CHECK(slurp(dir / "report.jsonl") == slurp(again / "report.jsonl"));
  CHECK(slurp(dir / "commits/validator-2.jsonl") == slurp(again / "commits/validator-2.jsonl"));

  // Forge: swap two records in one log.
  auto forged = dir / "forged.jsonl";
  {
    std::istringstream in(slurp(dir / "commits/validator-0.jsonl"));
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    REQUIRE(lines.size() > 4);
    std::swap(lines[2], lines[3]);
    std::ofstream f(forged);
    for (auto& l : lines) f << l << "\n";
  }
  CHECK(cli({"verify", logs[1], forged.string()}, nullptr, &err) == kExitInvariant);
  CHECK(err.find("record 3") != std::string::npos);
}

TEST_CASE("cli usage and input errors") {
  auto dir = scratch("usage");
  CHECK(cli({}) == kExitUsage);
  CHECK(cli({"run", "-o", dir.string()}) == kExitUsage);  // --seed is mandatory
  CHECK(cli({"verify", "only-one.jsonl"}) == kExitUsage);
  CHECK(cli({"summarize", (dir / "missing.jsonl").string()}) == kExitUsage);
  {
    std::ofstream f(dir / "corrupt.jsonl");
    f << "{\"type\":\"run\"}\n{broken\n";
  }
  CHECK(cli({"summarize", (dir / "corrupt.jsonl").string()}) == kExitUsage);

  auto scenario = dir / "too-many-faults.json";
  {
    std::ofstream f(scenario);
    f << R"({"committee": {"n": 11}, "faults": [
      {"validator": 0, "kind": "crash"}, {"validator": 1, "kind": "crash"}, {"validator": 2, "kind": "crash"}]})";
  }
  std::string err;
  CHECK(cli({"run", scenario.string(), "--seed", "1", "-o", dir.string()}, nullptr, &err) == kExitUsage);
  CHECK(err.find("exceed") != std::string::npos);
}

TEST_CASE("cli maps the watchdog to its own exit code") {
  auto dir = scratch("watchdog");
  auto scenario = dir / "tiny-budget.json";
  {
    std::ofstream f(scenario);
    f << R"({"limits": {"event_budget": 50}})";
  }
  CHECK(cli({"run", scenario.string(), "--seed", "1", "-o", dir.string()}) == kExitLiveness);
}

TEST_CASE("summary of an empty sample reports absent percentiles") {
  std::istringstream in("{\"type\":\"run\"}\n");
  auto stats = summarize_report(in);
  CHECK_FALSE(stats.median_latency_ms);
  CHECK_FALSE(stats.p90_latency_ms);
  CHECK(summary_to_json(stats).find("\"median_latency_ms\": null") != std::string::npos);
}
