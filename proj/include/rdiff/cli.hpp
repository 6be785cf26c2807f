#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdiff {

// Command parameters as given on the command line; rationals stay strings
// until run() parses them.
struct RunConfig {
  int n = 2;
  std::string eps = "1/10";
  std::string delta = "1/10";
  std::string lambda = "1/2";
  std::optional<std::string> tau;  // default b_{2n}/2, or 1/128 for the relaxed demo
  std::optional<std::uint64_t> seed;
  std::size_t trials = 10000;
  std::size_t samples = 1000;
  int max_stages = 3;
  int partial_terms = 2;
  std::string mode = "full";  // full | relaxed-demo
  std::optional<std::string> config_path;  // verify/mc: read a generated config.json
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunResult {
  int exit_code = 0;  // 0 all PASS, 1 some FAIL, 2 usage error
  nlohmann::json report;
  std::optional<nlohmann::json> config;
  std::vector<std::string> curves;  // demo only, without header
};

nlohmann::json to_json(const RunConfig& c);

// generate | verify | mc | demo | cover. Throws UsageError on bad
// parameters; never writes files.
RunResult run(const std::string& command, const RunConfig& cfg);

// config.json, report.json and curves.csv under dir (created if missing).
void write_outputs(const RunResult& r, const std::string& dir);

}  // namespace rdiff
