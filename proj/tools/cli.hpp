#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace spectral::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kValidation = 2, kTolerance = 3 };

/// Everything a run depends on. `workers` and `out` are not serialized:
/// artifacts do not depend on them.
struct RunConfig {
  std::string command;
  std::vector<std::string> measures;
  std::vector<std::string> testfns;
  std::string times;
  std::uint64_t paths = 1000;
  std::uint64_t bins = 1024;
  double umax = 256.0;
  std::string rule = "equal_width";
  std::uint64_t seed = 0;
  std::string out = "out";
  double tol = 1e-8;
  double lag = 0.0;
  double center = 0.0;
  std::vector<double> k_values;
  std::string a_file;
  std::string b_file;
  unsigned workers = 1;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

/// START:END:COUNT, endpoints may use pi ("0:2pi:64").
std::vector<double> parse_times(const std::string& text);

/// Runs the command line; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace spectral::cli
