#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rydsim/app/config.hpp"

namespace rydsim::app {

inline constexpr const char* kVersion = "rydsim 1.0.0";

struct RunOptions {
  std::filesystem::path out_dir = ".";
  int jobs = 1;
  double tol = 1e-10;
  std::string format = "csv";  // time series and sweep tables: csv or json
};

struct RunReport {
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;
};

// Runs a single scenario in-process; throws ConfigError or NumericalError.
RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options);

// Full command line: parses flags, runs, maps failures to exit codes 0, 2 or 3.
int run_main(int argc, char** argv);

}  // namespace rydsim::app
