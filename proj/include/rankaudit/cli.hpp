#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rankaudit/data_model.hpp"
#include "rankaudit/fairness.hpp"
#include "rankaudit/leaderboard.hpp"
#include "rankaudit/rank_stats.hpp"

namespace rankaudit {

// Everything a subcommand may consume. Defaults are the toolkit defaults;
// a `--config` file fills in values and explicit flags override it.
struct RunConfig {
  std::filesystem::path scores;
  std::filesystem::path demographics;
  std::filesystem::path pairs;
  std::filesystem::path policy;
  std::filesystem::path out = ".";
  std::string metric = "DSC";
  double alpha = 0.05;
  std::vector<double> tiers{0.001, 0.01, 0.05};
  std::string tiers_text;  // "--tiers" as given; parsed into tiers by validate()
  double tau = kDefaultToleranceMm;
  std::size_t min_n = kDefaultMinN;
  std::size_t depth = kDefaultDepth;
  double t = kDefaultSuccessThreshold;
  double flag_tau = kDefaultFlagTau;
  std::string mode = "RATE";
  std::string target;
  bool include_unknown = false;
  std::string order = "family";
  std::string sort = "AVG_DSC";
  std::size_t top_k = 4;
  std::uint64_t seed = 0;
  std::size_t methods = 5;
  std::size_t cases = 50;
  std::size_t reps = 200;
  std::string delimiter = ",";  // one character, or "tab"
};

// Checks threshold ranges and makes paths absolute. Throws ArgumentError.
void validate(RunConfig& cfg);

// Subcommands: metrics, significance, leaderboard, fairness, report,
// simulate-null. Exit 0 on success, 2 for invalid input or usage, 1 for
// internal errors. Diagnostics go to `err`; `out` only receives
// machine-readable key=value summaries.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace rankaudit
