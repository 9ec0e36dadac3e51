#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coarsehom/serialize.hpp"

namespace coarsehom {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitAcceptance = 4 };

/// Parameters of one command. Built either from command-line flags or from
/// a JSON config file; both paths go through from_json, which rejects
/// unknown fields and out-of-range values.
struct RunConfig {
  std::string command;
  std::optional<Json> space;        // space spec object
  std::string space_source;         // file path, "inline" or shorthand
  std::optional<std::string> mesh;  // circle | torus | interval
  std::optional<int> dims;
  std::optional<double> side;
  std::optional<int> subdiv;
  std::optional<std::string> demand;
  std::optional<int> reach;
  std::vector<int> sizes;
  std::optional<int> radius;
  std::optional<double> capacity;
  std::vector<double> epsilon;
  std::optional<long> budget;
  std::optional<int> r;
  std::optional<std::string> family;
  std::vector<int> radii;
  std::vector<std::vector<std::vector<int>>> regions;  // lists of labels
  std::optional<int> ahat;
  std::optional<std::string> verdict;  // path to a decide report
  std::vector<double> lambda;
  std::optional<double> cutoff;
  std::optional<double> spacing;
  std::optional<double> min_slope;
  std::optional<double> min_r_squared;
  std::optional<double> sup_stability;
  std::optional<std::string> out;
  std::uint64_t seed = 0;
  std::string profile = "quick";
  bool timing = false;

  /// Strict reader. `space` may be an object, a path to a JSON file, or a
  /// shorthand such as "lattice:2", "tree:3".
  static RunConfig from_json(const Json& j);
  /// Canonical echo written into reports.
  Json to_json() const;
};

/// Result of a command: the report, and a CSV table when one was requested.
struct RunOutcome {
  Json report;
  std::optional<std::string> csv;
  int exit_code = kExitOk;
};

RunOutcome run(const RunConfig& config);

/// Entry point of the coarsehom executable.
int cli_main(int argc, char** argv);

}  // namespace coarsehom
