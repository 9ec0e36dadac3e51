#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "coarsehom/decider.hpp"
#include "coarsehom/serialize.hpp"

namespace coarsehom {

enum class SuiteProfile { Quick, Full };

SuiteProfile parse_suite_profile(const std::string& text);
std::string to_string(SuiteProfile p);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  Json metrics = Json::object();
  double seconds = 0.0;  // wall time, not part of deterministic output
};

/// Small random flow problem on a custom graph: 4-12 interior vertices,
/// 2-4 sinks each attached to the interior, +-1 demand on every interior
/// vertex, reach 1 or 2. Uses raw 64-bit Mersenne Twister output only, so
/// instances are identical on every platform.
struct RandomInstance {
  SpaceSpec spec;
  FlowProblem problem;
};
RandomInstance random_flow_instance(std::uint64_t seed);

/// Seeds of the randomized duality instances.
std::vector<std::uint64_t> duality_seeds();

/// Runs the built-in acceptance criteria 1-9 (criterion 10, repeat-run
/// determinism, needs two processes and lives in the acceptance binary).
std::vector<CriterionResult> run_acceptance(SuiteProfile profile);

}  // namespace coarsehom
