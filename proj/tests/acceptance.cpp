// Acceptance gate: one line per criterion. Criteria 1-9 run in process at
// the full profile; criterion 10 runs the CLI quick suite twice.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "coarsehom/acceptance.hpp"

using namespace coarsehom;
namespace fs = std::filesystem;

namespace {

// Wall-time targets in seconds, where one is set.
const std::map<int, double> kRuntimeTargets = {{1, 60.0}, {2, 30.0}, {3, 20.0}};
constexpr double kQuickSuiteTarget = 120.0;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void print(int id, bool pass, const std::string& name, const std::string& detail) {
  std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << name << "  "
            << detail << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path to coarsehom>\n";
    return 2;
  }
  bool all = true;

  for (const CriterionResult& r : run_acceptance(SuiteProfile::Full)) {
    bool pass = r.pass;
    std::ostringstream detail;
    detail << r.metrics.dump();
    if (auto it = kRuntimeTargets.find(r.id); it != kRuntimeTargets.end()) {
      detail << "  time " << r.seconds << "s (target < " << it->second << "s)";
      pass = pass && r.seconds < it->second;
    }
    print(r.id, pass, r.name, detail.str());
    all = all && pass;
  }

  const fs::path dir = fs::temp_directory_path() / ("coarsehom_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::string reports[2];
  int codes[2] = {-1, -1};
  double seconds[2] = {0.0, 0.0};
  for (int i = 0; i < 2; ++i) {
    const fs::path out = dir / ("quick" + std::to_string(i) + ".json");
    const std::string cmd = std::string(argv[1]) + " check-all --quick > " + out.string();
    const auto t0 = std::chrono::steady_clock::now();
    const int status = std::system(cmd.c_str());
    seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    codes[i] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    reports[i] = slurp(out);
  }
  fs::remove_all(dir);
  const bool identical = !reports[0].empty() && reports[0] == reports[1];
  const bool fast = seconds[0] < kQuickSuiteTarget && seconds[1] < kQuickSuiteTarget;
  const bool pass10 = identical && fast && codes[0] == 0 && codes[1] == 0;
  std::ostringstream detail;
  detail << "{\"byte_identical\":" << (identical ? "true" : "false") << ",\"exit_codes\":[" << codes[0]
         << "," << codes[1] << "],\"report_bytes\":" << reports[0].size() << "}  time " << seconds[0]
         << "s, " << seconds[1] << "s (target < " << kQuickSuiteTarget << "s each)";
  print(10, pass10, "check-all --quick is repeatable", detail.str());
  all = all && pass10;

  std::cout << (all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAILED") << std::endl;
  return all ? 0 : 1;
}
