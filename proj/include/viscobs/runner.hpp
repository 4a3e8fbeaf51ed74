#ifndef VISCOBS_RUNNER_HPP
#define VISCOBS_RUNNER_HPP

#include <map>
#include <string>
#include <vector>

#include "viscobs/scenario.hpp"

namespace viscobs {

struct Check {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
};

struct RunResult {
  int exit_code = 1;
  std::map<std::string, double> scalars;
  std::vector<Check> checks;
  std::vector<std::string> notes;      // refusals and diagnostics
  std::string report_json;             // serialized report (timestamp included)
};

// Executes the requested analyses in dependency order and writes report.json
// plus per-analysis CSVs under out_dir (created if missing; empty out_dir
// skips file output).  Exit code 0 iff every check passes.
RunResult run_scenario(const Scenario& scenario, const std::string& out_dir,
                       int threads = 0);

}  // namespace viscobs

#endif
