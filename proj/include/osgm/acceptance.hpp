#pragma once

#include <string>
#include <vector>

namespace osgm {

// One entry per acceptance check. detail carries the measured quantities
// behind the verdict so a failure is diagnosable from the report alone.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// Runs the full battery in order. A criterion that throws is reported as
// failed with the exception text; the battery itself never throws.
std::vector<CriterionResult> run_acceptance();

// One line per criterion: "PASS|FAIL <id> <name> (<seconds>s) <detail>",
// followed by a summary line.
std::string acceptance_report(const std::vector<CriterionResult>& results);

}  // namespace osgm
