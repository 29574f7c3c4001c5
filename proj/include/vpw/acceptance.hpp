#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vpw/config.hpp"

namespace vpw {

struct CriterionResult {
  int id = 0;
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  bool quick = true;
  std::uint64_t seed = 1;
  std::string out_dir = "acceptance_out";
  std::vector<int> only;              // empty: all sixteen
  std::optional<Scenario> scenario;   // base scenario for the shared long run
};

// Runs the criteria, printing one PASS/FAIL line per criterion to log as it finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream& log);

void write_acceptance_csv(const std::string& path, std::uint64_t seed, const std::vector<CriterionResult>& rows);

}  // namespace vpw
