#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vpw/config.hpp"

namespace vpw {

// One row of a verification report. value is the measured maximum (error,
// violation or ratio) or a fitted quantity; pass compares it to threshold.
struct CheckResult {
  std::string check;
  std::string geometry;
  std::uint64_t n = 0;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct GeometrySuiteOptions {
  std::uint64_t n_samples = 100000;
  std::uint64_t n_escape = 1000000;
  std::uint64_t n_fraction = 200000;
  std::uint64_t seed = 1;
};

std::vector<CheckResult> verify_geometry(const ConvexDomain& d, const GeometrySuiteOptions& opt = {});

// Checks: quantegc, quanteg0, halfgreen1, compgf0, t1hyp, corner-log, ext-flux, poisson; "all" runs the
// ones that apply to the geometry.
std::vector<CheckResult> verify_green(const ConvexDomain& d, const std::string& check, std::uint64_t n_samples,
                                      std::uint64_t seed);

struct ExtensionSuiteOptions {
  std::uint64_t n_strip = 100000;
  std::uint64_t n_wall = 1000;
  std::uint64_t n_interior = 10000;
  std::size_t n_markers = 0;  // 0: use the scenario's count
};

std::vector<CheckResult> verify_extension(const Scenario& s, const ExtensionSuiteOptions& opt = {});

void write_geometry_report(const std::string& path, std::uint64_t seed, const std::vector<CheckResult>& rows);
void write_green_report(const std::string& path, std::uint64_t seed, const std::vector<CheckResult>& rows);
void write_extension_report(const std::string& path, std::uint64_t seed, const std::vector<CheckResult>& rows);

}  // namespace vpw
