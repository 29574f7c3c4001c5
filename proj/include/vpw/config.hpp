#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vpw/ensemble.hpp"
#include "vpw/propagator.hpp"

namespace vpw {

struct FieldOptions {
  std::optional<double> softening;  // nullopt: from nearest-neighbor distances
  double soft_x_factor = 0.5;
  double soft_v_factor = 1.5;
  double probe_rmin = 1.0;
  double probe_rmax = 64.0;
  double probe_ratio = 2.0;
  int probe_dirs = 26;
  Vec3 agrid_lo = Vec3(-1.5, -1.5, 0.125);
  Vec3 agrid_hi = Vec3(1.5, 1.5, 2.0);
  double agrid_step = 0.125;

  bool operator==(const FieldOptions&) const = default;
};

struct Scenario {
  std::string domain_kind = "halfspace";
  double kappa = 1.0;
  InitialData data;
  std::optional<double> c_star;  // nullopt: calibrated
  double lambda = -1.0;
  FieldOptions field;
  RunConfig run;
  double z_radius = 10.0;
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  ConvexDomain domain() const { return ConvexDomain::from_name(domain_kind, kappa); }
};

bool operator==(const Scenario& a, const Scenario& b);

// Flat INI grammar: '[section]' headers, 'key = value' lines, '#' comments.
// Keys may also be written fully qualified ('run.dt0 = 0.01') anywhere.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string render_scenario(const Scenario& s);

// All accepted keys, in rendering order.
const std::vector<std::string>& schema_keys();

std::size_t levenshtein(const std::string& a, const std::string& b);

}  // namespace vpw
