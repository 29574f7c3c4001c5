#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vpw/field.hpp"

namespace vpw {

enum class MarkerStatus : std::uint8_t { InDomain = 0, Exterior = 1, Absorbed = 2 };
const char* status_name(MarkerStatus s);

enum class Sampling { Grid, LowDiscrepancy };

struct InitialData {
  double epsilon = 0.05;
  Vec3 center_x = Vec3(0.0, 0.0, 2.0);
  Vec3 center_v = Vec3(0.0, 0.0, 0.5);
  double rx = 1.0;
  double rv = 1.0;
  std::size_t n_markers = 4000;
  Sampling sampling = Sampling::LowDiscrepancy;
  bool allow_exterior = false;

  bool operator==(const InitialData&) const = default;
};

// mu0 = eps prod_i (1-u_i^2)^3 with u = (x - x_c)/r_x, (v - v_c)/r_v; grad is (d_x, d_v).
double mu0(const InitialData& d, const Vec3& x, const Vec3& v, Vec6* grad = nullptr);
// int int mu0^2 dx dv in closed form.
double bump_mass(const InitialData& d);
// Largest partial derivative of mu0 (closed form) and sup <x>^4 <v>^4 mu0 (random scan of the support).
double bump_gradient_sup(const InitialData& d);
double bump_weighted_sup(const InitialData& d);

struct Ensemble {
  std::vector<Vec3> x, v;
  std::vector<Vec3> x0, v0;
  std::vector<double> mu0, q;
  std::vector<Vec6> dmu0;  // grad mu0 at (x0, v0)
  std::vector<MarkerStatus> status;
  std::vector<double> t_exit;  // wall-crossing time, NaN if none
  std::vector<Mat6> J;  // d(X,V)/d(x0,v0); empty when tangent maps are off

  std::size_t size() const { return x.size(); }
  // In-domain markers with b > 0; the only sources of the Poisson sum.
  SourceSet sources(const ConvexDomain& d) const;
  double total_charge() const;
  double charge_with(MarkerStatus s) const;
};

Ensemble sample_initial(const InitialData& spec, const ConvexDomain& d, std::uint64_t seed);

enum class MomentScope { Live, InDomain };

// max <x - t v>^a <v>^b |mu0| over live (not absorbed) or in-domain markers.
double moment_sup(const Ensemble& e, double t, int a, int b, MomentScope scope = MomentScope::Live);
inline double n1_norm(const Ensemble& e, double t) {
  double s = moment_sup(e, t, 4, 4);
  return s * s;
}
double cone_exterior_mass(const Ensemble& e, const ConvexDomain& d);

struct NearestNeighbor {
  double x = 0.0;  // mean nearest-neighbor distance in position
  double v = 0.0;  // and in velocity
};
NearestNeighbor mean_nearest_neighbor(const Ensemble& e);

}  // namespace vpw
