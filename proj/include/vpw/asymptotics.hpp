#pragma once

#include <vector>

#include "vpw/ensemble.hpp"
#include "vpw/field.hpp"

namespace vpw {

struct ScatterProfile {
  double t = 0.0;
  std::vector<std::size_t> id;
  std::vector<Vec3> z, w, z_shifted;
  std::vector<double> q;
  std::vector<char> good;
  std::vector<char> in_domain;
  double good_fraction() const;
};

// z = x - t v, z_shifted = z - lambda ln(t) E_inf(w) over non-absorbed markers.
// Good set: g(z,w) > t^(-1/4) and |z| <= z_radius t^(1/100).
// einf may be null, meaning E_inf = 0.
ScatterProfile scatter_profile(const Ensemble& e, const ConvexDomain& d, double t, double lambda,
                               const EinfTracker* einf, double z_radius = 10.0);

// sup |position(t2) - position(t1)| over markers good at both times.
double scattering_drift(const ScatterProfile& p1, const ScatterProfile& p2, bool shifted);

struct SelfConsistency {
  double rel_sup_error = 0.0;
  std::vector<Vec3> rhs;  // sum q grad_a G_inf(a, w) over in-domain markers with w in the open cone
};

SelfConsistency einf_selfconsistency(const ScatterProfile& p, const GreenKernel& cone, const std::vector<Vec3>& a_grid,
                                     const std::vector<Vec3>& einf);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
};

// Least squares of ln value against ln t over t in [t_lo, t_hi].
RateFit rate_fit(const std::vector<double>& t, const std::vector<double>& value, double t_lo = 0.0,
                 double t_hi = kInf);

}  // namespace vpw
