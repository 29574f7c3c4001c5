#pragma once

#include <cstdint>
#include <vector>

#include "vpw/errors.hpp"
#include "vpw/field.hpp"
#include "vpw/rng.hpp"

namespace vpw {

// V_*(a) = int_0^a s/(1+s^4) ds for a < 0, zero otherwise.
double vstar(double a);
double vstar_d1(double a);
double vstar_d2(double a);

// A_1(t) = C_* / <t>^2
inline double a1(double c_star, double t) { return c_star / (1.0 + t * t); }

struct ExtensionConfig {
  double c_star = 1.0;
  double lambda = -1.0;
  double delta_ext = 1.0;
  double delta_star = 3.0;

  static ExtensionConfig for_domain(const ConvexDomain& d, double c_star = 1.0, double lambda = -1.0);
};

struct ExtendedSample {
  double psi = 0.0;
  Vec3 F = Vec3::Zero();
  Mat3 H = Mat3::Zero();  // Hessian of psi; one-sided at the wall and at the cutoff edges
  bool in_domain = true;
};

// psi = chi_>(b + delta_*) phi0 + A_1(t) V_*(b), with phi0 = phi in D and -phi(rho(x)) outside.
class ExtensionMap {
 public:
  ExtensionMap(FieldSolver solver, ExtensionConfig cfg) : solver_(std::move(solver)), cfg_(cfg) {}

  const ExtensionConfig& config() const { return cfg_; }
  const FieldSolver& solver() const { return solver_; }
  const ConvexDomain& domain() const { return solver_.kernel().domain(); }
  void set_c_star(double c) { cfg_.c_star = c; }

  ExtendedSample evaluate(const SourceSet& src, double t, const Vec3& x, bool want_hess) const;
  std::vector<ExtendedSample> evaluate(const SourceSet& src, double t, const std::vector<Vec3>& xs,
                                       bool want_hess) const;

  // G(x,y) for x outside D is -G(rho(x), y).
  double extended_green(const Vec3& x, const Vec3& y) const;
  Vec3 extended_green_grad(const Vec3& x, const Vec3& y) const;

  // lambda grad b . F - v^T Hess b v; the outgoing set is invariant where this is >= 0.
  double margin(const SourceSet& src, double t, const Vec3& x, const Vec3& v) const;

 private:
  FieldSolver solver_;
  ExtensionConfig cfg_;
};

struct StripSample {
  Vec3 x;
  Vec3 v;
};

// Wall point with its inward normal, drawn from a patch of radius R around the origin.
struct WallPoint {
  Vec3 p;
  Vec3 n;
};
WallPoint sample_wall_point(const ConvexDomain& d, Stream& rng, double R);

// x = p - s n with s in [0, depth], |v| <= v_max.
std::vector<StripSample> sample_strip(const ConvexDomain& d, double depth, double v_max, double R, std::size_t n,
                                      std::uint64_t seed);

struct MarginResult {
  double min_margin = kInf;
  StripSample argmin{};
};

MarginResult invariant_domain_margin(const ExtensionMap& ext, const SourceSet& src, double t,
                                     const std::vector<StripSample>& samples);

// Doubles C_* from c0 until the margin clears -tol at every t; src_at(t) supplies the sources.
template <class SrcAt>
double calibrate_c_star(ExtensionMap& ext, SrcAt src_at, const std::vector<double>& times,
                        const std::vector<StripSample>& samples, double tol = 1e-9, double c0 = 1.0,
                        int max_doublings = 60) {
  double c = c0;
  for (int k = 0; k <= max_doublings; ++k, c *= 2.0) {
    ext.set_c_star(c);
    bool ok = true;
    for (double t : times)
      if (invariant_domain_margin(ext, src_at(t), t, samples).min_margin < -tol) {
        ok = false;
        break;
      }
    if (ok) return c;
  }
  throw Error("C_* calibration did not converge");
}

// Largest n . grad phi over wall samples (n inward); negative means the Hopf sign holds.
double hopf_max(const FieldSolver& fs, const SourceSet& src, std::size_t n, double R, std::uint64_t seed);

}  // namespace vpw
