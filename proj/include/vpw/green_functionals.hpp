#pragma once

#include <array>
#include <cstdint>
#include <functional>

#include "vpw/green.hpp"

namespace vpw {

struct ShellQuadOptions {
  int nodes = 16;           // Gauss nodes per panel and direction
  double rel_tol = 1e-3;    // allowed disagreement between two refinement levels
  bool check = true;
};

// int over R in [R_min, R_max] (geometric grid, trapezoid in ln R) of Hess u_R(x),
// u_R(x) = int_D phi(|x-y|/R) G(x,y) dy with the scale-normalized window.
Mat3 t1hyp_scale_integral(const GreenKernel& k, const Vec3& x, double R_min, double R_max, int n_scales,
                          const ShellQuadOptions& opt = {});

// |(1,2) entry| of the same integral; Corner only.
double corner_mixed_scale_integral(const GreenKernel& k, const Vec3& x, double R_min, double R_max,
                                   int n_scales, const ShellQuadOptions& opt = {});

struct FluxResult {
  double l1_near;
  double linf_far;
};

// Near-field L1 and far-field sup of [grad b(x) . grad_x G(x,y)]_+ in y.
FluxResult positive_normal_flux(const GreenKernel& k, const Vec3& x, double L, const ShellQuadOptions& opt = {});

// Poisson kernel of the half-space at height h: (1/2pi) h / (|z|^2 + h^2)^{3/2}.
double poisson_kernel(double h, const Vec2& z);

struct BoundaryFunction {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> grad;
  static BoundaryFunction inverse_distance(double L);  // 1/(L + |a|)
};

// f^b(z,t) = int P_{L^2+t}(z-a) tau.grad g(a) da.
double poisson_halfspace_extension(const BoundaryFunction& g, double L, const Vec2& tau, const Vec2& z, double t,
                                   int nodes = 48);
// Same integral with f = 1 (kernel mass), for the normalization check.
double poisson_kernel_mass(double h, int nodes = 48);

struct GreenRatioReport {
  std::array<double, 4> egc{};  // the four pointwise bounds, max observed ratio each
  double eg0 = 0.0;             // |x-y|^3 (|Hess_x G| + |Hess_y G|)
  std::uint64_t n = 0;
};

// Sample pairs (x,y) in D with log-uniform depths and separations.
GreenRatioReport green_ratio_suite(const GreenKernel& k, std::uint64_t n_pairs, std::uint64_t seed);

// max |d2_x3 G - d2_y3 G| / (|d2_x3 G| + |d2_y3 G|) over sampled half-space pairs.
double halfspace_vertical_identity(std::uint64_t n_pairs, std::uint64_t seed);

// Count of (x,y,s,t) samples, 1 <= s <= t, violating G_s <= G_t <= 0 for x,y in the
// asymptotic cone; exact-image kernels also check G_0 <= G_s.
std::uint64_t rescaled_monotonicity_violations(const GreenKernel& k, std::uint64_t n_triples, std::uint64_t seed,
                                               double slack = 1e-6);

}  // namespace vpw
