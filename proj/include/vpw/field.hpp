#pragma once

#include <cstdint>
#include <vector>

#include "vpw/green.hpp"

namespace vpw {

// Point charges entering the Poisson sum; callers pass in-domain markers only.
struct SourceSet {
  std::vector<Vec3> y;
  std::vector<double> q;
  std::size_t size() const { return y.size(); }
};

struct FieldSample {
  double phi = 0.0;
  Vec3 E = Vec3::Zero();
  Mat3 gradE = Mat3::Zero();
};

struct FieldSnapshot {
  double t = 0.0;
  std::vector<Vec3> probes;
  std::vector<FieldSample> values;
};

// phi(x) = sum_i q_i G(x, y_i), E = grad phi, gradE = Hess phi.
class FieldSolver {
 public:
  explicit FieldSolver(GreenKernel kernel) : kernel_(std::move(kernel)) {}

  const GreenKernel& kernel() const { return kernel_; }
  FieldSolver with_softening(double eps) const { return FieldSolver(kernel_.with_softening(eps)); }

  // Blocked sums combined pairwise; the result does not depend on the thread count.
  FieldSample at(const SourceSet& src, const Vec3& x, bool want_grad) const;
  std::vector<FieldSample> evaluate(const SourceSet& src, const std::vector<Vec3>& targets, bool want_grad) const;
  FieldSnapshot snapshot(const SourceSet& src, double t, const std::vector<Vec3>& probes, bool want_grad) const;

  // Plain sequential loop over pairs through GreenKernel::eval; the test oracle for the above.
  std::vector<FieldSample> evaluate_reference(const SourceSet& src, const std::vector<Vec3>& targets,
                                              bool want_grad) const;

 private:
  GreenKernel kernel_;
};

// Dyadic-scale pieces with the scale-normalized window:
//   phi_R = R sum q phi(|x-y|/R) G,  E_R = R^2 sum q d[phi G],  M_R = R^3 sum q d^2[phi G]
struct ScaleComponent {
  double phi = 0.0;
  Vec3 E = Vec3::Zero();
  Mat3 M = Mat3::Zero();
};

ScaleComponent scale_component(const GreenKernel& k, const SourceSet& src, const Vec3& x, double R);

// Geometric R grid (per_octave points per factor 2) covering every shell that meets a source.
std::vector<double> scale_grid(const SourceSet& src, const Vec3& x, int per_octave);

// int E_R dR/R^3 by the trapezoid rule in ln R.
Vec3 reconstruct_E(const GreenKernel& k, const SourceSet& src, const Vec3& x, int per_octave = 8);

// Cone quantities with sources at the velocities w_i (weights q_i).
struct EffectiveField {
  std::vector<double> r;
  std::vector<Vec3> E0_r;  // r^2 sum q d_a[phi(|a-w|/r) G_inf(a,w)]
  Vec3 E0 = Vec3::Zero();  // t^-2 int E0_r dr/r^3
};

EffectiveField effective_field(const GreenKernel& cone, const SourceSet& w_src, double t, const Vec3& a,
                               int per_octave = 8);

// sum q grad_a G_inf(a, w_i): the t -> inf limit of t^2 E(ta, t).
std::vector<Vec3> cone_field(const GreenKernel& cone, const SourceSet& w_src, const std::vector<Vec3>& a);

// Probe families.
std::vector<Vec3> fixed_probe_grid(const ConvexDomain& d, double rmin, double rmax, double ratio, int n_dirs);
std::vector<Vec3> a_grid(const ConvexDomain& d, const Vec3& lo, const Vec3& hi, double step);

// Tracks t^2 E(ta, t) on the a-grid across checkpoints.
class EinfTracker {
 public:
  EinfTracker() = default;
  EinfTracker(std::vector<Vec3> grid, const Vec3& lo, const Vec3& hi, double step);

  void add(double t, std::vector<Vec3> t2E);
  bool empty() const { return times_.empty(); }
  const std::vector<Vec3>& grid() const { return grid_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Vec3>& latest() const { return history_.back(); }
  const std::vector<std::vector<Vec3>>& history() const { return history_; }

  // sup_a |t_k^2 E(t_k a) - t_{k+1}^2 E(t_{k+1} a)|, one entry per consecutive pair.
  std::vector<double> residuals() const;
  // Last residual over sup_a |E_inf|.
  double relative_change() const;
  // Residual decreasing over the last three checkpoints.
  bool converged() const;

  // Trilinear interpolation of the latest estimate after projecting w onto the cone and clamping to the box.
  Vec3 interpolate(const ConvexDomain& d, const Vec3& w) const;

 private:
  std::vector<Vec3> grid_;
  Vec3 lo_ = Vec3::Zero(), hi_ = Vec3::Zero();
  double step_ = 1.0;
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<int> index_;  // box cell -> grid position, -1 if filtered out
  std::vector<double> times_;
  std::vector<std::vector<Vec3>> history_;
};

}  // namespace vpw
