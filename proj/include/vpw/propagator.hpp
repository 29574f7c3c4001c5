#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vpw/ensemble.hpp"
#include "vpw/extension.hpp"

namespace vpw {

enum class BoundaryMode { Extended, Absorbing };

struct RunConfig {
  double t_end = 200.0;
  double dt0 = 0.01;
  double dt_growth = 0.1;  // eta in dt = min(dt0 max(1, eta t), dt_max)
  double dt_max = 0.5;
  BoundaryMode mode = BoundaryMode::Extended;
  bool tangent_maps = false;
  double checkpoint_t0 = 1.5;
  int series_per_octave = 4;
  double max_move_factor = 4.0;
  int max_halvings = 8;
  bool fatal_reentry = false;

  bool operator==(const RunConfig&) const = default;

  double dt_at(double t) const;
  // t0 2^k up to t_end.
  std::vector<double> checkpoint_times() const;
};

// eps(t) = c0 + c1 t; the linear part follows the spreading of the free flow.
struct Softening {
  double c0 = 0.0;
  double c1 = 0.0;
  double at(double t) const { return c0 + c1 * t; }
  static Softening constant(double eps) { return {eps, 0.0}; }
  static Softening from_neighbors(const NearestNeighbor& nn, double sx, double sv) {
    return {sx * nn.x, sv * nn.v};
  }
};

struct Counters {
  std::uint64_t steps = 0;
  std::uint64_t rejections = 0;
  std::uint64_t reentries = 0;
  std::uint64_t grazing_events = 0;
  std::uint64_t crossings = 0;
  double max_exit_vn = -kInf;  // largest v . grad b at a wall crossing
};

struct Derivatives {
  double S_Z = 0.0;
  double S_W = 0.0;
  double S_Z_all = 0.0;
  double S_W_all = 0.0;
  double max_det_dev = 0.0;  // max |det J - 1|
};

class Propagator {
 public:
  Propagator(GreenKernel kernel, ExtensionConfig ext, Softening soft, RunConfig cfg);

  void init(Ensemble e, double t0 = 0.0);

  const Ensemble& ensemble() const { return ens_; }
  Ensemble& ensemble() { return ens_; }
  double t() const { return t_; }
  const Counters& counters() const { return ctr_; }
  const RunConfig& config() const { return cfg_; }
  const Softening& softening() const { return soft_; }
  const ExtensionConfig& extension_config() const { return ext_; }
  const ConvexDomain& domain() const { return kernel_.domain(); }

  FieldSolver solver_at(double t) const { return FieldSolver(kernel_.with_softening(soft_.at(t))); }
  ExtensionMap extension_at(double t) const { return ExtensionMap(solver_at(t), ext_); }
  SourceSet sources() const { return ens_.sources(domain()); }

  // One kick-drift-kick step; dt is halved on a too-large move.
  // Returns the step actually taken; a finite t_target replaces t + dt on success.
  double step(double dt, double t_target = kInf);
  // Steps until t == T exactly.
  void advance_to(double T);

  Derivatives derivatives() const;

  void save(const std::string& path) const;
  // Restores the ensemble, counters and time; the kernel and configs come from the caller.
  void load(const std::string& path);

 private:
  void compute_acceleration();
  bool try_step(double dt, double t_new);

  GreenKernel kernel_;
  ExtensionConfig ext_;
  Softening soft_;
  RunConfig cfg_;
  Ensemble ens_;
  double t_ = 0.0;
  std::vector<Vec3> acc_;
  std::vector<Mat3> dacc_;
  Counters ctr_;
};

// Z = grad_x mu, W = (t grad_x + grad_v) mu at marker i through the tangent map.
void marker_derivatives(const Ensemble& e, std::size_t i, double t, Vec3& Z, Vec3& W);

}  // namespace vpw

namespace vpw {

// sum q |v|^2/2 + lambda sum_{i<j} q_i q_j G(x_i, x_j) over live markers.
double total_energy(const Ensemble& e, const GreenKernel& k, double lambda);

}  // namespace vpw
