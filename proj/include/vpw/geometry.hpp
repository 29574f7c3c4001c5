#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "vpw/types.hpp"

namespace vpw {

// Convex nonnegative profile w(x1,x2) with w(0)=0, grad w(0)=0.
struct GraphProfile {
  std::string name;
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> grad;
  std::function<Mat2(const Vec2&)> hess;
  // third[k](i,j) = d^3 w / dx_k dx_i dx_j
  std::function<std::array<Mat2, 2>(const Vec2&)> third;

  static GraphProfile paraboloid(double kappa);
  static GraphProfile hyperboloid();
};

enum class DomainKind { HalfSpace, Corner, Graph };

struct BoundaryData {
  double b = 0.0;
  Vec3 projection = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();  // grad b, the inward unit normal at the projection
  Mat3 hessian = Mat3::Zero();
  bool hessian_defined = true;
};

// rho(x) = 2 pi_b(x) - x with its Jacobian and, for curved walls, the Hessians of its components.
struct Reflection {
  Vec3 rho;
  Mat3 J;
  std::array<Mat3, 3> H;
  bool curved = false;
};

enum class Membership { Interior, Boundary, Exterior };

struct ConeQuery {
  Membership membership = Membership::Exterior;
  Vec3 projection = Vec3::Zero();
  double aperture = 0.0;  // slope kappa in a3 > kappa |a'|; 0 for flat cones, inf when empty
};

struct SupportingHalfspace {
  Vec3 nu;
  double alpha;
  Vec3 z;
};

struct MonteCarloFraction {
  double fraction;
  double stderr_;
  std::uint64_t n;
};

class ConvexDomain {
 public:
  static ConvexDomain half_space();
  static ConvexDomain corner();
  static ConvexDomain graph(GraphProfile profile);
  static ConvexDomain paraboloid(double kappa) { return graph(GraphProfile::paraboloid(kappa)); }
  static ConvexDomain hyperboloid() { return graph(GraphProfile::hyperboloid()); }
  static ConvexDomain from_name(const std::string& kind, double kappa = 1.0);

  DomainKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const GraphProfile* profile() const { return profile_.get(); }

  double b(const Vec3& x) const;
  bool inside(const Vec3& x) const { return b(x) > 0.0; }

  // Throws NonUniqueProjection when x lies deeper than the strip width.
  BoundaryData boundary_data(const Vec3& x) const;
  // Same data without the strip check; used where a global foot point is fine.
  BoundaryData boundary_data_unchecked(const Vec3& x) const;
  Mat3 projection_jacobian(const BoundaryData& bd) const;

  Vec3 reflect(const Vec3& x) const;
  // No strip check; the graph second derivatives come from differencing the analytic Jacobian.
  Reflection reflection(const Vec3& x) const;
  double strip_width() const { return strip_width_; }
  double extension_depth() const;

  double gauge(const Vec3& x, const Vec3& v) const;
  double impact_time(const Vec3& x, const Vec3& v) const;
  double grazing(const Vec3& x, const Vec3& v) const;

  ConeQuery cone_query(const Vec3& a) const;
  bool cone_interior(const Vec3& a) const { return cone_query(a).membership == Membership::Interior; }
  double kappa_rec() const { return kappa_rec_; }
  bool cone_empty() const;

  SupportingHalfspace supporting_halfspace(const Vec3& v) const;
  double wall_deviation(double r) const;

  // Second fundamental form at the foot point, in ambient coordinates (tangential 3x3 block).
  Mat3 shape_operator(const Vec2& foot) const;
  Vec3 surface_point(const Vec2& p) const;

  static const Vec3& reference_point();

 private:
  struct Foot {
    Vec2 p;
    double dist;
  };
  Foot foot_point(const Vec3& x) const;
  Foot newton_foot(const Vec3& x, Vec2 p) const;
  double compute_strip_width() const;
  double compute_kappa_rec() const;
  double exit_time(const Vec3& x, const Vec3& v) const;

  DomainKind kind_ = DomainKind::HalfSpace;
  std::string name_;
  std::shared_ptr<const GraphProfile> profile_;
  double strip_width_ = kInf;
  double kappa_rec_ = 0.0;
};

// Fraction of sampled velocities w in the near-grazing band of z:
//   z in D : 0 < j_z(w) < alpha |w|;   z outside D : 0 < g(z,w) < alpha |w|.
// region_radius <= 0 samples the unit sphere, otherwise the ball |w - center| <= radius.
MonteCarloFraction grazing_set_fraction(const ConvexDomain& d, const Vec3& z, double alpha,
                                        const Vec3& center, double region_radius,
                                        std::uint64_t n_samples, std::uint64_t seed);

}  // namespace vpw
