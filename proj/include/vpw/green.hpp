#pragma once

#include <array>

#include "vpw/geometry.hpp"

namespace vpw {

enum class GreenMode { ExactImages, TangentImageGW, FreeSpace };

// One term c / |s(x) - y| of an image expansion, with the Jacobian of s and,
// for curved walls, the Hessians of its components.
struct ImageTerm {
  Vec3 s;
  double c;
  Mat3 J;
  bool curved = false;
  std::array<Mat3, 3> H;
};

struct ImageSet {
  int n = 0;
  std::array<ImageTerm, 4> term;
};

// Dirichlet Green function with Delta G = delta and G <= 0:
//   G(x,y) = -(1/4pi) sum_k c_k / |s_k(x) - y|_eps
class GreenKernel {
 public:
  GreenKernel(ConvexDomain domain, GreenMode mode, double softening = 0.0);
  static GreenKernel for_domain(const ConvexDomain& d, double softening = 0.0);
  static GreenKernel free_space(double softening = 0.0);

  const ConvexDomain& domain() const { return domain_; }
  GreenMode mode() const { return mode_; }
  double softening() const { return soft_; }
  GreenKernel with_softening(double eps) const;

  ImageSet images(const Vec3& x) const;

  double value(const Vec3& x, const Vec3& y) const;
  Vec3 grad_x(const Vec3& x, const Vec3& y) const;
  Vec3 grad_y(const Vec3& x, const Vec3& y) const;
  Mat3 hess_x(const Vec3& x, const Vec3& y) const;
  Mat3 hess_xy(const Vec3& x, const Vec3& y) const;  // (i,j) = d_xi d_yj G
  Mat3 hess_y(const Vec3& x, const Vec3& y) const;

  // Value, x-gradient and x-Hessian in one pass.
  double eval(const Vec3& x, const Vec3& y, Vec3* gx, Mat3* hx) const;

  // G_t(x,y) = t G(tx,ty); t = 0 gives the kernel of the tangent half-space {x3 > 0}.
  double rescaled(double t, const Vec3& x, const Vec3& y) const;

  // Kernel of the asymptotic cone (closed form for half-space and corner only).
  double cone_value(const Vec3& a, const Vec3& w) const;
  Vec3 cone_grad_a(const Vec3& a, const Vec3& w) const;

  // M_x(y) = 1/|sigma(x)-y| + n(x).F(sigma(x)-y), n the outward normal, F(p) = p/|p|^3.
  double majorant(const Vec3& x, const Vec3& y) const;

 private:
  double pair_terms(const ImageSet& im, const Vec3& y, Vec3* gs, Mat3* hs, Mat3* gxy) const;

  ConvexDomain domain_;
  GreenMode mode_;
  double soft_;
};

constexpr double kInv4Pi = 1.0 / (4.0 * kPi);

}  // namespace vpw
