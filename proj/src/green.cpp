#include "vpw/green.hpp"

#include <cmath>

#include "vpw/errors.hpp"

namespace vpw {

GreenKernel::GreenKernel(ConvexDomain domain, GreenMode mode, double softening)
    : domain_(std::move(domain)), mode_(mode), soft_(softening) {
  if (mode_ == GreenMode::ExactImages && domain_.kind() == DomainKind::Graph)
    throw NoClosedForm("no image formula for " + domain_.name() + "; use the tangent-image mode");
}

GreenKernel GreenKernel::for_domain(const ConvexDomain& d, double softening) {
  return GreenKernel(d, d.kind() == DomainKind::Graph ? GreenMode::TangentImageGW : GreenMode::ExactImages,
                     softening);
}

GreenKernel GreenKernel::free_space(double softening) {
  return GreenKernel(ConvexDomain::half_space(), GreenMode::FreeSpace, softening);
}

GreenKernel GreenKernel::with_softening(double eps) const {
  GreenKernel k = *this;
  k.soft_ = eps;
  return k;
}

ImageSet GreenKernel::images(const Vec3& x) const {
  ImageSet im;
  im.term[0] = ImageTerm{x, 1.0, Mat3::Identity()};
  im.n = 1;
  if (mode_ == GreenMode::FreeSpace) return im;
  switch (domain_.kind()) {
    case DomainKind::HalfSpace: {
      Mat3 S = Vec3(1.0, 1.0, -1.0).asDiagonal();
      im.term[1] = ImageTerm{S * x, -1.0, S};
      im.n = 2;
      return im;
    }
    case DomainKind::Corner: {
      Mat3 S1 = Vec3(-1.0, 1.0, 1.0).asDiagonal();
      Mat3 S2 = Vec3(1.0, -1.0, 1.0).asDiagonal();
      Mat3 S12 = S1 * S2;
      im.term[1] = ImageTerm{S1 * x, -1.0, S1};
      im.term[2] = ImageTerm{S2 * x, -1.0, S2};
      im.term[3] = ImageTerm{S12 * x, 1.0, S12};
      im.n = 4;
      return im;
    }
    case DomainKind::Graph: {
      Reflection r = domain_.reflection(x);
      ImageTerm t;
      t.s = r.rho;
      t.c = -1.0;
      t.J = r.J;
      t.curved = true;
      t.H = r.H;
      im.term[1] = t;
      im.n = 2;
      return im;
    }
  }
  return im;
}

double GreenKernel::pair_terms(const ImageSet& im, const Vec3& y, Vec3* gs, Mat3* hs, Mat3* gxy) const {
  double val = 0.0;
  if (gs) gs->setZero();
  if (hs) hs->setZero();
  if (gxy) gxy->setZero();
  const double e2 = soft_ * soft_;
  for (int k = 0; k < im.n; ++k) {
    const ImageTerm& t = im.term[k];
    Vec3 p = t.s - y;
    double r2 = p.squaredNorm() + e2;
    if (r2 == 0.0) throw SingularEvaluation("x = y with zero softening");
    double r = std::sqrt(r2);
    double ir = 1.0 / r, ir3 = ir / r2;
    val += t.c * ir;
    if (gs || gxy || hs) {
      Vec3 g = p * ir3;
      if (gs) *gs += t.c * (t.J.transpose() * g);
      if (hs || gxy) {
        Mat3 A = Mat3::Identity() * ir3 - 3.0 * ir3 / r2 * p * p.transpose();
        if (hs) {
          Mat3 h = t.J.transpose() * A * t.J;
          if (t.curved)
            for (int m = 0; m < 3; ++m) h += g(m) * t.H[m];
          *hs += t.c * h;
        }
        if (gxy) *gxy += t.c * (t.J.transpose() * A);
      }
    }
  }
  return val;
}

double GreenKernel::value(const Vec3& x, const Vec3& y) const {
  return -kInv4Pi * pair_terms(images(x), y, nullptr, nullptr, nullptr);
}

double GreenKernel::eval(const Vec3& x, const Vec3& y, Vec3* gx, Mat3* hx) const {
  Vec3 g;
  Mat3 h;
  double v = pair_terms(images(x), y, gx ? &g : nullptr, hx ? &h : nullptr, nullptr);
  if (gx) *gx = kInv4Pi * g;
  if (hx) *hx = kInv4Pi * h;
  return -kInv4Pi * v;
}

Vec3 GreenKernel::grad_x(const Vec3& x, const Vec3& y) const {
  Vec3 g;
  eval(x, y, &g, nullptr);
  return g;
}

Mat3 GreenKernel::hess_x(const Vec3& x, const Vec3& y) const {
  Mat3 h;
  eval(x, y, nullptr, &h);
  return h;
}

Vec3 GreenKernel::grad_y(const Vec3& x, const Vec3& y) const {
  ImageSet im = images(x);
  Vec3 out = Vec3::Zero();
  const double e2 = soft_ * soft_;
  for (int k = 0; k < im.n; ++k) {
    Vec3 p = im.term[k].s - y;
    double r2 = p.squaredNorm() + e2;
    if (r2 == 0.0) throw SingularEvaluation("x = y with zero softening");
    out += im.term[k].c * p / (r2 * std::sqrt(r2));
  }
  return -kInv4Pi * out;
}

Mat3 GreenKernel::hess_y(const Vec3& x, const Vec3& y) const {
  ImageSet im = images(x);
  Mat3 out = Mat3::Zero();
  const double e2 = soft_ * soft_;
  for (int k = 0; k < im.n; ++k) {
    Vec3 p = im.term[k].s - y;
    double r2 = p.squaredNorm() + e2;
    if (r2 == 0.0) throw SingularEvaluation("x = y with zero softening");
    double ir3 = 1.0 / (r2 * std::sqrt(r2));
    out += im.term[k].c * (Mat3::Identity() * ir3 - 3.0 * ir3 / r2 * p * p.transpose());
  }
  return kInv4Pi * out;
}

Mat3 GreenKernel::hess_xy(const Vec3& x, const Vec3& y) const {
  Mat3 m;
  pair_terms(images(x), y, nullptr, nullptr, &m);
  return -kInv4Pi * m;
}

double GreenKernel::rescaled(double t, const Vec3& x, const Vec3& y) const {
  if (t == 0.0) {
    if (domain_.kind() == DomainKind::Graph) {
      GreenKernel flat(ConvexDomain::half_space(), GreenMode::ExactImages, soft_);
      return flat.value(x, y);
    }
    return value(x, y);
  }
  return t * value(t * x, t * y);
}

double GreenKernel::cone_value(const Vec3& a, const Vec3& w) const {
  if (domain_.kind() == DomainKind::Graph)
    throw NoClosedForm("asymptotic cone of " + domain_.name() + " has no closed-form kernel");
  return value(a, w);
}

Vec3 GreenKernel::cone_grad_a(const Vec3& a, const Vec3& w) const {
  if (domain_.kind() == DomainKind::Graph)
    throw NoClosedForm("asymptotic cone of " + domain_.name() + " has no closed-form kernel");
  return grad_x(a, w);
}

double GreenKernel::majorant(const Vec3& x, const Vec3& y) const {
  BoundaryData bd = domain_.boundary_data(x);
  if (bd.b > 10.0) throw OutsideStrip("majorant needs b(x) <= 10");
  Vec3 s = 2.0 * bd.projection - x;
  Vec3 p = s - y;
  double r = p.norm();
  Vec3 n_out = -bd.normal;
  return 1.0 / r + n_out.dot(p) / (r * r * r);
}

}  // namespace vpw
