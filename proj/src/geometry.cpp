#include "vpw/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "vpw/errors.hpp"
#include "vpw/rng.hpp"

namespace vpw {

GraphProfile GraphProfile::paraboloid(double kappa) {
  GraphProfile p;
  p.name = "paraboloid";
  p.value = [kappa](const Vec2& q) { return kappa * q.squaredNorm(); };
  p.grad = [kappa](const Vec2& q) { return Vec2(2.0 * kappa * q); };
  p.hess = [kappa](const Vec2&) { return Mat2(2.0 * kappa * Mat2::Identity()); };
  p.third = [](const Vec2&) { return std::array<Mat2, 2>{Mat2::Zero(), Mat2::Zero()}; };
  return p;
}

GraphProfile GraphProfile::hyperboloid() {
  GraphProfile p;
  p.name = "hyperboloid";
  p.value = [](const Vec2& q) {
    double s = q.squaredNorm();
    // sqrt(1+s)-1 without cancellation
    return s / (std::sqrt(1.0 + s) + 1.0);
  };
  p.grad = [](const Vec2& q) { return Vec2(q / std::sqrt(1.0 + q.squaredNorm())); };
  p.hess = [](const Vec2& q) {
    double r = std::sqrt(1.0 + q.squaredNorm());
    return Mat2((Mat2::Identity() - q * q.transpose() / (r * r)) / r);
  };
  p.third = [](const Vec2& q) {
    double r2 = 1.0 + q.squaredNorm();
    double r = std::sqrt(r2);
    std::array<Mat2, 2> t;
    for (int k = 0; k < 2; ++k) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          double dij = (i == j) ? 1.0 : 0.0, dik = (i == k) ? 1.0 : 0.0, djk = (j == k) ? 1.0 : 0.0;
          t[k](i, j) = -(dij * q(k) + dik * q(j) + djk * q(i)) / (r2 * r) +
                       3.0 * q(i) * q(j) * q(k) / (r2 * r2 * r);
        }
      }
    }
    return t;
  };
  return p;
}

const Vec3& ConvexDomain::reference_point() {
  static const Vec3 x0(0.0, 0.0, 1.0);
  return x0;
}

ConvexDomain ConvexDomain::half_space() {
  ConvexDomain d;
  d.kind_ = DomainKind::HalfSpace;
  d.name_ = "halfspace";
  d.strip_width_ = kInf;
  d.kappa_rec_ = 0.0;
  return d;
}

ConvexDomain ConvexDomain::corner() {
  ConvexDomain d;
  d.kind_ = DomainKind::Corner;
  d.name_ = "corner";
  d.strip_width_ = kInf;
  d.kappa_rec_ = 0.0;
  return d;
}

ConvexDomain ConvexDomain::graph(GraphProfile profile) {
  ConvexDomain d;
  d.kind_ = DomainKind::Graph;
  d.name_ = profile.name;
  d.profile_ = std::make_shared<const GraphProfile>(std::move(profile));
  d.strip_width_ = d.compute_strip_width();
  d.kappa_rec_ = d.compute_kappa_rec();
  return d;
}

ConvexDomain ConvexDomain::from_name(const std::string& kind, double kappa) {
  if (kind == "halfspace") return half_space();
  if (kind == "corner") return corner();
  if (kind == "paraboloid") return paraboloid(kappa);
  if (kind == "hyperboloid") return hyperboloid();
  throw Error("unknown domain kind '" + kind + "'");
}

Vec3 ConvexDomain::surface_point(const Vec2& p) const {
  return Vec3(p(0), p(1), profile_->value(p));
}

Mat3 ConvexDomain::shape_operator(const Vec2& p) const {
  Vec2 gw = profile_->grad(p);
  Mat2 hw = profile_->hess(p);
  Eigen::Matrix<double, 3, 2> T;
  T << 1.0, 0.0, 0.0, 1.0, gw(0), gw(1);
  Mat2 g = Mat2::Identity() + gw * gw.transpose();
  Mat2 h = hw / std::sqrt(1.0 + gw.squaredNorm());
  Mat2 gi = g.inverse();
  Mat3 W = T * gi * h * gi * T.transpose();
  return 0.5 * (W + W.transpose());
}

double ConvexDomain::compute_strip_width() const {
  double kmax = 0.0;
  for (int i = -20; i <= 20; ++i) {
    for (int j = -20; j <= 20; ++j) {
      Vec2 p(0.5 * i, 0.5 * j);
      Vec2 gw = profile_->grad(p);
      Mat2 g = Mat2::Identity() + gw * gw.transpose();
      Mat2 h = profile_->hess(p) / std::sqrt(1.0 + gw.squaredNorm());
      Eigen::EigenSolver<Mat2> es(g.inverse() * h);
      for (int k = 0; k < 2; ++k) kmax = std::max(kmax, es.eigenvalues()(k).real());
    }
  }
  return kmax > 0.0 ? 0.9 / kmax : kInf;
}

double ConvexDomain::compute_kappa_rec() const {
  double k6 = 0.0, k5 = 0.0;
  for (int a = 0; a < 8; ++a) {
    double th = 2.0 * kPi * a / 8.0;
    Vec2 e(std::cos(th), std::sin(th));
    k6 = std::max(k6, profile_->value(1e6 * e) / 1e6);
    k5 = std::max(k5, profile_->value(1e5 * e) / 1e5);
  }
  if (std::abs(k6 - k5) > 1e-3 * std::abs(k6)) return kInf;
  return k6;
}

bool ConvexDomain::cone_empty() const { return kind_ == DomainKind::Graph && !std::isfinite(kappa_rec_); }

ConvexDomain::Foot ConvexDomain::newton_foot(const Vec3& x, Vec2 p) const {
  const Vec2 xp(x(0), x(1));
  const double q = x(2);
  auto obj = [&](const Vec2& s) {
    double dw = profile_->value(s) - q;
    return 0.5 * ((s - xp).squaredNorm() + dw * dw);
  };
  double f = obj(p);
  for (int it = 0; it < 100; ++it) {
    double w = profile_->value(p);
    Vec2 gw = profile_->grad(p);
    Vec2 grad = (p - xp) + (w - q) * gw;
    if (grad.norm() < 1e-13 * (1.0 + x.norm())) break;
    Mat2 H = Mat2::Identity() + gw * gw.transpose() + (w - q) * profile_->hess(p);
    Vec2 step;
    Eigen::SelfAdjointEigenSolver<Mat2> es(H);
    if (es.eigenvalues()(0) > 1e-12) {
      step = -H.ldlt().solve(grad);
    } else {
      step = -grad;
    }
    double lam = 1.0;
    Vec2 pn = p + step;
    double fn = obj(pn);
    // Near the minimum f stalls at roundoff; accept steps that shrink the residual.
    auto resid = [&](const Vec2& s) {
      return ((s - xp) + (profile_->value(s) - q) * profile_->grad(s)).norm();
    };
    bool accept = fn <= f || resid(pn) < 0.5 * grad.norm();
    while (!accept && lam > 1e-12) {
      lam *= 0.5;
      pn = p + lam * step;
      fn = obj(pn);
      accept = fn <= f;
    }
    if ((pn - p).norm() < 1e-15 * (1.0 + p.norm())) {
      p = pn;
      f = fn;
      break;
    }
    p = pn;
    f = fn;
  }
  return Foot{p, std::sqrt(2.0 * f)};
}

ConvexDomain::Foot ConvexDomain::foot_point(const Vec3& x) const {
  const Vec2 xp(x(0), x(1));
  Foot best = newton_foot(x, xp);
  double vertical = x(2) - profile_->value(xp);
  if (vertical > 0.5 * strip_width_) {
    // Deep interior point: the local Newton solution may be a saddle, so scan.
    double rad = vertical;
    for (int ir = 1; ir <= 24; ++ir) {
      double r = rad * ir / 24.0;
      for (int ia = 0; ia < 48; ++ia) {
        double th = 2.0 * kPi * ia / 48.0;
        Vec2 p = xp + r * Vec2(std::cos(th), std::sin(th));
        double d = (x - surface_point(p)).norm();
        if (d < best.dist - 1e-12) {
          Foot cand = newton_foot(x, p);
          if (cand.dist < best.dist) best = cand;
        }
      }
    }
  }
  return best;
}

double ConvexDomain::b(const Vec3& x) const {
  switch (kind_) {
    case DomainKind::HalfSpace:
      return x(2);
    case DomainKind::Corner:
      if ((x(0) > 0.0 && x(1) > 0.0) || x(0) * x(1) <= 0.0) return std::min(x(0), x(1));
      return -std::hypot(x(0), x(1));
    case DomainKind::Graph: {
      Foot f = foot_point(x);
      double sign = (x(2) >= profile_->value(Vec2(x(0), x(1)))) ? 1.0 : -1.0;
      return sign * f.dist;
    }
  }
  return 0.0;
}

BoundaryData ConvexDomain::boundary_data_unchecked(const Vec3& x) const {
  BoundaryData bd;
  switch (kind_) {
    case DomainKind::HalfSpace:
      bd.b = x(2);
      bd.normal = Vec3::UnitZ();
      bd.projection = Vec3(x(0), x(1), 0.0);
      bd.hessian.setZero();
      return bd;
    case DomainKind::Corner: {
      bool inside = x(0) > 0.0 && x(1) > 0.0;
      if (inside || x(0) * x(1) <= 0.0) {
        bd.b = std::min(x(0), x(1));
        if (inside && x(0) == x(1)) {
          bd.normal = Vec3(1.0, 1.0, 0.0) / std::sqrt(2.0);
          bd.hessian_defined = false;
          bd.projection = Vec3(0.0, x(1), x(2));
        } else if (x(0) <= x(1)) {
          bd.normal = Vec3::UnitX();
          bd.projection = Vec3(0.0, x(1), x(2));
        } else {
          bd.normal = Vec3::UnitY();
          bd.projection = Vec3(x(0), 0.0, x(2));
        }
        bd.hessian.setZero();
      } else {
        double c = std::hypot(x(0), x(1));
        bd.b = -c;
        Vec3 e(x(0) / c, x(1) / c, 0.0);
        bd.normal = -e;
        bd.projection = Vec3(0.0, 0.0, x(2));
        Mat3 P = Mat3::Zero();
        P(0, 0) = 1.0;
        P(1, 1) = 1.0;
        bd.hessian = -(P - e * e.transpose()) / c;
      }
      return bd;
    }
    case DomainKind::Graph: {
      Foot f = foot_point(x);
      Vec3 y = surface_point(f.p);
      Vec2 gw = profile_->grad(f.p);
      Vec3 n(-gw(0), -gw(1), 1.0);
      n /= n.norm();
      bd.b = (x - y).dot(n);
      bd.normal = n;
      bd.projection = y;
      Mat3 W = shape_operator(f.p);
      Mat3 A = Mat3::Identity() - bd.b * W;
      bd.hessian = -W * A.inverse();
      bd.hessian = 0.5 * (bd.hessian + bd.hessian.transpose());
      return bd;
    }
  }
  return bd;
}

BoundaryData ConvexDomain::boundary_data(const Vec3& x) const {
  BoundaryData bd = boundary_data_unchecked(x);
  if (kind_ == DomainKind::Graph && bd.b > strip_width_) {
    throw NonUniqueProjection("b(x)=" + std::to_string(bd.b) + " exceeds strip width " +
                              std::to_string(strip_width_));
  }
  return bd;
}

Mat3 ConvexDomain::projection_jacobian(const BoundaryData& bd) const {
  return Mat3::Identity() - bd.normal * bd.normal.transpose() - bd.b * bd.hessian;
}

Vec3 ConvexDomain::reflect(const Vec3& x) const {
  BoundaryData bd = boundary_data(x);
  return 2.0 * bd.projection - x;
}

Reflection ConvexDomain::reflection(const Vec3& x) const {
  Reflection r;
  for (auto& h : r.H) h.setZero();
  switch (kind_) {
    case DomainKind::HalfSpace:
      r.J = Vec3(1.0, 1.0, -1.0).asDiagonal();
      r.rho = r.J * x;
      return r;
    case DomainKind::Corner: {
      BoundaryData bd = boundary_data_unchecked(x);
      r.rho = 2.0 * bd.projection - x;
      Vec3 s(1.0, 1.0, 1.0);
      if (bd.projection(0) == 0.0) s(0) = -1.0;
      if (bd.projection(1) == 0.0) s(1) = -1.0;
      r.J = s.asDiagonal();
      return r;
    }
    case DomainKind::Graph: {
      BoundaryData bd = boundary_data_unchecked(x);
      r.rho = 2.0 * bd.projection - x;
      r.J = 2.0 * projection_jacobian(bd) - Mat3::Identity();
      r.curved = true;
      const double h = 1e-5 * std::max(1.0, std::abs(bd.b));
      Mat3 dJ[3];
      for (int k = 0; k < 3; ++k) {
        Vec3 e = Vec3::Zero();
        e(k) = h;
        Mat3 Jp = projection_jacobian(boundary_data_unchecked(x + e));
        Mat3 Jm = projection_jacobian(boundary_data_unchecked(x - e));
        dJ[k] = (Jp - Jm) / h;  // 2 * d_k (D pi) / (2h)
      }
      for (int m = 0; m < 3; ++m)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) r.H[m](i, j) = 0.5 * (dJ[j](m, i) + dJ[i](m, j));
      return r;
    }
  }
  return r;
}

double ConvexDomain::extension_depth() const {
  return std::min(1.0, strip_width_);
}

double ConvexDomain::exit_time(const Vec3& x, const Vec3& v) const {
  // sup{s > 0 : x + s v in D}; +inf when the ray stays.
  switch (kind_) {
    case DomainKind::HalfSpace:
      if (v(2) >= 0.0) return x(2) > 0.0 ? kInf : -kInf;
      return x(2) > 0.0 ? x(2) / -v(2) : -kInf;
    case DomainKind::Corner: {
      if (!(x(0) > 0.0 && x(1) > 0.0)) {
        // Outside: the ray may still pass through D.
        double lo = 0.0, hi = kInf;
        for (int i = 0; i < 2; ++i) {
          if (v(i) == 0.0) {
            if (x(i) <= 0.0) return -kInf;
          } else if (v(i) > 0.0) {
            lo = std::max(lo, -x(i) / v(i));
          } else {
            hi = std::min(hi, -x(i) / v(i));
          }
        }
        return hi > lo ? hi : -kInf;
      }
      double s = kInf;
      for (int i = 0; i < 2; ++i)
        if (v(i) < 0.0) s = std::min(s, x(i) / -v(i));
      return s;
    }
    case DomainKind::Graph: {
      double vn = v.norm();
      if (vn == 0.0) return b(x) > 0.0 ? kInf : -kInf;
      double f0 = b(x);
      if (f0 > 0.0) {
        ConeQuery cq = cone_query(v);
        if (cq.membership != Membership::Exterior) return kInf;
      }
      // March out along the ray looking for an inside point, then for the exit.
      double s_in = f0 > 0.0 ? 0.0 : -1.0;
      double s = 1e-3 / vn;
      double last_pos = s_in;
      bool found = false;
      for (int k = 0; k < 60; ++k, s *= 2.0) {
        double f = b(x + s * v);
        if (f > 0.0) {
          last_pos = s;
          s_in = s;
        } else if (s_in >= 0.0) {
          found = true;
          break;
        }
        if (s > 1e12 / vn) break;
      }
      if (s_in < 0.0) return -kInf;
      if (!found) return kInf;
      double lo = last_pos, hi = s;
      for (int k = 0; k < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++k) {
        double mid = 0.5 * (lo + hi);
        if (b(x + mid * v) > 0.0) lo = mid; else hi = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return kInf;
}

double ConvexDomain::gauge(const Vec3& x, const Vec3& v) const {
  if (v.norm() == 0.0) return 0.0;
  double s = exit_time(x, v);
  if (s == kInf) return 0.0;
  if (s <= 0.0) return kInf;
  return 1.0 / s;
}

double ConvexDomain::impact_time(const Vec3& x, const Vec3& v) const {
  switch (kind_) {
    case DomainKind::HalfSpace:
      if (v(2) > 0.0) return -x(2) / v(2);
      if (v(2) < 0.0) return kInf;
      return x(2) > 0.0 ? -kInf : kInf;
    case DomainKind::Corner: {
      double I = -kInf;
      for (int i = 0; i < 2; ++i) {
        double ti;
        if (v(i) > 0.0) ti = -x(i) / v(i);
        else if (v(i) < 0.0) ti = kInf;
        else ti = x(i) > 0.0 ? -kInf : kInf;
        I = std::max(I, ti);
      }
      return I;
    }
    case DomainKind::Graph: {
      double vn = v.norm();
      if (vn == 0.0) return b(x) > 0.0 ? -kInf : kInf;
      double S = 1e9 / vn;
      if (b(x + S * v) <= 0.0) return kInf;
      double tlo = -1.0 / vn;
      bool found = false;
      for (int k = 0; k < 45; ++k, tlo *= 2.0) {
        if (b(x + tlo * v) <= 0.0) {
          found = true;
          break;
        }
      }
      if (!found) return -kInf;
      double lo = tlo, hi = S;
      for (int k = 0; k < 300 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++k) {
        double mid = 0.5 * (lo + hi);
        if (b(x + mid * v) <= 0.0) lo = mid; else hi = mid;
      }
      return lo;
    }
  }
  return kInf;
}

double ConvexDomain::grazing(const Vec3& x, const Vec3& v) const {
  double vn = v.norm();
  if (vn == 0.0) throw DegenerateVelocity("grazing called with v = 0");
  if (kind_ == DomainKind::HalfSpace) return v(2);

  auto h = [&](double s) { return v.dot(boundary_data_unchecked(x + s * v).normal); };
  const double span = 1e4 / vn;
  double I = impact_time(x, v);
  std::vector<double> grid;
  grid.reserve(513);
  if (std::isfinite(I)) {
    double dmax = I > -span ? span + I : span;
    double dmin = 1e-9 * span;
    grid.push_back(I);
    for (int k = 0; k < 511; ++k) {
      double d = dmin * std::pow(dmax / dmin, k / 510.0);
      grid.push_back(I - d);
    }
  } else {
    double dmin = 1e-9 * span;
    grid.push_back(0.0);
    for (int k = 0; k < 256; ++k) {
      double d = dmin * std::pow(span / dmin, k / 255.0);
      grid.push_back(d);
      grid.push_back(-d);
    }
  }
  std::sort(grid.begin(), grid.end());
  std::size_t best = 0;
  double gbest = kInf;
  std::vector<double> vals(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    vals[k] = h(grid[k]);
    if (vals[k] < gbest) {
      gbest = vals[k];
      best = k;
    }
  }
  double a = grid[best > 0 ? best - 1 : best];
  double c = grid[best + 1 < grid.size() ? best + 1 : best];
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int round = 0; round < 3; ++round) {
    double x1 = c - gr * (c - a), x2 = a + gr * (c - a);
    double f1 = h(x1), f2 = h(x2);
    for (int it = 0; it < 40; ++it) {
      if (f1 < f2) {
        c = x2;
        x2 = x1;
        f2 = f1;
        x1 = c - gr * (c - a);
        f1 = h(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (c - a);
        f2 = h(x2);
      }
    }
    gbest = std::min(gbest, std::min(f1, f2));
    double m = 0.5 * (a + c), w = (c - a);
    a = m - w;
    c = std::isfinite(I) ? std::min(I, m + w) : m + w;
  }
  return gbest;
}

ConeQuery ConvexDomain::cone_query(const Vec3& a) const {
  ConeQuery q;
  switch (kind_) {
    case DomainKind::HalfSpace:
      q.membership = a(2) > 0.0 ? Membership::Interior : (a(2) == 0.0 ? Membership::Boundary : Membership::Exterior);
      q.projection = Vec3(a(0), a(1), std::max(a(2), 0.0));
      q.aperture = 0.0;
      return q;
    case DomainKind::Corner: {
      double m = std::min(a(0), a(1));
      q.membership = m > 0.0 ? Membership::Interior : (m == 0.0 ? Membership::Boundary : Membership::Exterior);
      q.projection = Vec3(std::max(a(0), 0.0), std::max(a(1), 0.0), a(2));
      q.aperture = 0.0;
      return q;
    }
    case DomainKind::Graph: {
      double r = std::hypot(a(0), a(1));
      double s = a(2);
      q.aperture = kappa_rec_;
      if (!std::isfinite(kappa_rec_)) {
        q.membership = (r == 0.0 && s >= 0.0) ? Membership::Boundary : Membership::Exterior;
        q.projection = Vec3(0.0, 0.0, std::max(s, 0.0));
        return q;
      }
      const double k = kappa_rec_;
      double gap = s - k * r;
      q.membership = gap > 0.0 ? Membership::Interior : (gap == 0.0 ? Membership::Boundary : Membership::Exterior);
      if (gap >= 0.0) {
        q.projection = a;
      } else if (r + k * s <= 0.0) {
        q.projection = Vec3::Zero();
      } else {
        double n = std::sqrt(1.0 + k * k);
        double t = (r + k * s) / n;
        double pr = t / n, ps = t * k / n;
        Vec3 out(0.0, 0.0, ps);
        if (r > 0.0) {
          out(0) = a(0) / r * pr;
          out(1) = a(1) / r * pr;
        }
        q.projection = out;
      }
      return q;
    }
  }
  return q;
}

SupportingHalfspace ConvexDomain::supporting_halfspace(const Vec3& v) const {
  const Vec3& x0 = reference_point();
  double j = gauge(x0, v);
  if (j == 0.0) throw InsideCone("j(v) = 0: the ray from the reference point stays in D");
  SupportingHalfspace h;
  h.z = x0 + v / j;
  h.nu = boundary_data_unchecked(h.z).normal;
  h.alpha = h.z.dot(h.nu);
  return h;
}

double ConvexDomain::wall_deviation(double r) const {
  if (kind_ != DomainKind::Graph) return 0.0;
  if (cone_empty()) throw EmptyCone(name_ + " has an empty asymptotic cone");
  const double k = kappa_rec_;
  const double nrm = std::sqrt(1.0 + k * k);
  double worst = 0.0;
  for (int ir = 0; ir <= 16; ++ir) {
    double rad = 0.5 * r * std::pow(4.0, ir / 16.0);
    double rp = rad / nrm;
    for (int ia = 0; ia < 8; ++ia) {
      double th = 2.0 * kPi * ia / 8.0;
      Vec3 e(std::cos(th), std::sin(th), 0.0);
      Vec3 a = rp * e + Vec3(0.0, 0.0, k * rp);
      Vec3 N = (k * e - Vec3::UnitZ()) / nrm;
      double lo = 0.0, hi = 1.0;
      while (b(a + hi * N) > 0.0 && hi < 1e8) {
        lo = hi;
        hi *= 2.0;
      }
      for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (b(a + mid * N) > 0.0) lo = mid; else hi = mid;
      }
      worst = std::max(worst, 0.5 * (lo + hi));
    }
  }
  return worst;
}

MonteCarloFraction grazing_set_fraction(const ConvexDomain& d, const Vec3& z, double alpha,
                                        const Vec3& center, double region_radius,
                                        std::uint64_t n_samples, std::uint64_t seed) {
  if (alpha <= 0.0 || n_samples == 0) return MonteCarloFraction{0.0, 0.0, n_samples};
  const bool z_in = d.inside(z);
  std::int64_t hits = 0;
  const std::int64_t n = static_cast<std::int64_t>(n_samples);
#pragma omp parallel for reduction(+ : hits) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    Stream rs(seed, 0x6a5, static_cast<std::uint64_t>(i));
    Vec3 w(rs.normal(), rs.normal(), rs.normal());
    w /= w.norm();
    if (region_radius > 0.0) w = center + region_radius * std::cbrt(rs.uniform()) * w;
    double wn = w.norm();
    if (wn == 0.0) continue;
    double val = z_in ? d.gauge(z, w) : d.grazing(z, w);
    if (val > 0.0 && val < alpha * wn) ++hits;
  }
  double p = static_cast<double>(hits) / static_cast<double>(n);
  return MonteCarloFraction{p, std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n)), n_samples};
}

}  // namespace vpw
