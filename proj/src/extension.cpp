#include "vpw/extension.hpp"

#include <cmath>

#include "vpw/window.hpp"

namespace vpw {

double vstar(double a) { return a < 0.0 ? 0.5 * std::atan(a * a) : 0.0; }

double vstar_d1(double a) { return a < 0.0 ? a / (1.0 + a * a * a * a) : 0.0; }

double vstar_d2(double a) {
  if (a >= 0.0) return 0.0;
  double a4 = a * a * a * a;
  return (1.0 - 3.0 * a4) / ((1.0 + a4) * (1.0 + a4));
}

ExtensionConfig ExtensionConfig::for_domain(const ConvexDomain& d, double c_star, double lambda) {
  ExtensionConfig c;
  c.c_star = c_star;
  c.lambda = lambda;
  c.delta_ext = d.extension_depth();
  c.delta_star = c.delta_ext + 2.0;
  return c;
}

ExtendedSample ExtensionMap::evaluate(const SourceSet& src, double t, const Vec3& x, bool want_hess) const {
  const ConvexDomain& d = domain();
  ExtendedSample out;
  const double bx = d.b(x);
  if (bx >= 0.0) {
    FieldSample f = solver_.at(src, x, want_hess);
    out.psi = f.phi;
    out.F = f.E;
    out.H = f.gradE;
    return out;
  }
  out.in_domain = false;
  BoundaryData bd = d.boundary_data_unchecked(x);
  const Vec3& n = bd.normal;
  const Mat3& hb = bd.hessian;
  const double A = a1(cfg_.c_star, t);
  const double s = bx + cfg_.delta_star;
  const double c = Cutoff::chi_gt(s);
  out.psi = A * vstar(bx);
  out.F = A * vstar_d1(bx) * n;
  if (want_hess) out.H = A * (vstar_d2(bx) * n * n.transpose() + vstar_d1(bx) * hb);
  if (c == 0.0) return out;

  Reflection r = d.reflection(x);
  if (!(d.b(r.rho) >= 0.0)) throw OutsideStrip("reflected point leaves the domain");
  FieldSample f = solver_.at(src, r.rho, want_hess);
  const double c1 = Cutoff::chi_gt_d1(s);
  const double p0 = -f.phi;
  const Vec3 g0 = -r.J.transpose() * f.E;
  out.psi += c * p0;
  out.F += c1 * p0 * n + c * g0;
  if (want_hess) {
    Mat3 h0 = r.J.transpose() * f.gradE * r.J;
    if (r.curved)
      for (int m = 0; m < 3; ++m) h0 += f.E(m) * r.H[m];
    h0 = -h0;
    const double c2 = Cutoff::chi_gt_d2(s);
    out.H += c2 * p0 * n * n.transpose() + c1 * p0 * hb + c1 * (n * g0.transpose() + g0 * n.transpose()) + c * h0;
  }
  return out;
}

std::vector<ExtendedSample> ExtensionMap::evaluate(const SourceSet& src, double t, const std::vector<Vec3>& xs,
                                                   bool want_hess) const {
  std::vector<ExtendedSample> out(xs.size());
  const std::int64_t n = static_cast<std::int64_t>(xs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) out[i] = evaluate(src, t, xs[i], want_hess);
  return out;
}

double ExtensionMap::extended_green(const Vec3& x, const Vec3& y) const {
  const ConvexDomain& d = domain();
  if (d.b(x) >= 0.0) return solver_.kernel().value(x, y);
  Vec3 rho = d.reflection(x).rho;
  if (!(d.b(rho) >= 0.0)) throw OutsideStrip("reflected point leaves the domain");
  return -solver_.kernel().value(rho, y);
}

Vec3 ExtensionMap::extended_green_grad(const Vec3& x, const Vec3& y) const {
  const ConvexDomain& d = domain();
  if (d.b(x) >= 0.0) return solver_.kernel().grad_x(x, y);
  Reflection r = d.reflection(x);
  if (!(d.b(r.rho) >= 0.0)) throw OutsideStrip("reflected point leaves the domain");
  return -r.J.transpose() * solver_.kernel().grad_x(r.rho, y);
}

double ExtensionMap::margin(const SourceSet& src, double t, const Vec3& x, const Vec3& v) const {
  BoundaryData bd = domain().boundary_data_unchecked(x);
  ExtendedSample e = evaluate(src, t, x, false);
  return cfg_.lambda * bd.normal.dot(e.F) - v.dot(bd.hessian * v);
}

WallPoint sample_wall_point(const ConvexDomain& d, Stream& rng, double R) {
  WallPoint w;
  switch (d.kind()) {
    case DomainKind::HalfSpace:
      w.p = Vec3(rng.uniform(-R, R), rng.uniform(-R, R), 0.0);
      w.n = Vec3::UnitZ();
      break;
    case DomainKind::Corner:
      if (rng.uniform() < 0.5) {
        w.p = Vec3(0.0, rng.uniform(0.0, R), rng.uniform(-R, R));
        w.n = Vec3::UnitX();
      } else {
        w.p = Vec3(rng.uniform(0.0, R), 0.0, rng.uniform(-R, R));
        w.n = Vec3::UnitY();
      }
      break;
    case DomainKind::Graph: {
      double rr = R * std::sqrt(rng.uniform()), th = 2.0 * kPi * rng.uniform();
      Vec2 u(rr * std::cos(th), rr * std::sin(th));
      Vec2 g = d.profile()->grad(u);
      w.p = d.surface_point(u);
      w.n = Vec3(-g(0), -g(1), 1.0).normalized();
      break;
    }
  }
  return w;
}

std::vector<StripSample> sample_strip(const ConvexDomain& d, double depth, double v_max, double R, std::size_t n,
                                      std::uint64_t seed) {
  std::vector<StripSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Stream rng(seed, 11, i);
    Vec3 p, nout;
    if (d.kind() == DomainKind::Corner && rng.uniform() < 0.2) {
      // outward directions at the edge fill the quadrant x1, x2 < 0
      double th = 0.5 * kPi * rng.uniform();
      p = Vec3(0.0, 0.0, rng.uniform(-R, R));
      nout = Vec3(-std::cos(th), -std::sin(th), 0.0);
    } else {
      WallPoint w = sample_wall_point(d, rng, R);
      p = w.p;
      nout = -w.n;
    }
    out[i].x = p + depth * rng.uniform() * nout;
    Vec3 v;
    do v = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    while (v.squaredNorm() > 1.0);
    out[i].v = v_max * v;
  }
  return out;
}

MarginResult invariant_domain_margin(const ExtensionMap& ext, const SourceSet& src, double t,
                                     const std::vector<StripSample>& samples) {
  std::vector<double> m(samples.size());
  const std::int64_t n = static_cast<std::int64_t>(samples.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) m[i] = ext.margin(src, t, samples[i].x, samples[i].v);
  MarginResult r;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (m[i] < r.min_margin) {
      r.min_margin = m[i];
      r.argmin = samples[i];
    }
  return r;
}

double hopf_max(const FieldSolver& fs, const SourceSet& src, std::size_t n, double R, std::uint64_t seed) {
  const ConvexDomain& d = fs.kernel().domain();
  std::vector<Vec3> pts(n), nrm(n);
  for (std::size_t i = 0; i < n; ++i) {
    Stream rng(seed, 12, i);
    WallPoint w = sample_wall_point(d, rng, R);
    pts[i] = w.p;
    nrm[i] = w.n;
  }
  std::vector<FieldSample> f = fs.evaluate(src, pts, false);
  double mx = -kInf;
  for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, nrm[i].dot(f[i].E));
  return mx;
}

}  // namespace vpw
