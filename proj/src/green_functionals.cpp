#include "vpw/green_functionals.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "vpw/errors.hpp"
#include "vpw/quadrature.hpp"
#include "vpw/rng.hpp"
#include "vpw/window.hpp"

namespace vpw {

namespace {

void add_break(std::vector<double>& v, double lo, double hi, double p) {
  if (p > lo && p < hi) v.push_back(p);
}

// Inside arcs of the circle (x1 + rho cos f, x2 + rho sin f) in the quadrant {y1 > 0, y2 > 0}.
std::vector<std::pair<double, double>> corner_arcs(double x1, double x2, double rho) {
  std::vector<double> br{0.0, 2.0 * kPi};
  auto wrap = [](double a) {
    a = std::fmod(a, 2.0 * kPi);
    return a < 0.0 ? a + 2.0 * kPi : a;
  };
  if (rho > std::abs(x1)) {
    double a = std::acos(-x1 / rho);
    br.push_back(wrap(a));
    br.push_back(wrap(-a));
  }
  if (rho > std::abs(x2)) {
    double a = std::asin(-x2 / rho);
    br.push_back(wrap(a));
    br.push_back(wrap(kPi - a));
  }
  std::sort(br.begin(), br.end());
  std::vector<std::pair<double, double>> arcs;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    double a = br[i], b = br[i + 1];
    if (b - a < 1e-15) continue;
    double m = 0.5 * (a + b);
    if (x1 + rho * std::cos(m) > 0.0 && x2 + rho * std::sin(m) > 0.0) arcs.emplace_back(a, b);
  }
  return arcs;
}

// Quadrature over {y in D : r_lo <= |y-x| <= r_hi} for the half-space and the corner.
// f(y, w) receives the node and its full weight.
template <class F>
void integrate_shell(const ConvexDomain& d, const Vec3& x, double r_lo, double r_hi, int n,
                     const std::vector<double>& mu_breaks, int radial_panels, F&& f) {
  const GaussRule& g = gauss_legendre(n);
  std::vector<double> rb{r_lo, r_hi};
  for (int k = 1; k < radial_panels; ++k) rb.push_back(r_lo * std::pow(r_hi / r_lo, double(k) / radial_panels));
  if (d.kind() == DomainKind::HalfSpace) {
    add_break(rb, r_lo, r_hi, std::abs(x(2)));
  } else if (d.kind() == DomainKind::Corner) {
    add_break(rb, r_lo, r_hi, std::abs(x(0)));
    add_break(rb, r_lo, r_hi, std::abs(x(1)));
    add_break(rb, r_lo, r_hi, std::hypot(x(0), x(1)));
  } else {
    throw NoClosedForm("shell quadrature implemented for half-space and corner");
  }
  std::sort(rb.begin(), rb.end());
  for (std::size_t ip = 0; ip + 1 < rb.size(); ++ip) {
    double sa = std::log(rb[ip]), sb = std::log(rb[ip + 1]);
    for (int ir = 0; ir < n; ++ir) {
      double s = 0.5 * (sa + sb) + 0.5 * (sb - sa) * g.x[ir];
      double r = std::exp(s);
      double wr = 0.5 * (sb - sa) * g.w[ir] * r * r * r;
      std::vector<double> mb{-1.0, 1.0};
      if (d.kind() == DomainKind::HalfSpace) {
        mb[0] = std::max(-1.0, -x(2) / r);
      } else {
        for (double c : {std::abs(x(0)), std::abs(x(1)), std::hypot(x(0), x(1))}) {
          if (c < r) {
            double m = std::sqrt(1.0 - (c / r) * (c / r));
            add_break(mb, -1.0, 1.0, m);
            add_break(mb, -1.0, 1.0, -m);
          }
        }
      }
      for (double m : mu_breaks) add_break(mb, mb.front(), mb.back(), m);
      std::sort(mb.begin(), mb.end());
      for (std::size_t jm = 0; jm + 1 < mb.size(); ++jm) {
        double ma = mb[jm], mbb = mb[jm + 1];
        if (mbb - ma < 1e-15) continue;
        for (int im = 0; im < n; ++im) {
          double mu = 0.5 * (ma + mbb) + 0.5 * (mbb - ma) * g.x[im];
          double wm = 0.5 * (mbb - ma) * g.w[im];
          double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
          double rho = r * st;
          if (d.kind() == DomainKind::HalfSpace) {
            const int nphi = 2 * n;
            for (int k = 0; k < nphi; ++k) {
              double ph = 2.0 * kPi * (k + 0.5) / nphi;
              Vec3 y(x(0) + rho * std::cos(ph), x(1) + rho * std::sin(ph), x(2) + r * mu);
              f(y, wr * wm * 2.0 * kPi / nphi);
            }
          } else {
            for (auto [a, b] : corner_arcs(x(0), x(1), rho)) {
              for (int k = 0; k < n; ++k) {
                double ph = 0.5 * (a + b) + 0.5 * (b - a) * g.x[k];
                double wp = 0.5 * (b - a) * g.w[k];
                Vec3 y(x(0) + rho * std::cos(ph), x(1) + rho * std::sin(ph), x(2) + r * mu);
                f(y, wr * wm * wp);
              }
            }
          }
        }
      }
    }
  }
}

Mat3 hess_u_R(const GreenKernel& k, const Vec3& x, double R, int n) {
  const ScaleWindow& win = ScaleWindow::instance();
  Mat3 acc = Mat3::Zero();
  integrate_shell(k.domain(), x, 0.25 * R, 4.0 * R, n, {}, 8, [&](const Vec3& y, double w) {
    Vec3 gphi;
    Mat3 hphi;
    double phi = win.radial(x - y, R, &gphi, &hphi);
    if (phi == 0.0 && gphi.squaredNorm() == 0.0) return;
    Vec3 gG;
    Mat3 hG;
    double G = k.eval(x, y, &gG, &hG);
    acc += w * (phi * hG + gphi * gG.transpose() + gG * gphi.transpose() + G * hphi);
  });
  return acc;
}

Mat3 scale_integral(const GreenKernel& k, const Vec3& x, double R_min, double R_max, int n_scales, int n) {
  Mat3 total = Mat3::Zero();
  double lr = std::log(R_max / R_min);
  double dl = n_scales > 1 ? lr / (n_scales - 1) : 0.0;
  for (int i = 0; i < n_scales; ++i) {
    double R = R_min * std::exp(i * dl);
    double w = (i == 0 || i == n_scales - 1) ? 0.5 * dl : dl;
    if (n_scales == 1) w = 1.0;
    total += w * hess_u_R(k, x, R, n);
  }
  return total;
}

}  // namespace

Mat3 t1hyp_scale_integral(const GreenKernel& k, const Vec3& x, double R_min, double R_max, int n_scales,
                          const ShellQuadOptions& opt) {
  Mat3 a = scale_integral(k, x, R_min, R_max, n_scales, opt.nodes);
  if (opt.check) {
    Mat3 b = scale_integral(k, x, R_min, R_max, n_scales, opt.nodes + opt.nodes / 2);
    double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-3);
    double diff = (a - b).cwiseAbs().maxCoeff();
    if (diff > opt.rel_tol * scale)
      throw QuadratureNonConvergence("scale integral refinement differs by " + std::to_string(diff / scale));
    return b;
  }
  return a;
}

double corner_mixed_scale_integral(const GreenKernel& k, const Vec3& x, double R_min, double R_max, int n_scales,
                                   const ShellQuadOptions& opt) {
  if (k.domain().kind() != DomainKind::Corner) throw Error("corner_mixed_scale_integral needs the corner domain");
  return std::abs(t1hyp_scale_integral(k, x, R_min, R_max, n_scales, opt)(0, 1));
}

namespace {
double flux_l1(const GreenKernel& k, const Vec3& x, double L, int n) {
  Vec3 nb = k.domain().boundary_data_unchecked(x).normal;
  double bx = k.domain().b(x);
  double acc = 0.0;
  // Dyadic radial panels toward the singular point y = x.
  double r_hi = L;
  double r_floor = 1e-7 * std::min(bx, L);
  std::vector<double> mu_breaks{0.0};
  while (r_hi > r_floor) {
    double r_lo = 0.5 * r_hi;
    integrate_shell(k.domain(), x, r_lo, r_hi, n, mu_breaks, 1, [&](const Vec3& y, double w) {
      double v = nb.dot(k.grad_x(x, y));
      if (v > 0.0) acc += w * v;
    });
    r_hi = r_lo;
  }
  return acc;
}
}  // namespace

FluxResult positive_normal_flux(const GreenKernel& k, const Vec3& x, double L, const ShellQuadOptions& opt) {
  FluxResult out{};
  double a = flux_l1(k, x, L, opt.nodes);
  if (opt.check) {
    double b = flux_l1(k, x, L, opt.nodes + opt.nodes / 2);
    if (std::abs(a - b) > opt.rel_tol * std::abs(b))
      throw QuadratureNonConvergence("flux refinement differs by " + std::to_string(std::abs(a - b) / std::abs(b)));
    a = b;
  }
  out.l1_near = a;
  Vec3 nb = k.domain().boundary_data_unchecked(x).normal;
  const int ndir = 2000;
  double sup = 0.0;
  for (int ir = 0; ir <= 16; ++ir) {
    double r = L * std::pow(16.0, ir / 16.0);
    for (int i = 0; i < ndir; ++i) {
      // Fibonacci sphere
      double zc = 1.0 - 2.0 * (i + 0.5) / ndir;
      double rr = std::sqrt(1.0 - zc * zc);
      double ph = kPi * (3.0 - std::sqrt(5.0)) * i;
      Vec3 y = x + r * Vec3(rr * std::cos(ph), rr * std::sin(ph), zc);
      if (!k.domain().inside(y)) continue;
      double v = nb.dot(k.grad_x(x, y));
      sup = std::max(sup, v);
    }
    // the positive part lives in a band of angular width ~ b(x)/r below the tangent plane
    Vec3 t1 = nb.unitOrthogonal(), t2 = nb.cross(t1);
    double band = std::min(1.0, 2.0 * k.domain().b(x) / r);
    for (int iu = 1; iu <= 64; ++iu) {
      double zc = -band * iu / 64.0;
      double rr = std::sqrt(1.0 - zc * zc);
      for (int ip = 0; ip < 32; ++ip) {
        double ph = 2.0 * kPi * ip / 32.0;
        Vec3 y = x + r * (rr * std::cos(ph) * t1 + rr * std::sin(ph) * t2 + zc * nb);
        if (!k.domain().inside(y)) continue;
        sup = std::max(sup, nb.dot(k.grad_x(x, y)));
      }
    }
  }
  out.linf_far = sup;
  return out;
}

double poisson_kernel(double h, const Vec2& z) {
  double q = z.squaredNorm() + h * h;
  return h / (2.0 * kPi * q * std::sqrt(q));
}

BoundaryFunction BoundaryFunction::inverse_distance(double L) {
  BoundaryFunction g;
  g.value = [L](const Vec2& a) { return 1.0 / (L + a.norm()); };
  g.grad = [L](const Vec2& a) {
    double r = a.norm();
    if (r == 0.0) return Vec2(Vec2::Zero());
    double d = L + r;
    return Vec2(-a / (r * d * d));
  };
  return g;
}

namespace {
// int P_h(z - a) f(a) da with a = z + h tan(t) e(phi): weight (1/2pi) sin t dt dphi.
template <class F>
double poisson_integral(double h, const Vec2& z, int n, F&& f) {
  const GaussRule& g = gauss_legendre(n);
  double acc = 0.0;
  const int nphi = 2 * n;
  // Panels in t accumulate toward pi/2, where the integrand samples the far field.
  std::vector<double> tb{0.0};
  double top = 0.5 * kPi;
  for (int k = 1; k <= 30; ++k) tb.push_back(top - top * std::pow(0.5, k));
  tb.push_back(top);
  for (std::size_t p = 0; p + 1 < tb.size(); ++p) {
    double a = tb[p], b = tb[p + 1];
    for (int i = 0; i < n; ++i) {
      double t = 0.5 * (a + b) + 0.5 * (b - a) * g.x[i];
      double wt = 0.5 * (b - a) * g.w[i] * std::sin(t);
      double r = h * std::tan(t);
      double ring = 0.0;
      for (int k = 0; k < nphi; ++k) {
        double ph = 2.0 * kPi * (k + 0.5) / nphi;
        ring += f(Vec2(z(0) + r * std::cos(ph), z(1) + r * std::sin(ph)));
      }
      acc += wt * ring / nphi;
    }
  }
  return acc;
}
}  // namespace

double poisson_kernel_mass(double h, int nodes) {
  return poisson_integral(h, Vec2::Zero(), nodes, [](const Vec2&) { return 1.0; });
}

double poisson_halfspace_extension(const BoundaryFunction& g, double L, const Vec2& tau, const Vec2& z, double t,
                                   int nodes) {
  double h = L * L + t;
  if (h <= 0.0) throw Error("poisson extension needs t > -L^2");
  return poisson_integral(h, z, nodes, [&](const Vec2& a) { return tau.dot(g.grad(a)); });
}

namespace {

Vec3 unit_vector(Stream& rs) {
  Vec3 w(rs.normal(), rs.normal(), rs.normal());
  return w / w.norm();
}

// Draw x near the wall with log-uniform depth and y at a log-uniform distance, both in D.
bool sample_pair(const ConvexDomain& d, Stream& rs, Vec3& x, Vec3& y) {
  for (int tries = 0; tries < 200; ++tries) {
    double depth = std::pow(10.0, rs.uniform(-3.0, 1.0));
    switch (d.kind()) {
      case DomainKind::HalfSpace:
        x = Vec3(rs.uniform(-1.0, 1.0), rs.uniform(-1.0, 1.0), depth);
        break;
      case DomainKind::Corner:
        x = Vec3(depth, std::pow(10.0, rs.uniform(-3.0, 1.0)), rs.uniform(-1.0, 1.0));
        break;
      case DomainKind::Graph: {
        Vec2 p(rs.uniform(-2.0, 2.0), rs.uniform(-2.0, 2.0));
        BoundaryData bd = d.boundary_data_unchecked(d.surface_point(p) + Vec3::UnitZ());
        x = d.surface_point(p) + std::min(depth, 0.5 * d.strip_width()) * bd.normal;
        break;
      }
    }
    double sep = std::pow(10.0, rs.uniform(-3.0, 2.0));
    y = x + sep * unit_vector(rs);
    if (d.inside(x) && d.inside(y)) return true;
  }
  return false;
}

}  // namespace

GreenRatioReport green_ratio_suite(const GreenKernel& k, std::uint64_t n_pairs, std::uint64_t seed) {
  GreenRatioReport rep;
  rep.n = n_pairs;
  const ConvexDomain& d = k.domain();
  double m0 = 0, m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  const std::int64_t n = static_cast<std::int64_t>(n_pairs);
#pragma omp parallel for reduction(max : m0, m1, m2, m3, m4) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    Stream rs(seed, 0x67ee, static_cast<std::uint64_t>(i));
    Vec3 x, y;
    if (!sample_pair(d, rs, x, y)) continue;
    double r = (x - y).norm();
    double bx = d.b(x), by = d.b(y);
    Vec3 gx;
    Mat3 hx;
    double G = k.eval(x, y, &gx, &hx);
    Vec3 gy = k.grad_y(x, y);
    Mat3 hxy = k.hess_xy(x, y);
    Mat3 hy = k.hess_y(x, y);
    double den0 = std::min({1.0, std::abs(bx) / r, by / r, bx * by / (r * r)});
    m0 = std::max(m0, r * std::abs(G) / den0);
    m1 = std::max(m1, r * r * gx.norm() / std::min(1.0, by / r));
    m2 = std::max(m2, r * r * gy.norm() / std::min(1.0, std::abs(bx) / r));
    m3 = std::max(m3, r * r * r * hxy.norm());
    m4 = std::max(m4, r * r * r * (hx.norm() + hy.norm()));
  }
  rep.egc = {m0, m1, m2, m3};
  rep.eg0 = m4;
  return rep;
}

double halfspace_vertical_identity(std::uint64_t n_pairs, std::uint64_t seed) {
  GreenKernel k(ConvexDomain::half_space(), GreenMode::ExactImages);
  double worst = 0.0;
  const std::int64_t n = static_cast<std::int64_t>(n_pairs);
#pragma omp parallel for reduction(max : worst) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    Stream rs(seed, 0x4a1f, static_cast<std::uint64_t>(i));
    Vec3 x, y;
    if (!sample_pair(k.domain(), rs, x, y)) continue;
    double a = k.hess_x(x, y)(2, 2);
    double b = k.hess_y(x, y)(2, 2);
    double den = std::abs(a) + std::abs(b);
    if (den > 0.0) worst = std::max(worst, std::abs(a - b) / den);
  }
  return worst;
}

std::uint64_t rescaled_monotonicity_violations(const GreenKernel& k, std::uint64_t n_triples, std::uint64_t seed,
                                               double slack) {
  const ConvexDomain& d = k.domain();
  std::int64_t bad = 0;
  const std::int64_t n = static_cast<std::int64_t>(n_triples);
#pragma omp parallel for reduction(+ : bad) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    Stream rs(seed, 0x3c0f, static_cast<std::uint64_t>(i));
    Vec3 x, y;
    int tries = 0;
    do {
      x = Vec3(rs.uniform(-2, 2), rs.uniform(-2, 2), rs.uniform(0, 4));
      y = Vec3(rs.uniform(-2, 2), rs.uniform(-2, 2), rs.uniform(0, 4));
      if (d.kind() == DomainKind::Corner) {
        x(0) = std::abs(x(0));
        x(1) = std::abs(x(1));
        y(0) = std::abs(y(0));
        y(1) = std::abs(y(1));
      }
    } while ((!d.cone_interior(x) || !d.cone_interior(y) || (x - y).norm() < 1e-3) && ++tries < 1000);
    double s = std::pow(2.0, rs.uniform(0.0, 3.0));
    double t = s * std::pow(2.0, rs.uniform(0.0, 3.0));
    double gs = k.rescaled(s, x, y);
    double gt = k.rescaled(t, x, y);
    double tol = slack * std::max(std::abs(gs), 1e-300);
    bool ok = gs <= gt + tol && gt <= tol;
    // G_W is not an exact Green function, so the comparison with the tangent
    // half-space is only asserted for the image kernels.
    if (k.mode() == GreenMode::ExactImages) ok = ok && k.rescaled(0.0, x, y) <= gs + tol;
    if (!ok) ++bad;
  }
  return static_cast<std::uint64_t>(bad);
}

}  // namespace vpw
