#include "vpw/verify.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "vpw/asymptotics.hpp"
#include "vpw/csv.hpp"
#include "vpw/errors.hpp"
#include "vpw/extension.hpp"
#include "vpw/green_functionals.hpp"
#include "vpw/rng.hpp"
#include "vpw/run.hpp"

namespace vpw {

namespace {

CheckResult at_most(std::string check, const ConvexDomain& d, std::uint64_t n, double value, double threshold) {
  return {std::move(check), d.name(), n, value, threshold, value <= threshold};
}

Vec3 box_point(Stream& s, const Vec3& lo, const Vec3& hi) {
  return Vec3(s.uniform(lo(0), hi(0)), s.uniform(lo(1), hi(1)), s.uniform(lo(2), hi(2)));
}

Vec3 unit_vector(Stream& s) {
  Vec3 v(s.normal(), s.normal(), s.normal());
  return v.normalized();
}

// Tangent unit vector at a point with normal n.
Vec3 tangent(Stream& s, const Vec3& n) {
  Vec3 v = unit_vector(s);
  v -= v.dot(n) * n;
  return v.normalized();
}

// A point within depth of the wall, on either side.
Vec3 near_wall(const ConvexDomain& d, Stream& s, double depth) {
  Vec3 p, n;
  switch (d.kind()) {
    case DomainKind::HalfSpace:
      p = Vec3(s.uniform(-3, 3), s.uniform(-3, 3), 0.0);
      n = Vec3::UnitZ();
      break;
    case DomainKind::Corner:
      if (s.uniform() < 0.5) {
        p = Vec3(0.0, s.uniform(0.2, 3), s.uniform(-3, 3));
        n = Vec3::UnitX();
      } else {
        p = Vec3(s.uniform(0.2, 3), 0.0, s.uniform(-3, 3));
        n = Vec3::UnitY();
      }
      depth = std::min(depth, 0.15);
      break;
    case DomainKind::Graph: {
      Vec2 u(s.uniform(-2, 2), s.uniform(-2, 2));
      Vec2 g = d.profile()->grad(u);
      p = d.surface_point(u);
      n = Vec3(-g(0), -g(1), 1.0).normalized();
      break;
    }
  }
  return p + s.uniform(-depth, depth) * n;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y, double* r2) {
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (r2) *r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return sxy / sxx;
}

// Max over |b| < strip of the distance to the nearest kink of b for the corner; inf elsewhere.
double corner_kink_distance(const ConvexDomain& d, const Vec3& x) {
  if (d.kind() != DomainKind::Corner) return kInf;
  return std::min({std::abs(x(0)), std::abs(x(1)), std::abs(x(0) - x(1)) / std::sqrt(2.0)});
}

}  // namespace

std::vector<CheckResult> verify_geometry(const ConvexDomain& d, const GeometrySuiteOptions& opt) {
  std::vector<CheckResult> out;
  const bool graph = d.kind() == DomainKind::Graph;
  const double strip = d.strip_width();
  const Vec3 lo(-3, -3, -2), hi(3, 3, 4);
  const std::uint64_t n = opt.n_samples;
  const std::uint64_t seed = opt.seed;

  {  // midpoint convexity
    Stream s(seed, 100);
    std::uint64_t bad = 0, m = 0;
    while (m < n) {
      Vec3 a = box_point(s, lo, hi), b = box_point(s, lo, hi);
      if (!d.inside(a) || !d.inside(b)) continue;
      ++m;
      if (!d.inside(0.5 * (a + b))) ++bad;
    }
    out.push_back(at_most("convexity_midpoint", d, m, double(bad), 0.0));
  }

  {  // eikonal, FD gradient, null direction of the Hessian, nondegeneracy outside
    Stream s(seed, 101);
    double eik = 0, fd_err = 0, null_err = 0, nondeg = 0;
    std::uint64_t m = 0, m_out = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      Vec3 x = box_point(s, lo, hi);
      double bx = d.b(x);
      if (bx > 0.0 && bx >= 0.9 * strip) continue;
      if (corner_kink_distance(d, x) < 1e-4) continue;
      BoundaryData bd = d.boundary_data_unchecked(x);
      ++m;
      eik = std::max(eik, std::abs(bd.normal.norm() - 1.0));
      if ((i & 15) == 0) {
        const double h = 1e-6;
        Vec3 g;
        for (int k = 0; k < 3; ++k) {
          Vec3 e = Vec3::Zero();
          e(k) = h;
          g(k) = (d.b(x + e) - d.b(x - e)) / (2 * h);
        }
        fd_err = std::max(fd_err, (g - bd.normal).norm());
      }
      if (!bd.hessian_defined) continue;
      null_err = std::max(null_err, (bd.hessian * bd.normal).norm());
      if (bd.b <= 0.0) {
        ++m_out;
        Eigen::SelfAdjointEigenSolver<Mat3> es(bd.b * bd.hessian, Eigen::EigenvaluesOnly);
        nondeg = std::max({nondeg, -es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff() - 1.0});
      }
    }
    out.push_back(at_most("eikonal", d, m, eik, 1e-9));
    out.push_back(at_most("grad_b_fd", d, m / 16, fd_err, 1e-5));
    out.push_back(at_most("hessian_null_normal", d, m, null_err, 1e-8));
    out.push_back(at_most("b_hessian_nondegenerate", d, m_out, std::max(nondeg, 0.0), 1e-9));
  }

  if (d.kind() != DomainKind::Corner) {  // reflection is an involution on the exterior strip
    Stream s(seed, 102);
    double err = 0;
    std::uint64_t m = 0;
    for (std::uint64_t i = 0; i < n / 10; ++i) {
      Vec3 x = near_wall(d, s, graph ? 0.9 * strip : 3.0);
      if (d.b(x) >= 0.0) continue;
      ++m;
      err = std::max(err, (d.reflect(d.reflect(x)) - x).norm());
    }
    out.push_back(at_most("reflection_involution", d, m, err, 1e-9));
  }

  if (d.kind() != DomainKind::Corner) {  // projection derivatives against central differences
    Stream s(seed, 103);
    double e1 = 0, e2 = 0;
    const std::uint64_t m = std::max<std::uint64_t>(100, n / 100);
    for (std::uint64_t i = 0; i < m; ++i) {
      Vec3 x = near_wall(d, s, graph ? 0.5 * strip : 1.0);
      BoundaryData bd = d.boundary_data(x);
      Mat3 J = d.projection_jacobian(bd);
      Vec3 tau = unit_vector(s);
      const double h = 1e-4;
      Vec3 fd = (d.boundary_data(x + h * tau).projection - d.boundary_data(x - h * tau).projection) / (2 * h);
      e1 = std::max(e1, (J * tau - fd).norm() / std::max(1.0, fd.norm()));

      // n . d^2 pi [theta, vartheta] = -theta^T (Hb - b Hb^2) vartheta
      Vec3 th = tangent(s, bd.normal), vt = tangent(s, bd.normal);
      const double k = 1e-3;
      auto P = [&](const Vec3& y) { return d.boundary_data(y).projection; };
      Vec3 d2 = (P(x + k * th + k * vt) - P(x + k * th - k * vt) - P(x - k * th + k * vt) + P(x - k * th - k * vt)) /
                (4 * k * k);
      const Mat3& Hb = bd.hessian;
      double an = -th.dot((Hb - bd.b * Hb * Hb) * vt);
      double scale = std::max(std::abs(an), std::max(Hb.norm(), 1e-2));
      e2 = std::max(e2, std::abs(bd.normal.dot(d2) - an) / scale);
    }
    out.push_back(at_most("projection_first_derivative", d, m, e1, 1e-5));
    out.push_back(at_most("projection_second_derivative_normal", d, m, e2, 1e-3));
  }

  // the shipped reference point lies on the corner's edge; use an interior point there
  const Vec3 x0 = d.kind() == DomainKind::Corner ? Vec3(1, 1, 0) : ConvexDomain::reference_point();
  const double dist0 = d.b(x0);
  {  // escape bound for velocities outside the closed cone
    const std::uint64_t m = graph ? std::max<std::uint64_t>(1000, opt.n_escape / 20) : opt.n_escape;
    Stream s(seed, 104);
    std::uint64_t bad = 0, used = 0;
    double worst = 0;
    for (std::uint64_t i = 0; i < m; ++i) {
      Vec3 v = s.uniform(0.1, 3.0) * unit_vector(s);
      if (d.cone_query(v).membership != Membership::Exterior) continue;
      double j = d.gauge(x0, v);
      if (!(j > 0.0) || !std::isfinite(j)) continue;
      double t = (2.0 / j) * (1.0 + 10.0 * s.uniform());
      Vec3 y = graph ? box_point(s, Vec3(-4, -4, 0), Vec3(4, 4, 30)) : box_point(s, Vec3(-20, -20, -20), Vec3(20, 20, 20));
      if (!d.inside(y)) continue;
      ++used;
      Vec3 x = y - t * v;
      double gap = 0.5 * t * j * dist0 - (x - x0).norm();
      if (gap > 1e-12 * (1.0 + (x - x0).norm())) ++bad, worst = std::max(worst, gap);
    }
    out.push_back({"escape_exterior_cone", d.name(), used, worst, 0.0, bad == 0});
  }
  if (!d.cone_empty()) {  // escape bound for cone velocities through the grazing function
    const std::uint64_t m = graph ? std::max<std::uint64_t>(1000, opt.n_escape / 200)
                                  : (d.kind() == DomainKind::Corner ? std::max<std::uint64_t>(1000, opt.n_escape / 20)
                                                                    : opt.n_escape);
    Stream s(seed, 105);
    std::uint64_t bad = 0, used = 0;
    double worst = 0;
    for (std::uint64_t i = 0; i < m; ++i) {
      Vec3 v = s.uniform(0.1, 3.0) * unit_vector(s);
      if (!d.cone_interior(v)) continue;
      double t = s.uniform(0.0, 20.0);
      Vec3 x = box_point(s, Vec3(-30, -30, -30), Vec3(30, 30, 30)) - t * v;
      if (d.inside(x + t * v)) continue;
      ++used;
      double gap = t * d.grazing(x, v) - (x - x0).norm();
      if (gap > 1e-9 * (1.0 + (x - x0).norm())) ++bad, worst = std::max(worst, gap);
    }
    out.push_back({"escape_cone_grazing", d.name(), used, worst, 0.0, bad == 0});
  }
  if (d.kind() == DomainKind::HalfSpace) {  // sharp half-space form |x - x0| >= t v3 + 1
    Stream s(seed, 106);
    std::uint64_t bad = 0, used = 0;
    double worst = 0;
    for (std::uint64_t i = 0; i < opt.n_escape; ++i) {
      Vec3 v(s.normal(), s.normal(), std::abs(s.normal()));
      double t = s.uniform(0, 20);
      Vec3 x(s.uniform(-30, 30), s.uniform(-30, 30), s.uniform(-30, 0) - t * v(2));
      if (d.inside(x + t * v)) continue;
      ++used;
      double gap = t * v(2) + 1.0 - (x - x0).norm();
      if (gap > 1e-12) ++bad, worst = std::max(worst, gap);
    }
    out.push_back({"escape_halfspace_sharp", d.name(), used, worst, 0.0, bad == 0});
  }

  {  // grazing sets scale linearly in alpha; the graph gauge is a root search, so fewer samples there
    const std::uint64_t n_frac = graph ? std::max<std::uint64_t>(20000, opt.n_fraction / 10) : opt.n_fraction;
    std::vector<double> la, lf;
    for (double a : {0.0125, 0.025, 0.05, 0.1}) {
      MonteCarloFraction f = grazing_set_fraction(d, x0, a, Vec3::Zero(), 0.0, n_frac, seed);
      if (f.fraction <= 0.0) continue;
      la.push_back(std::log(a));
      lf.push_back(std::log(f.fraction));
    }
    double slope = la.size() >= 2 ? fit_slope(la, lf, nullptr) : std::nan("");
    out.push_back({"grazing_set_alpha_slope", d.name(), n_frac, slope, 1.0,
                   slope >= 0.8 && slope <= 1.2});
  }
  return out;
}

std::vector<CheckResult> verify_green(const ConvexDomain& d, const std::string& check, std::uint64_t n_samples,
                                      std::uint64_t seed) {
  static const std::vector<std::string> known = {"quantegc", "quanteg0", "halfgreen1", "compgf0",
                                                 "t1hyp",    "corner-log", "ext-flux", "poisson"};
  if (check != "all" && std::find(known.begin(), known.end(), check) == known.end())
    throw Error("unknown green check '" + check + "'");
  auto want = [&](const char* c) { return check == "all" || check == c; };
  const GreenKernel k = GreenKernel::for_domain(d);
  const bool hs = d.kind() == DomainKind::HalfSpace;
  std::vector<CheckResult> out;

  if (want("quantegc") || want("quanteg0")) {
    GreenRatioReport r = green_ratio_suite(k, n_samples, seed);
    if (want("quantegc")) {
      double mx = *std::max_element(r.egc.begin(), r.egc.end());
      out.push_back(at_most("quantegc", d, r.n, mx, 50.0));
    }
    if (want("quanteg0")) out.push_back(at_most("quanteg0", d, r.n, r.eg0, 50.0));
  }
  if (want("halfgreen1") && hs)
    out.push_back(at_most("halfgreen1", d, n_samples, halfspace_vertical_identity(n_samples, seed), 1e-10));
  if (want("compgf0")) {
    std::uint64_t m = std::max<std::uint64_t>(1000, n_samples / 10);
    out.push_back(at_most("compgf0", d, m, double(rescaled_monotonicity_violations(k, m, seed)), 0.0));
  }
  if (want("t1hyp") && hs) {
    double mx = 0;
    for (double b : {1e-3, 1e-2, 1e-1, 1.0})
      mx = std::max(mx, t1hyp_scale_integral(k, Vec3(0, 0, b), 1e-3, 1.0, 25).cwiseAbs().maxCoeff());
    out.push_back(at_most("t1hyp", d, 4, mx, 10.0));
  }
  if (want("corner-log") && d.kind() == DomainKind::Corner) {
    std::vector<double> lc, val;
    for (int e = 2; e <= 7; ++e) {
      double c = std::ldexp(1.0, -e);
      Vec3 x(c / std::sqrt(2.0), c / std::sqrt(2.0), 0.0);
      lc.push_back(std::log(1.0 / c));
      val.push_back(corner_mixed_scale_integral(k, x, 1e-3, 1.0, 25));
    }
    double r2 = 0;
    double slope = fit_slope(lc, val, &r2);
    out.push_back({"corner-log-slope", d.name(), lc.size(), slope, 0.2, slope >= 0.2});
    out.push_back({"corner-log-r2", d.name(), lc.size(), r2, 0.9, r2 > 0.9});
  }
  if (want("ext-flux") && hs) {
    std::vector<double> near, far;
    for (double b : {1e-3, 1e-2, 1e-1})
      for (double L : {1.0, 8.0, 64.0}) {
        FluxResult f = positive_normal_flux(k, Vec3(0, 0, b), L);
        near.push_back(f.l1_near / (b * std::log(L + 1.0)));
        far.push_back(f.linf_far * L * L * L / b);
      }
    auto mx = [](const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); };
    out.push_back(at_most("ext-flux-near", d, near.size(), mx(near), 50.0));
    out.push_back(at_most("ext-flux-far", d, far.size(), mx(far), 50.0));
  }
  if (want("poisson") && hs) {
    double mass_err = 0;
    for (double h : {0.1, 1.0, 10.0}) mass_err = std::max(mass_err, std::abs(poisson_kernel_mass(h) - 1.0));
    out.push_back(at_most("poisson-mass", d, 3, mass_err, 1e-8));
    BoundaryFunction g = BoundaryFunction::inverse_distance(0.5);
    std::vector<double> lr, lf;
    for (double r : {4.0, 8.0, 16.0, 32.0, 64.0}) {
      lr.push_back(std::log(r));
      lf.push_back(std::log(std::abs(poisson_halfspace_extension(g, 0.5, Vec2(1, 0), Vec2(r, 0), 0.0))));
    }
    out.push_back(at_most("poisson-decay-slope", d, lr.size(), fit_slope(lr, lf, nullptr), -0.9));
  }
  return out;
}

std::vector<CheckResult> verify_extension(const Scenario& s, const ExtensionSuiteOptions& opt) {
  const ConvexDomain d = s.domain();
  InitialData data = s.data;
  if (opt.n_markers) data.n_markers = opt.n_markers;
  Ensemble e = sample_initial(data, d, s.seed);
  Softening soft = resolve_softening(s, e);
  double c_star = resolve_c_star(s, e, soft, std::min<std::uint64_t>(opt.n_strip, 20000));
  FieldSolver fsol(GreenKernel::for_domain(d, soft.c0));
  ExtensionMap ext(fsol, ExtensionConfig::for_domain(d, c_star, s.lambda));
  std::vector<CheckResult> out;

  auto src_at = [&](double t) {
    SourceSet src;
    for (std::size_t i = 0; i < e.size(); ++i) {
      Vec3 y = e.x[i] + t * e.v[i];
      if (e.status[i] == MarkerStatus::InDomain && d.b(y) > 0.0) {
        src.y.push_back(y);
        src.q.push_back(e.q[i]);
      }
    }
    return src;
  };

  const double R = s.data.center_x.norm() + s.data.rx + 2.0;
  // fresh samples, independent of the calibration set
  std::vector<StripSample> strip = sample_strip(d, ext.config().delta_star, 3.0, R, opt.n_strip, s.seed + 7919);
  double worst = kInf;
  for (double t : {0.0, 1.0, 10.0, 100.0}) {
    MarginResult m = invariant_domain_margin(ext, src_at(t), t, strip);
    worst = std::min(worst, m.min_margin);
  }
  out.push_back({"invariant_domain_margin", d.name(), opt.n_strip * 4, -worst, 1e-9, worst >= -1e-9});
  out.push_back({"c_star", d.name(), 1, c_star, 0.0, std::isfinite(c_star) && c_star > 0.0});

  {  // psi = phi and F = E on the closed domain
    SourceSet src = src_at(0.0);
    Stream rng(s.seed, 301);
    std::vector<Vec3> xs;
    for (std::uint64_t i = 0; i < opt.n_interior; ++i) {
      Vec3 x = near_wall(d, rng, 3.0);
      if (d.b(x) < 0.0) x = d.reflect(x);
      if (i % 10 == 0) x = d.boundary_data_unchecked(x).projection;
      xs.push_back(x);
    }
    std::vector<ExtendedSample> ex = ext.evaluate(src, 0.0, xs, false);
    std::vector<FieldSample> ph = fsol.evaluate(src, xs, false);
    double err = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      err = std::max({err, std::abs(ex[i].psi - ph[i].phi), (ex[i].F - ph[i].E).norm()});
    out.push_back(at_most("psi_equals_phi", d, xs.size(), err, 1e-12));
  }
  {
    double h = hopf_max(fsol, src_at(0.0), opt.n_wall, R, s.seed + 17);
    out.push_back({"hopf_sign", d.name(), opt.n_wall, h, 0.0, h < 0.0});
  }
  return out;
}

namespace {
const char* flag(bool p) { return p ? "1" : "0"; }
}  // namespace

void write_geometry_report(const std::string& path, std::uint64_t seed, const std::vector<CheckResult>& rows) {
  CsvWriter w(path, "geometry_report", seed, {"check_name", "geometry", "n_samples", "max_violation", "threshold", "pass"});
  for (const CheckResult& r : rows)
    w.row(std::vector<std::string>{r.check, r.geometry, std::to_string(r.n), csv_num(r.value), csv_num(r.threshold),
                                   flag(r.pass)});
}

void write_green_report(const std::string& path, std::uint64_t seed, const std::vector<CheckResult>& rows) {
  CsvWriter w(path, "green_report", seed, {"check", "geometry", "n", "max_ratio_or_fit", "threshold", "pass"});
  for (const CheckResult& r : rows)
    w.row(std::vector<std::string>{r.check, r.geometry, std::to_string(r.n), csv_num(r.value), csv_num(r.threshold),
                                   flag(r.pass)});
}

void write_extension_report(const std::string& path, std::uint64_t seed, const std::vector<CheckResult>& rows) {
  CsvWriter w(path, "extension_report", seed, {"check", "geometry", "n", "value", "threshold", "pass"});
  for (const CheckResult& r : rows)
    w.row(std::vector<std::string>{r.check, r.geometry, std::to_string(r.n), csv_num(r.value), csv_num(r.threshold),
                                   flag(r.pass)});
}

}  // namespace vpw
