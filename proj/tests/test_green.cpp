#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "vpw/errors.hpp"
#include "vpw/green.hpp"
#include "vpw/green_functionals.hpp"
#include "vpw/quadrature.hpp"
#include "vpw/rng.hpp"
#include "vpw/window.hpp"

using namespace vpw;

namespace {

Vec3 fd_grad_x(const GreenKernel& k, const Vec3& x, const Vec3& y, double h) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e(i) = h;
    g(i) = (k.value(x + e, y) - k.value(x - e, y)) / (2 * h);
  }
  return g;
}

double laplacian_y(const std::function<double(const Vec3&)>& f, const Vec3& y, double h) {
  double acc = -6.0 * f(y);
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e(i) = h;
    acc += f(y + e) + f(y - e);
  }
  return acc / (h * h);
}

}  // namespace

TEST_CASE("image formulas") {
  GreenKernel hs(ConvexDomain::half_space(), GreenMode::ExactImages);
  CHECK(hs.value(Vec3(0, 0, 1), Vec3(0, 0, 2)) == doctest::Approx(-1.0 / (6.0 * kPi)).epsilon(1e-14));
  CHECK(hs.value(Vec3(0, 0, 1), Vec3(5, 0, 0)) == 0.0);

  GreenKernel c(ConvexDomain::corner(), GreenMode::ExactImages);
  // hand-evaluated four-image sum
  double oracle = -(1.0 / (4.0 * kPi)) * (1.0 / std::sqrt(2.0) - 2.0 / std::sqrt(10.0) + 1.0 / (3.0 * std::sqrt(2.0)));
  CHECK(oracle == doctest::Approx(-0.024699).epsilon(1e-4));
  CHECK(c.value(Vec3(1, 1, 0), Vec3(2, 2, 0)) == doctest::Approx(oracle).epsilon(1e-14));

  CHECK_THROWS_AS(hs.value(Vec3(0, 0, 1), Vec3(0, 0, 1)), SingularEvaluation);
  CHECK_THROWS_AS(GreenKernel(ConvexDomain::hyperboloid(), GreenMode::ExactImages), NoClosedForm);
}

TEST_CASE("sign, symmetry and boundary vanishing") {
  Stream s(1, 1);
  for (auto d : {ConvexDomain::half_space(), ConvexDomain::corner()}) {
    GreenKernel k(d, GreenMode::ExactImages);
    for (int i = 0; i < 2000; ++i) {
      Vec3 x(s.uniform(0, 3), s.uniform(0, 3), s.uniform(0, 3)), y(s.uniform(0, 3), s.uniform(0, 3), s.uniform(0, 3));
      if (!d.inside(x) || !d.inside(y)) continue;
      double g = k.value(x, y);
      CHECK(g <= 0.0);
      CHECK(std::abs(g - k.value(y, x)) <= 1e-12 * std::abs(g));
    }
    Vec3 x = d.kind() == DomainKind::Corner ? Vec3(1, 1, 0) : Vec3(0, 0, 1);
    Vec3 y = d.kind() == DomainKind::Corner ? Vec3(1e-7, 1, 0.5) : Vec3(0.5, 0.5, 1e-7);
    CHECK(std::abs(k.value(x, y)) < 1e-6);
  }
}

TEST_CASE("derivatives against finite differences") {
  Stream s(2, 2);
  std::vector<GreenKernel> ks{GreenKernel(ConvexDomain::half_space(), GreenMode::ExactImages),
                              GreenKernel(ConvexDomain::corner(), GreenMode::ExactImages),
                              GreenKernel::for_domain(ConvexDomain::hyperboloid()),
                              GreenKernel::free_space(0.1)};
  for (const auto& k : ks) {
    for (int i = 0; i < 100; ++i) {
      Vec3 x(s.uniform(0.2, 1.5), s.uniform(0.2, 1.5), s.uniform(0.2, 1.5));
      Vec3 y(s.uniform(0.2, 1.5), s.uniform(0.2, 1.5), s.uniform(2.5, 3.0));
      if (k.mode() != GreenMode::FreeSpace && (!k.domain().inside(x) || k.domain().b(x) > 0.5 * k.domain().strip_width()))
        continue;
      Vec3 g = k.grad_x(x, y);
      CHECK((g - fd_grad_x(k, x, y, 1e-5)).norm() <= 1e-6 * g.norm() + 1e-12);
      Mat3 H = k.hess_x(x, y), Hfd;
      const double h = 1e-5;
      for (int j = 0; j < 3; ++j) {
        Vec3 e = Vec3::Zero();
        e(j) = h;
        Hfd.col(j) = (k.grad_x(x + e, y) - k.grad_x(x - e, y)) / (2 * h);
      }
      CHECK((H - Hfd).norm() <= 1e-5 * H.norm() + 1e-10);
      Mat3 Hxy = k.hess_xy(x, y), Hxyfd;
      for (int j = 0; j < 3; ++j) {
        Vec3 e = Vec3::Zero();
        e(j) = h;
        Hxyfd.col(j) = (k.grad_x(x, y + e) - k.grad_x(x, y - e)) / (2 * h);
      }
      CHECK((Hxy - Hxyfd).norm() <= 1e-5 * Hxy.norm() + 1e-10);
      Vec3 gy = k.grad_y(x, y), gyfd;
      for (int j = 0; j < 3; ++j) {
        Vec3 e = Vec3::Zero();
        e(j) = h;
        gyfd(j) = (k.value(x, y + e) - k.value(x, y - e)) / (2 * h);
      }
      CHECK((gy - gyfd).norm() <= 1e-6 * gy.norm() + 1e-12);
    }
  }
}

TEST_CASE("harmonic in y") {
  for (auto d : {ConvexDomain::half_space(), ConvexDomain::corner()}) {
    GreenKernel k(d, GreenMode::ExactImages);
    Vec3 x(1, 1, 1);
    for (Vec3 y : {Vec3(2, 1.5, 1.8), Vec3(1.5, 2, 0.5), Vec3(0.7, 2.1, 1.9)}) {
      double lap = laplacian_y([&](const Vec3& p) { return k.value(x, p); }, y, 1e-3);
      CHECK(std::abs(lap) < 1e-4);
    }
  }
}

TEST_CASE("vertical identity in the half-space") {
  GreenKernel hs(ConvexDomain::half_space(), GreenMode::ExactImages);
  Vec3 x(0.2, -0.1, 0.7), y(1.1, 0.4, 2.3);
  double sum = hs.hess_x(x, y)(2, 2) + hs.hess_y(x, y)(2, 2);
  double diff = hs.hess_x(x, y)(2, 2) - hs.hess_y(x, y)(2, 2);
  CHECK(std::abs(diff) < 1e-14);
  CHECK(std::abs(sum) > 1e-3);
  CHECK(halfspace_vertical_identity(20000, 7) < 1e-10);
}

TEST_CASE("rescaled kernels") {
  GreenKernel hs(ConvexDomain::half_space(), GreenMode::ExactImages);
  Vec3 x(0.3, 0.2, 0.5), y(-0.4, 1.0, 2.0);
  for (double t : {0.5, 1.0, 3.0, 100.0})
    CHECK(std::abs(hs.rescaled(t, x, y) - hs.value(x, y)) < 1e-12 * std::abs(hs.value(x, y)));
  GreenKernel gw = GreenKernel::for_domain(ConvexDomain::hyperboloid());
  CHECK(gw.rescaled(1.0, x, y) == gw.value(x, y));
  Vec3 a(0.1, 0.2, 1.0), b(0.3, -0.1, 1.5);
  double prev = gw.rescaled(1.0, a, b);
  for (double t : {2.0, 4.0, 8.0}) {
    double cur = gw.rescaled(t, a, b);
    CHECK(prev <= cur + 1e-6 * std::abs(prev));
    prev = cur;
  }
  CHECK(prev <= 0.0);
  CHECK(rescaled_monotonicity_violations(gw, 5000, 3) == 0);
  CHECK(rescaled_monotonicity_violations(hs, 2000, 3) == 0);
}

TEST_CASE("cone kernel") {
  GreenKernel hs(ConvexDomain::half_space(), GreenMode::ExactImages);
  CHECK(hs.cone_value(Vec3(0, 0, 1), Vec3(0, 0, 2)) == doctest::Approx(-1.0 / (6.0 * kPi)));
  GreenKernel c(ConvexDomain::corner(), GreenMode::ExactImages);
  Vec3 a(1, 2, 0.3), w(2, 0.5, -1);
  CHECK(c.cone_value(a, w) == doctest::Approx(c.cone_value(w, a)).epsilon(1e-13));
  CHECK(std::abs(c.cone_value(a, Vec3(0, 3, 1))) < 1e-15);
  CHECK_THROWS_AS(GreenKernel::for_domain(ConvexDomain::hyperboloid()).cone_value(a, w), NoClosedForm);
}

TEST_CASE("majorant") {
  GreenKernel hs(ConvexDomain::half_space(), GreenMode::ExactImages);
  CHECK(hs.majorant(Vec3(0, 0, 1), Vec3(0, 0, 1)) == doctest::Approx(0.75).epsilon(1e-14));
  Stream s(4, 4);
  for (const auto& k : {hs, GreenKernel::for_domain(ConvexDomain::hyperboloid())}) {
    for (int i = 0; i < 20000; ++i) {
      Vec3 x(s.uniform(-1, 1), s.uniform(-1, 1), s.uniform(0, 1));
      if (!k.domain().inside(x) || k.domain().b(x) > 0.5 * k.domain().strip_width()) continue;
      Vec3 y(s.uniform(-3, 3), s.uniform(-3, 3), s.uniform(0, 3));
      if (!k.domain().inside(y)) continue;
      CHECK(k.majorant(x, y) >= 0.0);
    }
  }
  Vec3 x(0.2, 0.1, 0.3);
  double lap = laplacian_y([&](const Vec3& p) { return hs.majorant(x, p); }, Vec3(1.0, 0.5, 0.8), 1e-3);
  CHECK(std::abs(lap) < 1e-4);
  CHECK_THROWS_AS(hs.majorant(Vec3(0, 0, 20), Vec3(0, 0, 1)), OutsideStrip);
}

TEST_CASE("windows") {
  const ScaleWindow& w = ScaleWindow::instance();
  for (double e = -30; e <= 30; e += 0.37) {
    double x = std::exp2(e), sum = 0.0;
    for (int k = -40; k <= 40; ++k) sum += w.dyadic(std::ldexp(x, -k));
    CHECK(std::abs(sum - 1.0) < 1e-10);
  }
  // int phi ds/s by composite Gauss-Legendre in ln s, fine panels
  const GaussRule& g = gauss_legendre(20);
  double acc = 0.0;
  const double lo = std::log(0.25), hi = std::log(4.0);
  const int panels = 64;
  for (int p = 0; p < panels; ++p) {
    double a = lo + (hi - lo) * p / panels, b = lo + (hi - lo) * (p + 1) / panels;
    for (int i = 0; i < 20; ++i) acc += 0.5 * (b - a) * g.w[i] * w.scale(std::exp(0.5 * (a + b) + 0.5 * (b - a) * g.x[i]));
  }
  CHECK(std::abs(acc - 1.0) < 1e-10);
  CHECK(w.raw(0.25) == 0.0);
  CHECK(w.raw(4.0) == 0.0);
  CHECK(Cutoff::chi_gt(1.0) == 0.0);
  CHECK(Cutoff::chi_gt(2.0) == 1.0);
  double prev = 0.0;
  for (double x = 0.5; x <= 2.5; x += 0.01) {
    CHECK(Cutoff::chi_gt(x) >= prev);
    prev = Cutoff::chi_gt(x);
  }
}

TEST_CASE("poisson kernel") {
  CHECK(poisson_kernel(1.0, Vec2::Zero()) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));
  for (double h : {0.1, 1.0, 10.0}) CHECK(std::abs(poisson_kernel_mass(h) - 1.0) < 1e-8);
  BoundaryFunction g = BoundaryFunction::inverse_distance(0.5);
  Vec2 tau(1.0, 0.0);
  std::vector<double> lr, lf;
  for (double r : {4.0, 8.0, 16.0, 32.0, 64.0}) {
    double f = poisson_halfspace_extension(g, 0.5, tau, Vec2(r, 0.0), 0.0);
    lr.push_back(std::log(r));
    lf.push_back(std::log(std::abs(f)));
  }
  double slope = (lf.back() - lf.front()) / (lr.back() - lr.front());
  CHECK(slope <= -0.9);
}

TEST_CASE("t1hyp half-space entries") {
  GreenKernel hs(ConvexDomain::half_space(), GreenMode::ExactImages);
  Mat3 m = t1hyp_scale_integral(hs, Vec3(0, 0, 0.1), 1e-3, 1.0, 25);
  CHECK(std::abs(m(0, 2)) < 1e-6);
  CHECK(std::abs(m(1, 2)) < 1e-6);
  CHECK(m.cwiseAbs().maxCoeff() <= 10.0);
}

TEST_CASE("positive normal flux, half-space") {
  GreenKernel hs(ConvexDomain::half_space(), GreenMode::ExactImages);
  std::vector<double> ratio;
  for (double b : {1e-3, 1e-2, 1e-1}) {
    FluxResult f = positive_normal_flux(hs, Vec3(0, 0, b), 8.0);
    ratio.push_back(f.l1_near / b);
  }
  double mx = *std::max_element(ratio.begin(), ratio.end());
  double mn = *std::min_element(ratio.begin(), ratio.end());
  CHECK(mx / mn < 3.0);
  double a = positive_normal_flux(hs, Vec3(0, 0, 0.1), 8.0).l1_near;
  double b = positive_normal_flux(hs, Vec3(0, 0, 0.1), 16.0).l1_near;
  CHECK(b / a < 1.5);
}
