#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "vpw/extension.hpp"
#include "vpw/window.hpp"

using namespace vpw;

namespace {

SourceSet cloud(const ConvexDomain& d, int n, std::uint64_t seed) {
  SourceSet s;
  Stream rng(seed, 3);
  while (static_cast<int>(s.size()) < n) {
    Vec3 y(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(1, 3));
    if (d.kind() == DomainKind::Corner) y += Vec3(2.5, 2.5, -2.0);
    if (!d.inside(y)) continue;
    s.y.push_back(y);
    s.q.push_back(rng.uniform(0.5, 1.0));
  }
  return s;
}

ExtensionMap make(const ConvexDomain& d, double c_star = 1.0, double lambda = -1.0, double soft = 0.0) {
  return ExtensionMap(FieldSolver(GreenKernel::for_domain(d, soft)), ExtensionConfig::for_domain(d, c_star, lambda));
}

}  // namespace

TEST_CASE("V_* profile") {
  CHECK(vstar(0.5) == 0.0);
  CHECK(vstar_d1(0.5) == 0.0);
  // antiderivative of s/(1+s^4) from 0 to -1
  CHECK(vstar(-1.0) == doctest::Approx(kPi / 8).epsilon(1e-14));
  CHECK(vstar_d1(-1.0) == doctest::Approx(-0.5));
  for (double a : {-2.0, -0.7, -0.1}) {
    double h = 1e-6;
    CHECK((vstar(a + h) - vstar(a - h)) / (2 * h) == doctest::Approx(vstar_d1(a)).epsilon(1e-8));
    CHECK((vstar_d1(a + h) - vstar_d1(a - h)) / (2 * h) == doctest::Approx(vstar_d2(a)).epsilon(1e-6));
  }
  CHECK(std::abs(vstar(-1e-8)) < 1e-15);
}

TEST_CASE("extension depth") {
  auto c = ExtensionConfig::for_domain(ConvexDomain::half_space());
  CHECK(c.delta_ext == 1.0);
  CHECK(c.delta_star == 3.0);
  CHECK(Cutoff::chi_gt(c.delta_star) == 1.0);
  auto g = ExtensionConfig::for_domain(ConvexDomain::hyperboloid());
  CHECK(g.delta_ext <= 1.0);
  CHECK(g.delta_star >= 2.0);
}

TEST_CASE("extended Green function") {
  ConvexDomain hs = ConvexDomain::half_space();
  ExtensionMap e = make(hs);
  CHECK(e.extended_green(Vec3(0, 0, -1), Vec3(0, 0, 2)) == doctest::Approx(1.0 / (6.0 * kPi)).epsilon(1e-14));
  Vec3 y(0.3, -0.1, 0.8);
  CHECK(std::abs(e.extended_green(Vec3(0.2, 0.1, 1e-7), y)) < 1e-6);
  CHECK(std::abs(e.extended_green(Vec3(0.2, 0.1, -1e-7), y)) < 1e-6);

  for (const char* name : {"halfspace", "hyperboloid"}) {
    ConvexDomain d = ConvexDomain::from_name(name);
    ExtensionMap m = make(d);
    Stream rng(5, 1);
    for (int k = 0; k < 30; ++k) {
      WallPoint w = sample_wall_point(d, rng, 1.0);
      Vec3 x = w.p - rng.uniform(0.05, 0.5) * w.n;
      Vec3 yy = w.p + rng.uniform(0.3, 1.5) * w.n + Vec3(rng.uniform(-.3, .3), rng.uniform(-.3, .3), 0);
      if (!d.inside(yy)) continue;
      Vec3 g;
      const double h = 1e-6;
      for (int i = 0; i < 3; ++i) {
        Vec3 ei = Vec3::Zero();
        ei(i) = h;
        g(i) = (m.extended_green(x + ei, yy) - m.extended_green(x - ei, yy)) / (2 * h);
      }
      CHECK((g - m.extended_green_grad(x, yy)).norm() < 1e-6 * g.norm());
      Vec3 rho = d.reflection(x).rho;
      Vec3 nb = d.boundary_data_unchecked(x).normal;
      Vec3 nr = d.boundary_data_unchecked(rho).normal;
      double lhs = nb.dot(g);
      double rhs = nr.dot(GreenKernel::for_domain(d).grad_x(rho, yy));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
  }
}

TEST_CASE("extended potential") {
  ConvexDomain hs = ConvexDomain::half_space();
  ExtensionMap e = make(hs, 2.0);
  SourceSet one;
  one.y = {Vec3(0, 0, 1)};
  one.q = {1.0};
  const double t = 3.0;
  Vec3 x(0, 0, -0.5);
  ExtendedSample s = e.evaluate(one, t, x, false);
  CHECK(s.psi == doctest::Approx(e.extended_green(x, one.y[0]) + a1(2.0, t) * vstar(-0.5)).epsilon(1e-14));

  SourceSet src = cloud(hs, 40, 1);
  FieldSolver fs(GreenKernel::for_domain(hs));
  for (Vec3 xin : {Vec3(0.3, 0.2, 0.4), Vec3(-1, 2, 0.0), Vec3(1, 1, 5)}) {
    ExtendedSample a = e.evaluate(src, t, xin, true);
    FieldSample b = fs.at(src, xin, true);
    CHECK(std::abs(a.psi - b.phi) <= 1e-12 * std::abs(b.phi) + 1e-300);
    CHECK((a.F - b.E).norm() <= 1e-12 * b.E.norm());
  }

  SourceSet none;
  for (double bx : {-0.1, -1.0, -2.5, -6.0}) {
    ExtendedSample z = e.evaluate(none, t, Vec3(0.4, 0.1, bx), true);
    CHECK(z.F(2) == a1(2.0, t) * vstar_d1(bx));
    CHECK(z.F(0) == 0.0);
    CHECK(e.margin(none, t, Vec3(0.4, 0.1, bx), Vec3(1, 2, 3)) ==
          doctest::Approx(a1(2.0, t) * std::abs(bx) / (1 + std::pow(bx, 4))).epsilon(1e-14));
  }
}

TEST_CASE("F and H are derivatives of psi outside the domain") {
  for (const char* name : {"halfspace", "corner", "hyperboloid"}) {
    ConvexDomain d = ConvexDomain::from_name(name);
    ExtensionMap e = make(d, 1e-3, -1.0, 0.1);
    SourceSet src = cloud(d, 30, 2);
    double depth = e.config().delta_ext + 1.0;
    auto samples = sample_strip(d, depth, 1.0, 1.0, 60, 9);
    int checked = 0;
    for (const auto& smp : samples) {
      double bx = d.b(smp.x);
      double sx = bx + e.config().delta_star;
      // stay off the kinks at the wall and at the cutoff edges
      // past the strip the reflected point can sit on the focal set of a curved wall
      if (d.kind() == DomainKind::Graph && bx < -d.strip_width()) continue;
      if (bx > -0.02 || std::abs(sx - 1.0) < 0.02 || std::abs(sx - 2.0) < 0.02) continue;
      if (d.kind() == DomainKind::Corner && smp.x(0) < 0.01 && smp.x(1) < 0.01 &&
          (std::abs(smp.x(0)) < 0.02 || std::abs(smp.x(1)) < 0.02))
        continue;
      INFO(std::string(name), " x=", smp.x.transpose(), " b=", bx);
      ExtendedSample s = e.evaluate(src, 2.0, smp.x, true);
      const double h = 1e-5;
      for (int i = 0; i < 3; ++i) {
        Vec3 ei = Vec3::Zero();
        ei(i) = h;
        ExtendedSample p = e.evaluate(src, 2.0, smp.x + ei, false);
        ExtendedSample m = e.evaluate(src, 2.0, smp.x - ei, false);
        CHECK((p.psi - m.psi) / (2 * h) == doctest::Approx(s.F(i)).epsilon(1e-5).scale(1e-6));
        CHECK(((p.F - m.F) / (2 * h) - s.H.col(i)).norm() < 2e-4 * (s.H.norm() + 1e-4));
      }
      ++checked;
    }
    CHECK(checked > 12);
  }
}

TEST_CASE("Hopf sign and margin calibration") {
  for (const char* name : {"halfspace", "corner"}) {
    ConvexDomain d = ConvexDomain::from_name(name);
    FieldSolver fs(GreenKernel::for_domain(d));
    SourceSet src = cloud(d, 50, 4);
    CHECK(hopf_max(fs, src, 1000, 3.0, 1) < 0.0);

    ExtensionMap e = make(d, 1.0);
    auto samples = sample_strip(d, e.config().delta_star, 3.0, 3.0, 2000, 2);
    double c = calibrate_c_star(e, [&](double) { return src; }, {0.0, 1.0, 10.0}, samples);
    CHECK(c >= 1.0);
    for (double t : {0.0, 1.0, 10.0}) CHECK(invariant_domain_margin(e, src, t, samples).min_margin >= -1e-9);

    ExtensionMap zero = make(d, 1.0, 0.0);
    CHECK(invariant_domain_margin(zero, src, 1.0, samples).min_margin >= -1e-12);
  }
}
