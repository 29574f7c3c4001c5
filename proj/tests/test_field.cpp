#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <omp.h>

#include <cmath>

#include "vpw/errors.hpp"
#include "vpw/field.hpp"
#include "vpw/rng.hpp"

using namespace vpw;

namespace {

SourceSet random_sources(const ConvexDomain& d, int n, std::uint64_t seed) {
  SourceSet s;
  Stream rng(seed, 1);
  while (static_cast<int>(s.size()) < n) {
    Vec3 y(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.05, 3));
    if (!d.inside(y)) continue;
    s.y.push_back(y);
    s.q.push_back(rng.uniform(0.1, 1.0));
  }
  return s;
}

std::vector<Vec3> random_targets(const ConvexDomain& d, int n, std::uint64_t seed) {
  std::vector<Vec3> t;
  Stream rng(seed, 2);
  while (static_cast<int>(t.size()) < n) {
    Vec3 x(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0.02, 4));
    if (d.inside(x)) t.push_back(x);
  }
  return t;
}

}  // namespace

TEST_CASE("blocked sum agrees with the pairwise reference") {
  for (const char* name : {"halfspace", "corner", "hyperboloid"}) {
    ConvexDomain d = ConvexDomain::from_name(name);
    FieldSolver fs(GreenKernel::for_domain(d, 0.01));
    SourceSet src = random_sources(d, 150, 3);
    std::vector<Vec3> tg = random_targets(d, 40, 4);
    auto a = fs.evaluate(src, tg, true);
    auto b = fs.evaluate_reference(src, tg, true);
    for (std::size_t i = 0; i < tg.size(); ++i) {
      double s = std::abs(b[i].phi) + 1e-300;
      CHECK(std::abs(a[i].phi - b[i].phi) <= 1e-12 * s);
      CHECK((a[i].E - b[i].E).norm() <= 1e-12 * (b[i].E.norm() + 1e-300) + 1e-15);
      CHECK((a[i].gradE - b[i].gradE).norm() <= 1e-11 * (b[i].gradE.norm() + 1e-300) + 1e-14);
    }
  }
}

TEST_CASE("result is bitwise independent of the thread count") {
  ConvexDomain d = ConvexDomain::corner();
  FieldSolver fs(GreenKernel::for_domain(d, 0.02));
  SourceSet src = random_sources(d, 500, 5);
  std::vector<Vec3> tg = random_targets(d, 64, 6);
  omp_set_num_threads(1);
  auto a = fs.evaluate(src, tg, true);
  omp_set_num_threads(4);
  auto b = fs.evaluate(src, tg, true);
  for (std::size_t i = 0; i < tg.size(); ++i) {
    CHECK(a[i].phi == b[i].phi);
    CHECK(a[i].E == b[i].E);
    CHECK(a[i].gradE == b[i].gradE);
  }
}

TEST_CASE("potential vanishes on the wall and E is its gradient") {
  ConvexDomain d = ConvexDomain::half_space();
  FieldSolver fs(GreenKernel::for_domain(d));
  SourceSet src = random_sources(d, 50, 7);
  CHECK(std::abs(fs.at(src, Vec3(0.3, -0.2, 0.0), false).phi) < 1e-15);
  Vec3 x(0.4, 0.1, 1.3);
  FieldSample f = fs.at(src, x, true);
  const double h = 1e-5;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e(i) = h;
    double dphi = (fs.at(src, x + e, false).phi - fs.at(src, x - e, false).phi) / (2 * h);
    CHECK(dphi == doctest::Approx(f.E(i)).epsilon(1e-6));
    Vec3 dE = (fs.at(src, x + e, false).E - fs.at(src, x - e, false).E) / (2 * h);
    CHECK((dE - f.gradE.col(i)).norm() < 1e-6 * f.gradE.norm());
  }
}

TEST_CASE("scale components reassemble the field") {
  ConvexDomain d = ConvexDomain::half_space();
  GreenKernel k = GreenKernel::for_domain(d);
  FieldSolver fs(k);
  SourceSet src = random_sources(d, 30, 8);
  Vec3 x(0.5, 0.5, 1.0);
  Vec3 E = fs.at(src, x, false).E;
  Vec3 R = reconstruct_E(k, src, x, 32);
  CHECK((R - E).norm() < 1e-6 * E.norm());
}

TEST_CASE("cone field is the long-time limit of the rescaled field") {
  ConvexDomain d = ConvexDomain::half_space();
  GreenKernel k = GreenKernel::for_domain(d);
  SourceSet w = random_sources(d, 20, 9);
  std::vector<Vec3> a = {Vec3(0.2, 0.1, 0.7), Vec3(-1.0, 0.3, 1.5)};
  std::vector<Vec3> Einf = cone_field(k, w, a);
  SourceSet y = w;
  const double t = 1e4;
  for (std::size_t i = 0; i < y.size(); ++i) y.y[i] = Vec3(0.1, -0.2, 0.3) + t * w.y[i];
  FieldSolver fs(k);
  for (std::size_t i = 0; i < a.size(); ++i) {
    Vec3 e = t * t * fs.at(y, t * a[i], false).E;
    CHECK((e - Einf[i]).norm() < 1e-3 * Einf[i].norm());
    EffectiveField ef = effective_field(k, w, 1.0, a[i], 32);
    CHECK((ef.E0 - Einf[i]).norm() < 1e-6 * Einf[i].norm());
  }
}

TEST_CASE("E_inf tracker") {
  ConvexDomain d = ConvexDomain::corner();
  Vec3 lo(0.125, 0.125, -1.0), hi(1.5, 1.5, 1.0);
  std::vector<Vec3> g = a_grid(d, lo, hi, 0.125);
  REQUIRE(!g.empty());
  for (const Vec3& a : g) CHECK(d.cone_interior(a));
  EinfTracker tr(g, lo, hi, 0.125);
  auto field = [&](double s) {
    std::vector<Vec3> e;
    for (const Vec3& a : g) e.push_back(Vec3(a(0), 2 * a(1), -a(2)) * (1 + s));
    return e;
  };
  tr.add(1.5, field(0.4));
  tr.add(3.0, field(0.2));
  tr.add(6.0, field(0.1));
  tr.add(12.0, field(0.05));
  auto r = tr.residuals();
  REQUIRE(r.size() == 3);
  CHECK(r[0] > r[1]);
  CHECK(r[1] > r[2]);
  CHECK(tr.converged());
  // linear data is reproduced exactly by trilinear interpolation
  Vec3 w(0.61, 0.37, 0.2);
  CHECK((tr.interpolate(d, w) - 1.05 * Vec3(w(0), 2 * w(1), -w(2))).norm() < 1e-12);
  EinfTracker empty;
  CHECK_THROWS_AS(empty.interpolate(d, w), MissingEinf);
}

TEST_CASE("probe grid lies in the domain") {
  ConvexDomain d = ConvexDomain::corner();
  auto p = fixed_probe_grid(d, 1.0, 64.0, 2.0, 50);
  CHECK(!p.empty());
  for (const Vec3& x : p) CHECK(d.inside(x));
}
