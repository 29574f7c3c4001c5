#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "vpw/asymptotics.hpp"
#include "vpw/errors.hpp"

using namespace vpw;

TEST_CASE("rate fit") {
  std::vector<double> t, a, b, c;
  for (int k = 0; k < 40; ++k) {
    double s = 10.0 * std::pow(20.0, k / 39.0);
    t.push_back(s);
    a.push_back(3.0 / (s * s));
    b.push_back(std::log(s) / (s * s));
    c.push_back(0.7);
  }
  RateFit fa = rate_fit(t, a);
  CHECK(std::abs(fa.slope + 2.0) < 1e-12);
  CHECK(fa.r2 == doctest::Approx(1.0));
  RateFit fb = rate_fit(t, b, 10, 200);
  CHECK(fb.slope > -2.0);
  CHECK(fb.slope < -1.6);
  CHECK(std::abs(rate_fit(t, c).slope) < 1e-14);
  CHECK_THROWS_AS(rate_fit({1, 2, 3}, {1, 1, 1}), InsufficientData);
  CHECK_THROWS_AS(rate_fit({1, 2, 3, 4, 5}, {1, 1, 0, 1, 1}), NonPositiveValue);
}

namespace {

Ensemble ballistic(std::vector<Vec3> x0, std::vector<Vec3> v, double t) {
  Ensemble e;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    e.x.push_back(x0[i] + t * v[i]);
    e.v.push_back(v[i]);
    e.q.push_back(1.0);
    e.mu0.push_back(1.0);
    e.status.push_back(MarkerStatus::InDomain);
  }
  return e;
}

EinfTracker constant_tracker(const ConvexDomain& d, const Vec3& E) {
  Vec3 lo(-1.5, -1.5, 0.125), hi(1.5, 1.5, 2.0);
  auto g = a_grid(d, lo, hi, 0.125);
  EinfTracker tr(g, lo, hi, 0.125);
  tr.add(1.0, std::vector<Vec3>(g.size(), E));
  return tr;
}

}  // namespace

TEST_CASE("scatter profile") {
  ConvexDomain hs = ConvexDomain::half_space();
  std::vector<Vec3> x0 = {Vec3(0.1, 0.2, 1.0), Vec3(-0.3, 0.0, 2.0)};
  std::vector<Vec3> v = {Vec3(0.1, 0.0, 0.8), Vec3(0.0, 0.2, 1.1)};
  EinfTracker tr = constant_tracker(hs, Vec3(0.01, -0.02, 0.03));

  ScatterProfile p0 = scatter_profile(ballistic(x0, v, 10.0), hs, 10.0, 0.0, &tr);
  for (std::size_t k = 0; k < p0.z.size(); ++k) CHECK(p0.z_shifted[k] == p0.z[k]);
  ScatterProfile pn = scatter_profile(ballistic(x0, v, 10.0), hs, 10.0, -1.0, nullptr);
  for (std::size_t k = 0; k < pn.z.size(); ++k) CHECK(pn.z_shifted[k] == pn.z[k]);

  ScatterProfile p1 = scatter_profile(ballistic(x0, v, 10.0), hs, 10.0, -1.0, &tr);
  ScatterProfile p2 = scatter_profile(ballistic(x0, v, 20.0), hs, 20.0, -1.0, &tr);
  CHECK(p1.good_fraction() == 1.0);
  CHECK(scattering_drift(p1, p2, false) < 1e-12);
  CHECK(scattering_drift(p1, p2, true) ==
        doctest::Approx(std::log(2.0) * Vec3(0.01, -0.02, 0.03).norm()).epsilon(1e-12));

  // grazing velocities are outside the good set
  ScatterProfile g = scatter_profile(ballistic({Vec3(0, 0, 1)}, {Vec3(1, 0, 1e-3)}, 16.0), hs, 16.0, -1.0, &tr);
  CHECK(g.good[0] == 0);
  CHECK_THROWS_AS(scattering_drift(g, g, true), EmptyGoodSet);
}

TEST_CASE("E_inf self-consistency") {
  ConvexDomain hs = ConvexDomain::half_space();
  GreenKernel cone = GreenKernel::for_domain(hs);
  Vec3 lo(-1.5, -1.5, 0.125), hi(1.5, 1.5, 2.0);
  auto grid = a_grid(hs, lo, hi, 0.25);
  ScatterProfile empty;
  SelfConsistency s0 = einf_selfconsistency(empty, cone, grid, std::vector<Vec3>(grid.size(), Vec3::Zero()));
  CHECK(s0.rel_sup_error == 0.0);

  // free flow: t^2 E(ta, t) approaches the cone field of the velocities
  std::vector<Vec3> x0 = {Vec3(0.1, 0.2, 1.0), Vec3(-0.3, 0.0, 2.0), Vec3(0.2, -0.1, 1.5)};
  std::vector<Vec3> v = {Vec3(0.1, 0.0, 0.8), Vec3(0.0, 0.2, 1.1), Vec3(-0.2, 0.1, 0.5)};
  const double t = 2e4;
  Ensemble e = ballistic(x0, v, t);
  FieldSolver fs(cone);
  SourceSet src = e.sources(hs);
  std::vector<Vec3> lhs;
  for (const Vec3& a : grid) lhs.push_back(t * t * fs.at(src, t * a, false).E);
  ScatterProfile p = scatter_profile(e, hs, t, 0.0, nullptr);
  SelfConsistency s = einf_selfconsistency(p, cone, grid, lhs);
  CHECK(s.rel_sup_error < 0.02);
}
