#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <omp.h>

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdio>

#include "vpw/errors.hpp"
#include "vpw/propagator.hpp"

using namespace vpw;

namespace {

Ensemble make_ensemble(std::vector<Vec3> x, std::vector<Vec3> v, std::vector<double> q) {
  Ensemble e;
  e.x = x;
  e.v = v;
  e.q = q;
  e.mu0.assign(x.size(), 1.0);
  e.status.assign(x.size(), MarkerStatus::InDomain);
  return e;
}

Ensemble small_cloud(int n, std::uint64_t seed, double eps = 0.05, const Vec3& vc = InitialData{}.center_v) {
  InitialData d;
  d.n_markers = n;
  d.epsilon = eps;
  d.center_v = vc;
  return sample_initial(d, ConvexDomain::half_space(), seed);
}

Propagator make_prop(const Ensemble& e, RunConfig cfg, double lambda = -1.0, double soft = 0.1,
                     const ConvexDomain& d = ConvexDomain::half_space()) {
  Propagator p(GreenKernel::for_domain(d), ExtensionConfig::for_domain(d, 1.0, lambda), Softening::constant(soft),
               cfg);
  p.init(e);
  return p;
}

}  // namespace

TEST_CASE("free streaming is exact") {
  Ensemble e = small_cloud(300, 1);
  RunConfig cfg;
  cfg.t_end = 100;
  Propagator p = make_prop(e, cfg, 0.0);
  p.advance_to(100.0);
  CHECK(p.t() == 100.0);
  double err = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) err = std::max(err, (p.ensemble().x[i] - (e.x[i] + 100.0 * e.v[i])).norm());
  CHECK(err < 1e-10);
}

TEST_CASE("ballistic absorption time") {
  Ensemble e = make_ensemble({Vec3(0, 0, 1)}, {Vec3(0, 0, -1)}, {1.0});
  RunConfig cfg;
  cfg.mode = BoundaryMode::Absorbing;
  Propagator p = make_prop(e, cfg, 0.0);
  p.advance_to(2.0);
  CHECK(p.ensemble().status[0] == MarkerStatus::Absorbed);
  CHECK(std::abs(p.ensemble().t_exit[0] - 1.0) < 1e-9);
  CHECK(std::abs(p.ensemble().x[0](2)) < 1e-9);
  CHECK(p.counters().max_exit_vn <= 1e-6);
}

TEST_CASE("two-body energy against an adaptive integrator") {
  // free-space kernel, markers far from the wall
  const double lambda = -1.0;
  Ensemble e = make_ensemble({Vec3(0, 0, 50), Vec3(1, 0, 50)}, {Vec3(0, 0.1, 0), Vec3(0, -0.1, 0)}, {1.0, 1.0});
  RunConfig cfg;
  cfg.dt0 = 1e-3;
  cfg.dt_growth = 0.0;
  GreenKernel fk = GreenKernel::free_space(1e-3);
  Propagator p(fk, ExtensionConfig::for_domain(ConvexDomain::half_space(), 1.0, lambda), Softening::constant(1e-3),
               cfg);
  p.init(e);
  const double E0 = total_energy(p.ensemble(), fk, lambda);
  double drift = 0.0;
  for (int k = 1; k <= 100; ++k) {
    p.advance_to(0.1 * k);
    drift = std::max(drift, std::abs(total_energy(p.ensemble(), fk, lambda) - E0) / std::abs(E0));
  }
  CHECK(drift < 1e-6);

  using S = std::array<double, 12>;
  S y{};
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 3; ++k) {
      y[6 * i + k] = e.x[i](k);
      y[6 * i + 3 + k] = e.v[i](k);
    }
  auto rhs = [&](const S& s, S& ds, double) {
    Vec3 x0(s[0], s[1], s[2]), x1(s[6], s[7], s[8]);
    // a_i = -lambda q_j grad_x G(x_i, x_j)
    Vec3 a0 = -lambda * fk.grad_x(x0, x1), a1v = -lambda * fk.grad_x(x1, x0);
    for (int k = 0; k < 3; ++k) {
      ds[k] = s[3 + k];
      ds[3 + k] = a0(k);
      ds[6 + k] = s[9 + k];
      ds[9 + k] = a1v(k);
    }
  };
  namespace ode = boost::numeric::odeint;
  ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<S>>(1e-13, 1e-13), rhs, y, 0.0, 10.0, 1e-4);
  double dx = 0.0;
  for (int i = 0; i < 2; ++i) dx = std::max(dx, (p.ensemble().x[i] - Vec3(y[6 * i], y[6 * i + 1], y[6 * i + 2])).norm());
  CHECK(dx < 1e-5);
}

TEST_CASE("time reversal") {
  Ensemble e = small_cloud(200, 2, 1.0);
  RunConfig cfg;
  cfg.dt_growth = 0.0;
  Propagator p = make_prop(e, cfg, -1.0, 0.2);
  p.advance_to(2.0);
  Ensemble mid = p.ensemble();
  for (auto& v : mid.v) v = -v;
  Propagator back = make_prop(mid, cfg, -1.0, 0.2);
  back.advance_to(2.0);
  double err = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (back.ensemble().status[i] == MarkerStatus::InDomain && p.counters().crossings == 0)
      err = std::max(err, (back.ensemble().x[i] - e.x[i]).norm());
  CHECK(err < 1e-6);
}

TEST_CASE("restart and thread-count determinism") {
  Ensemble e = small_cloud(300, 3, 0.5);
  RunConfig cfg;
  cfg.tangent_maps = true;
  Propagator a = make_prop(e, cfg);
  a.advance_to(1.5);
  const std::string path = "/tmp/vpw_test_state.bin";
  a.save(path);
  a.advance_to(3.0);

  Propagator b = make_prop(Ensemble{}, cfg);
  b.load(path);
  CHECK(b.t() == 1.5);
  b.advance_to(3.0);
  for (std::size_t i = 0; i < e.size(); ++i) {
    CHECK(a.ensemble().x[i] == b.ensemble().x[i]);
    CHECK(a.ensemble().J[i] == b.ensemble().J[i]);
  }
  std::remove(path.c_str());

  omp_set_num_threads(1);
  Propagator c = make_prop(e, cfg);
  c.advance_to(1.5);
  c.advance_to(3.0);
  omp_set_num_threads(3);
  Propagator d = make_prop(e, cfg);
  d.advance_to(1.5);
  d.advance_to(3.0);
  for (std::size_t i = 0; i < e.size(); ++i) CHECK(c.ensemble().x[i] == d.ensemble().x[i]);
  for (std::size_t i = 0; i < e.size(); ++i) CHECK(c.ensemble().x[i] == a.ensemble().x[i]);
}

TEST_CASE("tangent map") {
  Ensemble e = small_cloud(100, 4, 2.0);
  // marker i is a test particle, so perturbing it leaves the field unchanged
  e.q[7] = 0.0;
  RunConfig cfg;
  cfg.tangent_maps = true;
  cfg.dt_growth = 0.0;
  Propagator p = make_prop(e, cfg, -1.0, 0.3);
  p.advance_to(2.0);
  CHECK(p.derivatives().max_det_dev < 1e-9);
  // column 0 against a perturbed run
  std::size_t i = 7;
  const double h = 1e-6;
  Ensemble ep = e, em = e;
  ep.x[i](0) += h;
  em.x[i](0) -= h;
  Propagator pp = make_prop(ep, cfg, -1.0, 0.3), pm = make_prop(em, cfg, -1.0, 0.3);
  pp.advance_to(2.0);
  pm.advance_to(2.0);
  Vec3 fd = (pp.ensemble().x[i] - pm.ensemble().x[i]) / (2 * h);
  Vec3 an = p.ensemble().J[i].block<3, 1>(0, 0);
  CHECK((fd - an).norm() < 1e-6 * an.norm());

  // free flow: pure shear, W grows linearly
  Propagator f = make_prop(e, cfg, 0.0);
  f.advance_to(5.0);
  Vec3 Z, W;
  marker_derivatives(f.ensemble(), 3, 5.0, Z, W);
  CHECK((Z - e.dmu0[3].head<3>()).norm() < 1e-12);
  CHECK((W - e.dmu0[3].tail<3>()).norm() < 1e-12);
}

TEST_CASE("extended and absorbing modes agree in the domain") {
  Ensemble e = small_cloud(300, 5, 1.0, Vec3(0, 0, -0.2));
  RunConfig cfg;
  Propagator ext = make_prop(e, cfg);
  cfg.mode = BoundaryMode::Absorbing;
  Propagator abs = make_prop(e, cfg);
  ext.advance_to(10.0);
  abs.advance_to(10.0);
  double err = 0.0;
  int absorbed = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (abs.ensemble().status[i] == MarkerStatus::Absorbed) {
      ++absorbed;
      CHECK(ext.ensemble().status[i] == MarkerStatus::Exterior);
      continue;
    }
    err = std::max(err, (ext.ensemble().x[i] - abs.ensemble().x[i]).norm());
  }
  CHECK(absorbed > 0);
  CHECK(err < 1e-8);
  CHECK(ext.counters().reentries == 0);
  CHECK(abs.ensemble().total_charge() == ext.ensemble().total_charge());
  CHECK(abs.sources().q.size() == ext.sources().q.size());
}

TEST_CASE("step rejection") {
  Ensemble e = make_ensemble({Vec3(0, 0, 5)}, {Vec3(100, 0, 0)}, {1.0});
  RunConfig cfg;
  cfg.dt0 = 0.1;
  cfg.max_halvings = 2;
  Propagator p = make_prop(e, cfg, 0.0, 0.01);
  CHECK_THROWS_AS(p.step(0.1), StepRejected);
  cfg.max_halvings = 8;
  Propagator q = make_prop(e, cfg, 0.0, 0.5);
  CHECK(q.step(0.1) == doctest::Approx(0.1 / 8));
  CHECK(q.counters().rejections == 3);
}
