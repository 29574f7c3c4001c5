#include "vpw/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "vpw/errors.hpp"
#include "vpw/rng.hpp"

namespace vpw {

const char* status_name(MarkerStatus s) {
  switch (s) {
    case MarkerStatus::InDomain:
      return "in_domain";
    case MarkerStatus::Exterior:
      return "exterior";
    case MarkerStatus::Absorbed:
      return "absorbed";
  }
  return "?";
}

namespace {

// (1-u^2)^3 and its derivative in u.
inline double bump(double u, double* du) {
  if (std::abs(u) >= 1.0) {
    *du = 0.0;
    return 0.0;
  }
  double s = 1.0 - u * u;
  *du = -6.0 * u * s * s;
  return s * s * s;
}

// int_{-1}^{1} (1-u^2)^6 du = 2 (12)!! / (13)!!
constexpr double kI6 = 2.0 * 46080.0 / 135135.0;

double radical_inverse(std::uint64_t i, unsigned base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

// CDF of the density (1-u^2)^6 / kI6 on [-1, 1].
double marginal_cdf(double u) {
  static const double c[7] = {1, -6, 15, -20, 15, -6, 1};  // (1-s^2)^6 = sum c_k s^{2k}
  double acc = 0.0, p = u;
  for (int k = 0; k <= 6; ++k) {
    acc += c[k] * (p + 1.0) / (2 * k + 1);  // odd powers: (-1)^{2k+1} = -1
    p *= u * u;
  }
  return acc / kI6;
}

// Inverse of marginal_cdf by safeguarded Newton.
double marginal_inverse(double p) {
  double lo = -1.0, hi = 1.0, u = 2.0 * p - 1.0;
  for (int it = 0; it < 100; ++it) {
    double f = marginal_cdf(u) - p;
    if (f > 0) hi = u; else lo = u;
    double s = 1.0 - u * u;
    double d = s * s * s * s * s * s / kI6;
    double next = d > 0 ? u - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) < 1e-15) return next;
    u = next;
  }
  return u;
}

}  // namespace

double mu0(const InitialData& d, const Vec3& x, const Vec3& v, Vec6* grad) {
  double f[6], df[6];
  for (int i = 0; i < 3; ++i) {
    f[i] = bump((x(i) - d.center_x(i)) / d.rx, &df[i]);
    df[i] /= d.rx;
    f[3 + i] = bump((v(i) - d.center_v(i)) / d.rv, &df[3 + i]);
    df[3 + i] /= d.rv;
  }
  double p = d.epsilon;
  for (double fi : f) p *= fi;
  if (grad) {
    for (int k = 0; k < 6; ++k) {
      double g = d.epsilon * df[k];
      for (int i = 0; i < 6; ++i)
        if (i != k) g *= f[i];
      (*grad)(k) = g;
    }
  }
  return p;
}

double bump_mass(const InitialData& d) {
  return d.epsilon * d.epsilon * std::pow(d.rx * kI6, 3) * std::pow(d.rv * kI6, 3);
}

double bump_gradient_sup(const InitialData& d) {
  // |grad| is maximal with the non-differentiated factors at 1; 1D sup of |d/du (1-u^2)^3| is at u^2 = 1/5.
  const double u = std::sqrt(0.2);
  double du;
  bump(u, &du);
  return d.epsilon * std::abs(du) / std::min(d.rx, d.rv);
}

double bump_weighted_sup(const InitialData& d) {
  Stream rng(0, 22);
  double best = 0.0;
  for (int k = 0; k < 200000; ++k) {
    Vec3 x = d.center_x + d.rx * Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    Vec3 v = d.center_v + d.rv * Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    best = std::max(best, std::pow(jbracket(x), 4) * std::pow(jbracket(v), 4) * mu0(d, x, v));
  }
  return best;
}

SourceSet Ensemble::sources(const ConvexDomain& d) const {
  SourceSet s;
  for (std::size_t i = 0; i < size(); ++i)
    if (status[i] == MarkerStatus::InDomain && q[i] > 0.0 && d.b(x[i]) > 0.0) {
      s.y.push_back(x[i]);
      s.q.push_back(q[i]);
    }
  return s;
}

double Ensemble::total_charge() const {
  double s = 0.0;
  for (double c : q) s += c;
  return s;
}

double Ensemble::charge_with(MarkerStatus st) const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    if (status[i] == st) s += q[i];
  return s;
}

Ensemble sample_initial(const InitialData& spec, const ConvexDomain& d, std::uint64_t seed) {
  Ensemble e;
  if (spec.epsilon == 0.0 || spec.n_markers == 0) return e;
  if (!spec.allow_exterior) {
    for (int c = 0; c < 8; ++c) {
      Vec3 corner = spec.center_x + spec.rx * Vec3(c & 1 ? 1 : -1, c & 2 ? 1 : -1, c & 4 ? 1 : -1);
      if (!(d.b(corner) > 0.0))
        throw SupportViolation("position support of the bump leaves the domain; set data.allow_exterior");
    }
  }
  // Unit-cube points and the phase volume each one stands for. The low-discrepancy
  // points are warped by the inverse CDF of the per-axis marginal of mu0^2, so the
  // cell of a marker is 1/(N p) with p the warped density, and the charges come out equal.
  std::vector<Vec6> pts;
  std::vector<double> cells;
  const double box = std::pow(2.0 * spec.rx, 3) * std::pow(2.0 * spec.rv, 3);
  if (spec.sampling == Sampling::Grid) {
    int m = std::max(1, static_cast<int>(std::lround(std::pow(double(spec.n_markers), 1.0 / 6.0))));
    std::size_t total = 1;
    for (int k = 0; k < 6; ++k) total *= m;
    for (std::size_t idx = 0; idx < total; ++idx) {
      Vec6 u;
      std::size_t r = idx;
      for (int k = 0; k < 6; ++k) {
        u(k) = (static_cast<double>(r % m) + 0.5) / m;
        r /= m;
      }
      pts.push_back(u);
      cells.push_back(box / double(total));
    }
  } else {
    static const unsigned bases[6] = {2, 3, 5, 7, 11, 13};
    Stream rng(seed, 21);
    double shift[6];
    for (double& s : shift) s = rng.uniform();
    const double radius[6] = {spec.rx, spec.rx, spec.rx, spec.rv, spec.rv, spec.rv};
    for (std::size_t i = 0; i < spec.n_markers; ++i) {
      Vec6 u;
      double density = 1.0;
      for (int k = 0; k < 6; ++k) {
        double h = radical_inverse(i + 1, bases[k]) + shift[k];
        double s = marginal_inverse(h - std::floor(h));
        double w = 1.0 - s * s;
        density *= w * w * w * w * w * w / (kI6 * radius[k]);
        u(k) = 0.5 * (s + 1.0);
      }
      pts.push_back(u);
      cells.push_back(1.0 / (double(spec.n_markers) * density));
    }
  }
  double raw_mass = 0.0;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const Vec6& u = pts[p];
    Vec3 x = spec.center_x + spec.rx * (2.0 * u.head<3>() - Vec3::Ones());
    Vec3 v = spec.center_v + spec.rv * (2.0 * u.tail<3>() - Vec3::Ones());
    Vec6 g;
    double m = mu0(spec, x, v, &g);
    if (m <= 0.0 || !std::isfinite(cells[p])) continue;
    double bx = d.b(x);
    if (bx <= 0.0) {
      // incoming exterior phase points carry no data
      Vec3 n = d.boundary_data_unchecked(x).normal;
      if (v.dot(n) >= 0.0) continue;
    }
    e.x.push_back(x);
    e.v.push_back(v);
    e.mu0.push_back(m);
    e.dmu0.push_back(g);
    e.q.push_back(m * m * cells[p]);
    e.status.push_back(bx > 0.0 ? MarkerStatus::InDomain : MarkerStatus::Exterior);
    e.t_exit.push_back(std::nan(""));
    raw_mass += m * m * cells[p];
  }
  e.x0 = e.x;
  e.v0 = e.v;
  if (raw_mass > 0.0) {
    const double scale = bump_mass(spec) / raw_mass;
    for (double& c : e.q) c *= scale;
  }
  return e;
}

double moment_sup(const Ensemble& e, double t, int a, int b, MomentScope scope) {
  double best = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e.status[i] == MarkerStatus::Absorbed) continue;
    if (scope == MomentScope::InDomain && e.status[i] != MarkerStatus::InDomain) continue;
    double w = std::abs(e.mu0[i]);
    if (a) w *= std::pow(jbracket(Vec3(e.x[i] - t * e.v[i])), a);
    if (b) w *= std::pow(jbracket(e.v[i]), b);
    best = std::max(best, w);
  }
  return best;
}

double cone_exterior_mass(const Ensemble& e, const ConvexDomain& d) {
  double s = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e.status[i] == MarkerStatus::Absorbed || !(d.b(e.x[i]) > 0.0)) continue;
    if (d.cone_query(e.v[i]).membership == Membership::Exterior) s += e.q[i];
  }
  return s;
}

NearestNeighbor mean_nearest_neighbor(const Ensemble& e) {
  NearestNeighbor nn;
  const std::int64_t n = static_cast<std::int64_t>(e.size());
  if (n < 2) return nn;
  std::vector<double> dx(n), dv(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    double bx = kInf, bv = kInf;
    for (std::int64_t j = 0; j < n; ++j) {
      if (j == i) continue;
      bx = std::min(bx, (e.x0[i] - e.x0[j]).squaredNorm());
      bv = std::min(bv, (e.v0[i] - e.v0[j]).squaredNorm());
    }
    dx[i] = std::sqrt(bx);
    dv[i] = std::sqrt(bv);
  }
  for (std::int64_t i = 0; i < n; ++i) {
    nn.x += dx[i];
    nn.v += dv[i];
  }
  nn.x /= n;
  nn.v /= n;
  return nn;
}

}  // namespace vpw
