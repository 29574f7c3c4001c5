#include "vpw/asymptotics.hpp"

#include <cmath>
#include <unordered_map>

#include "vpw/errors.hpp"

namespace vpw {

double ScatterProfile::good_fraction() const {
  if (good.empty()) return 0.0;
  std::size_t n = 0;
  for (char g : good) n += g ? 1 : 0;
  return static_cast<double>(n) / good.size();
}

ScatterProfile scatter_profile(const Ensemble& e, const ConvexDomain& d, double t, double lambda,
                               const EinfTracker* einf, double z_radius) {
  ScatterProfile p;
  p.t = t;
  const double g_min = std::pow(t, -0.25);
  const double z_max = z_radius * std::pow(t, 0.01);
  const double lt = std::log(t);
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e.status[i] == MarkerStatus::Absorbed) continue;
    Vec3 z = e.x[i] - t * e.v[i];
    Vec3 w = e.v[i];
    Vec3 shift = Vec3::Zero();
    if (lambda != 0.0 && einf && !einf->empty()) shift = lambda * lt * einf->interpolate(d, w);
    p.id.push_back(i);
    p.z.push_back(z);
    p.w.push_back(w);
    p.z_shifted.push_back(z - shift);
    p.q.push_back(e.q[i]);
    p.in_domain.push_back(e.status[i] == MarkerStatus::InDomain);
    bool good = w.norm() > 0.0 && z.norm() <= z_max && d.grazing(z, w) > g_min;
    p.good.push_back(good);
  }
  return p;
}

double scattering_drift(const ScatterProfile& p1, const ScatterProfile& p2, bool shifted) {
  std::unordered_map<std::size_t, std::size_t> at2;
  for (std::size_t k = 0; k < p2.id.size(); ++k)
    if (p2.good[k]) at2[p2.id[k]] = k;
  double sup = 0.0;
  std::size_t matched = 0;
  for (std::size_t k = 0; k < p1.id.size(); ++k) {
    if (!p1.good[k]) continue;
    auto it = at2.find(p1.id[k]);
    if (it == at2.end()) continue;
    const Vec3& a = shifted ? p1.z_shifted[k] : p1.z[k];
    const Vec3& b = shifted ? p2.z_shifted[it->second] : p2.z[it->second];
    sup = std::max(sup, (b - a).norm());
    ++matched;
  }
  if (matched == 0) throw EmptyGoodSet("no marker is in both good sets");
  return sup;
}

SelfConsistency einf_selfconsistency(const ScatterProfile& p, const GreenKernel& cone, const std::vector<Vec3>& a_grid,
                                     const std::vector<Vec3>& einf) {
  SourceSet ws;
  for (std::size_t k = 0; k < p.w.size(); ++k)
    if (p.in_domain[k] && cone.domain().cone_interior(p.w[k])) {
      ws.y.push_back(p.w[k]);
      ws.q.push_back(p.q[k]);
    }
  SelfConsistency out;
  out.rhs = cone_field(cone, ws, a_grid);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    num = std::max(num, (einf[i] - out.rhs[i]).norm());
    den = std::max(den, out.rhs[i].norm());
  }
  out.rel_sup_error = den > 0.0 ? num / den : (num > 0.0 ? kInf : 0.0);
  return out;
}

RateFit rate_fit(const std::vector<double>& t, const std::vector<double>& value, double t_lo, double t_hi) {
  std::vector<double> X, Y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(value[i] > 0.0)) throw NonPositiveValue("rate_fit needs positive values");
    X.push_back(std::log(t[i]));
    Y.push_back(std::log(value[i]));
  }
  if (X.size() < 5) throw InsufficientData("rate_fit needs at least 5 points in the window");
  const double n = static_cast<double>(X.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
    syy += (Y[i] - my) * (Y[i] - my);
  }
  RateFit f;
  f.n = X.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

}  // namespace vpw
