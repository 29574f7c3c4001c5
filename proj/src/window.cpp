#include "vpw/window.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "vpw/quadrature.hpp"

namespace vpw {

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-16) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

namespace {
double bump_u(double u) {
  if (u <= -1.0 || u >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}
}  // namespace

ScaleWindow::ScaleWindow() {
  // int phi ds/s = 2 ln2 int_{-1}^{1} bump(u) du; composite Gauss on 16 panels.
  const GaussRule& g = gauss_legendre(40);
  double s = 0.0;
  for (int p = 0; p < 16; ++p) {
    double a = -1.0 + p / 8.0, b = a + 1.0 / 8.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      double u = 0.5 * (a + b) + 0.5 * (b - a) * g.x[i];
      s += 0.5 * (b - a) * g.w[i] * bump_u(u);
    }
  }
  scale_norm_ = 2.0 * std::log(2.0) * s;
}

const ScaleWindow& ScaleWindow::instance() {
  static const ScaleWindow w;
  return w;
}

double ScaleWindow::raw(double sigma) const {
  if (!(sigma > 0.25 && sigma < 4.0)) return 0.0;
  return bump_u(0.5 * std::log2(sigma));
}

double ScaleWindow::dyadic(double sigma) const {
  if (!(sigma > 0.25 && sigma < 4.0)) return 0.0;
  double l = std::log2(sigma);
  // Periodic normalizer: the shifts of the bump that can overlap sigma.
  double frac = l - std::floor(l);
  double s = 0.0;
  for (int k = -3; k <= 3; ++k) s += bump_u(0.5 * (frac + k));
  return raw(sigma) / s;
}

void ScaleWindow::scale_derivs(double sigma, double& f, double& df, double& d2f) const {
  f = df = d2f = 0.0;
  if (!(sigma > 0.25 && sigma < 4.0)) return;
  const double L = 2.0 * std::log(2.0);
  double u = std::log(sigma) / L;
  double q = 1.0 - u * u;
  double phi = std::exp(-1.0 / q) / scale_norm_;
  double g1 = -2.0 * u / (q * q);
  double g2 = -(2.0 + 6.0 * u * u) / (q * q * q);
  double pu = g1 * phi;
  double puu = (g2 + g1 * g1) * phi;
  double us = 1.0 / (L * sigma);
  double uss = -1.0 / (L * sigma * sigma);
  f = phi;
  df = pu * us;
  d2f = puu * us * us + pu * uss;
}

double ScaleWindow::radial(const Vec3& d, double R, Vec3* grad, Mat3* hess) const {
  double r = d.norm();
  double sigma = r / R;
  double f, df, d2f;
  scale_derivs(sigma, f, df, d2f);
  if (grad || hess) {
    if (f == 0.0 && df == 0.0) {
      if (grad) grad->setZero();
      if (hess) hess->setZero();
      return 0.0;
    }
    Vec3 e = d / r;
    if (grad) *grad = (df / R) * e;
    if (hess) *hess = (d2f / (R * R)) * e * e.transpose() + (df / (R * r)) * (Mat3::Identity() - e * e.transpose());
  }
  return f;
}

double Cutoff::chi_gt(double x) {
  double s = std::clamp(x - 1.0, 0.0, 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double Cutoff::chi_gt_d1(double x) {
  if (x <= 1.0 || x >= 2.0) return 0.0;
  double s = x - 1.0;
  return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

double Cutoff::chi_gt_d2(double x) {
  if (x <= 1.0 || x >= 2.0) return 0.0;
  double s = x - 1.0;
  return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
}

}  // namespace vpw
