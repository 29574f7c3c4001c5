#include "vpw/field.hpp"

#include <algorithm>
#include <cmath>

#include "vpw/errors.hpp"
#include "vpw/window.hpp"

namespace vpw {

namespace {

// Per-image partial sums: sum q/r, sum q p/r^3, sum q (I/r^3 - 3pp^T/r^5) (upper triangle).
struct Acc {
  double v = 0.0;
  double g[3] = {0.0, 0.0, 0.0};
  double a[6] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};

  void add(const Acc& o) {
    v += o.v;
    for (int i = 0; i < 3; ++i) g[i] += o.g[i];
    for (int i = 0; i < 6; ++i) a[i] += o.a[i];
  }
};

constexpr std::size_t kBlock = 64;

Acc block_sum(const Vec3& s, const SourceSet& src, std::size_t lo, std::size_t hi, double e2, bool grad) {
  Acc acc;
  for (std::size_t i = lo; i < hi; ++i) {
    const double px = s(0) - src.y[i](0), py = s(1) - src.y[i](1), pz = s(2) - src.y[i](2);
    const double r2 = px * px + py * py + pz * pz + e2;
    if (r2 == 0.0) throw SingularEvaluation("target coincides with a source and the softening is zero");
    const double ir = 1.0 / std::sqrt(r2);
    const double q = src.q[i];
    const double qir3 = q * ir * ir * ir;
    acc.v += q * ir;
    acc.g[0] += qir3 * px;
    acc.g[1] += qir3 * py;
    acc.g[2] += qir3 * pz;
    if (grad) {
      const double c = 3.0 * qir3 / r2;
      acc.a[0] += qir3 - c * px * px;
      acc.a[1] += -c * px * py;
      acc.a[2] += -c * px * pz;
      acc.a[3] += qir3 - c * py * py;
      acc.a[4] += -c * py * pz;
      acc.a[5] += qir3 - c * pz * pz;
    }
  }
  return acc;
}

Acc pairwise(std::vector<Acc>& parts, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return parts[lo];
  std::size_t mid = lo + (hi - lo) / 2;
  Acc a = pairwise(parts, lo, mid);
  a.add(pairwise(parts, mid, hi));
  return a;
}

Mat3 sym(const double* a) {
  Mat3 m;
  m << a[0], a[1], a[2], a[1], a[3], a[4], a[2], a[4], a[5];
  return m;
}

}  // namespace

FieldSample FieldSolver::at(const SourceSet& src, const Vec3& x, bool want_grad) const {
  FieldSample out;
  const std::size_t n = src.size();
  if (n == 0) return out;
  const ImageSet im = kernel_.images(x);
  const double e2 = kernel_.softening() * kernel_.softening();
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  std::vector<Acc> parts(nb);
  double val = 0.0;
  Vec3 g = Vec3::Zero();
  Mat3 h = Mat3::Zero();
  for (int k = 0; k < im.n; ++k) {
    const ImageTerm& t = im.term[k];
    for (std::size_t b = 0; b < nb; ++b)
      parts[b] = block_sum(t.s, src, b * kBlock, std::min(n, (b + 1) * kBlock), e2, want_grad);
    Acc s = pairwise(parts, 0, nb);
    Vec3 gs(s.g[0], s.g[1], s.g[2]);
    val += t.c * s.v;
    g += t.c * (t.J.transpose() * gs);
    if (want_grad) {
      Mat3 hk = t.J.transpose() * sym(s.a) * t.J;
      if (t.curved)
        for (int m = 0; m < 3; ++m) hk += gs(m) * t.H[m];
      h += t.c * hk;
    }
  }
  out.phi = -kInv4Pi * val;
  out.E = kInv4Pi * g;
  if (want_grad) out.gradE = kInv4Pi * h;
  return out;
}

std::vector<FieldSample> FieldSolver::evaluate(const SourceSet& src, const std::vector<Vec3>& targets,
                                               bool want_grad) const {
  std::vector<FieldSample> out(targets.size());
  const std::int64_t n = static_cast<std::int64_t>(targets.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < n; ++i) out[i] = at(src, targets[i], want_grad);
  return out;
}

FieldSnapshot FieldSolver::snapshot(const SourceSet& src, double t, const std::vector<Vec3>& probes,
                                    bool want_grad) const {
  FieldSnapshot s;
  s.t = t;
  s.probes = probes;
  s.values = evaluate(src, probes, want_grad);
  return s;
}

std::vector<FieldSample> FieldSolver::evaluate_reference(const SourceSet& src, const std::vector<Vec3>& targets,
                                                         bool want_grad) const {
  std::vector<FieldSample> out(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    FieldSample& f = out[i];
    for (std::size_t j = 0; j < src.size(); ++j) {
      Vec3 g;
      Mat3 h;
      double v = kernel_.eval(targets[i], src.y[j], &g, want_grad ? &h : nullptr);
      f.phi += src.q[j] * v;
      f.E += src.q[j] * g;
      if (want_grad) f.gradE += src.q[j] * h;
    }
  }
  return out;
}

ScaleComponent scale_component(const GreenKernel& k, const SourceSet& src, const Vec3& x, double R) {
  const ScaleWindow& win = ScaleWindow::instance();
  ScaleComponent c;
  for (std::size_t i = 0; i < src.size(); ++i) {
    Vec3 d = x - src.y[i];
    double r = d.norm();
    if (r <= 0.25 * R || r >= 4.0 * R) continue;
    Vec3 gw;
    Mat3 hw;
    double w = win.radial(d, R, &gw, &hw);
    Vec3 gG;
    Mat3 hG;
    double G = k.eval(x, src.y[i], &gG, &hG);
    const double q = src.q[i];
    c.phi += q * w * G;
    c.E += q * (w * gG + G * gw);
    c.M += q * (w * hG + gw * gG.transpose() + gG * gw.transpose() + G * hw);
  }
  c.phi *= R;
  c.E *= R * R;
  c.M *= R * R * R;
  return c;
}

std::vector<double> scale_grid(const SourceSet& src, const Vec3& x, int per_octave) {
  double dmin = kInf, dmax = 0.0;
  for (const Vec3& y : src.y) {
    double r = (x - y).norm();
    if (r == 0.0) continue;
    dmin = std::min(dmin, r);
    dmax = std::max(dmax, r);
  }
  std::vector<double> grid;
  if (dmax == 0.0) return grid;
  const double h = std::log(2.0) / per_octave;
  double lo = std::log(dmin / 4.0), hi = std::log(4.0 * dmax);
  int k0 = static_cast<int>(std::floor(lo / h)), k1 = static_cast<int>(std::ceil(hi / h));
  for (int k = k0; k <= k1; ++k) grid.push_back(std::exp(k * h));
  return grid;
}

Vec3 reconstruct_E(const GreenKernel& k, const SourceSet& src, const Vec3& x, int per_octave) {
  const double h = std::log(2.0) / per_octave;
  Vec3 acc = Vec3::Zero();
  for (double R : scale_grid(src, x, per_octave)) acc += h * scale_component(k, src, x, R).E / (R * R);
  return acc;
}

EffectiveField effective_field(const GreenKernel& cone, const SourceSet& w_src, double t, const Vec3& a,
                               int per_octave) {
  if (cone.domain().kind() == DomainKind::Graph)
    throw NoClosedForm("effective field needs a closed-form cone kernel");
  EffectiveField ef;
  const double h = std::log(2.0) / per_octave;
  Vec3 acc = Vec3::Zero();
  for (double r : scale_grid(w_src, a, per_octave)) {
    Vec3 e = scale_component(cone, w_src, a, r).E;
    ef.r.push_back(r);
    ef.E0_r.push_back(e);
    acc += h * e / (r * r);
  }
  ef.E0 = acc / (t * t);
  return ef;
}

std::vector<Vec3> cone_field(const GreenKernel& cone, const SourceSet& w_src, const std::vector<Vec3>& a) {
  if (cone.domain().kind() == DomainKind::Graph) throw NoClosedForm("cone kernel of a graph domain");
  FieldSolver fs(cone);
  std::vector<FieldSample> v = fs.evaluate(w_src, a, false);
  std::vector<Vec3> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = v[i].E;
  return out;
}

std::vector<Vec3> fixed_probe_grid(const ConvexDomain& d, double rmin, double rmax, double ratio, int n_dirs) {
  std::vector<Vec3> dirs;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n_dirs; ++i) {
    double z = 1.0 - 2.0 * (i + 0.5) / n_dirs;
    double rr = std::sqrt(1.0 - z * z);
    dirs.emplace_back(rr * std::cos(golden * i), rr * std::sin(golden * i), z);
  }
  std::vector<Vec3> out;
  for (double r = rmin; r <= rmax * (1.0 + 1e-12); r *= ratio)
    for (const Vec3& e : dirs)
      if (d.inside(r * e)) out.push_back(r * e);
  return out;
}

std::vector<Vec3> a_grid(const ConvexDomain& d, const Vec3& lo, const Vec3& hi, double step) {
  std::vector<Vec3> out;
  const int nx = static_cast<int>(std::floor((hi(0) - lo(0)) / step + 1e-9)) + 1;
  const int ny = static_cast<int>(std::floor((hi(1) - lo(1)) / step + 1e-9)) + 1;
  const int nz = static_cast<int>(std::floor((hi(2) - lo(2)) / step + 1e-9)) + 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        Vec3 a = lo + step * Vec3(i, j, k);
        if (d.cone_interior(a)) out.push_back(a);
      }
  return out;
}

EinfTracker::EinfTracker(std::vector<Vec3> grid, const Vec3& lo, const Vec3& hi, double step)
    : grid_(std::move(grid)), lo_(lo), hi_(hi), step_(step) {
  nx_ = static_cast<int>(std::floor((hi(0) - lo(0)) / step + 1e-9)) + 1;
  ny_ = static_cast<int>(std::floor((hi(1) - lo(1)) / step + 1e-9)) + 1;
  nz_ = static_cast<int>(std::floor((hi(2) - lo(2)) / step + 1e-9)) + 1;
  index_.assign(static_cast<std::size_t>(nx_) * ny_ * nz_, -1);
  for (std::size_t p = 0; p < grid_.size(); ++p) {
    Vec3 c = (grid_[p] - lo_) / step_;
    int i = static_cast<int>(std::lround(c(0))), j = static_cast<int>(std::lround(c(1))),
        k = static_cast<int>(std::lround(c(2)));
    if (i < 0 || j < 0 || k < 0 || i >= nx_ || j >= ny_ || k >= nz_) continue;
    index_[(static_cast<std::size_t>(k) * ny_ + j) * nx_ + i] = static_cast<int>(p);
  }
}

void EinfTracker::add(double t, std::vector<Vec3> t2E) {
  times_.push_back(t);
  history_.push_back(std::move(t2E));
}

std::vector<double> EinfTracker::residuals() const {
  std::vector<double> r;
  for (std::size_t k = 0; k + 1 < history_.size(); ++k) {
    double m = 0.0;
    for (std::size_t p = 0; p < grid_.size(); ++p) m = std::max(m, (history_[k][p] - history_[k + 1][p]).norm());
    r.push_back(m);
  }
  return r;
}

double EinfTracker::relative_change() const {
  std::vector<double> r = residuals();
  if (r.empty()) return kInf;
  double sup = 0.0;
  for (const Vec3& e : history_.back()) sup = std::max(sup, e.norm());
  return sup > 0.0 ? r.back() / sup : 0.0;
}

bool EinfTracker::converged() const {
  std::vector<double> r = residuals();
  if (r.size() < 3) return false;
  std::size_t n = r.size();
  return r[n - 1] < r[n - 2] && r[n - 2] < r[n - 3];
}

Vec3 EinfTracker::interpolate(const ConvexDomain& d, const Vec3& w) const {
  if (history_.empty()) throw MissingEinf("no E_inf estimate recorded");
  const std::vector<Vec3>& E = history_.back();
  Vec3 a = d.cone_query(w).projection;
  Vec3 c = (a - lo_) / step_;
  c(0) = std::clamp(c(0), 0.0, double(nx_ - 1));
  c(1) = std::clamp(c(1), 0.0, double(ny_ - 1));
  c(2) = std::clamp(c(2), 0.0, double(nz_ - 1));
  int i0 = std::min(static_cast<int>(c(0)), std::max(nx_ - 2, 0));
  int j0 = std::min(static_cast<int>(c(1)), std::max(ny_ - 2, 0));
  int k0 = std::min(static_cast<int>(c(2)), std::max(nz_ - 2, 0));
  double fx = c(0) - i0, fy = c(1) - j0, fz = c(2) - k0;
  Vec3 acc = Vec3::Zero();
  double wsum = 0.0;
  for (int dk = 0; dk < 2; ++dk)
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) {
        int i = std::min(i0 + di, nx_ - 1), j = std::min(j0 + dj, ny_ - 1), k = std::min(k0 + dk, nz_ - 1);
        int p = index_[(static_cast<std::size_t>(k) * ny_ + j) * nx_ + i];
        if (p < 0) continue;
        double wt = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) * (dk ? fz : 1 - fz);
        acc += wt * E[p];
        wsum += wt;
      }
  if (wsum > 1e-12) return acc / wsum;
  // nearest grid point
  double best = kInf;
  Vec3 out = Vec3::Zero();
  for (std::size_t p = 0; p < grid_.size(); ++p) {
    double dd = (grid_[p] - a).squaredNorm();
    if (dd < best) best = dd, out = E[p];
  }
  return out;
}

}  // namespace vpw
