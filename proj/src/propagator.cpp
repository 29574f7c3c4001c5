#include "vpw/propagator.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "vpw/errors.hpp"

namespace vpw {

double RunConfig::dt_at(double t) const { return std::min(dt0 * std::max(1.0, dt_growth * t), dt_max); }

std::vector<double> RunConfig::checkpoint_times() const {
  std::vector<double> out;
  for (double t = checkpoint_t0; t <= t_end * (1.0 + 1e-12); t *= 2.0) out.push_back(t);
  return out;
}

Propagator::Propagator(GreenKernel kernel, ExtensionConfig ext, Softening soft, RunConfig cfg)
    : kernel_(std::move(kernel)), ext_(ext), soft_(soft), cfg_(cfg) {}

void Propagator::init(Ensemble e, double t0) {
  ens_ = std::move(e);
  t_ = t0;
  const std::size_t n = ens_.size();
  if (ens_.x0.size() != n) ens_.x0 = ens_.x;
  if (ens_.v0.size() != n) ens_.v0 = ens_.v;
  if (ens_.dmu0.size() != n) ens_.dmu0.assign(n, Vec6::Zero());
  if (ens_.t_exit.size() != n) ens_.t_exit.assign(n, std::nan(""));
  if (cfg_.tangent_maps && ens_.J.size() != ens_.size()) ens_.J.assign(ens_.size(), Mat6::Identity());
  if (!cfg_.tangent_maps) ens_.J.clear();
  compute_acceleration();
}

void Propagator::compute_acceleration() {
  const std::size_t n = ens_.size();
  acc_.assign(n, Vec3::Zero());
  if (cfg_.tangent_maps) dacc_.assign(n, Mat3::Zero());
  if (ext_.lambda == 0.0 || n == 0) return;
  std::vector<std::size_t> idx;
  std::vector<Vec3> xs;
  for (std::size_t i = 0; i < n; ++i) {
    if (ens_.status[i] == MarkerStatus::Absorbed) continue;
    idx.push_back(i);
    xs.push_back(ens_.x[i]);
  }
  ExtensionMap ext = extension_at(t_);
  SourceSet src = sources();
  std::vector<ExtendedSample> f = ext.evaluate(src, t_, xs, cfg_.tangent_maps);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    acc_[idx[k]] = -ext_.lambda * f[k].F;
    if (cfg_.tangent_maps) dacc_[idx[k]] = -ext_.lambda * f[k].H;
  }
}

namespace {

void kick_tangent(Mat6& J, const Mat3& A, double h) {
  J.bottomRows<3>() += h * A * J.topRows<3>();
}

void drift_tangent(Mat6& J, double dt) { J.topRows<3>() += dt * J.bottomRows<3>(); }

}  // namespace

bool Propagator::try_step(double dt, double t_new) {
  const std::size_t n = ens_.size();
  const double eps = soft_.at(t_);
  std::vector<Vec3> vh(n);
  double max_move = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ens_.status[i] == MarkerStatus::Absorbed) continue;
    vh[i] = ens_.v[i] + 0.5 * dt * acc_[i];
    max_move = std::max(max_move, dt * vh[i].norm());
  }
  if (eps > 0.0 && max_move > cfg_.max_move_factor * eps) return false;

  const ConvexDomain& d = domain();
  std::vector<char> live(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (ens_.status[i] == MarkerStatus::Absorbed) continue;
    const Vec3 x_old = ens_.x[i];
    Vec3 x_new = x_old + dt * vh[i];
    if (cfg_.tangent_maps) {
      kick_tangent(ens_.J[i], dacc_[i], 0.5 * dt);
      drift_tangent(ens_.J[i], dt);
    }
    const double b_new = d.b(x_new);
    live[i] = 1;
    if (ens_.status[i] == MarkerStatus::InDomain && b_new <= 0.0) {
      // crossing on the straight drift segment
      double lo = 0.0, hi = dt;
      Vec3 xc = x_new;
      double sc = dt;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        sc = mid;
        xc = x_old + mid * vh[i];
        double bm = d.b(xc);
        if (std::abs(bm) < 1e-9 && bm <= 0.0) break;
        if (bm > 0.0) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-300) break;
      }
      Vec3 nrm = d.boundary_data_unchecked(xc).normal;
      double vn = vh[i].dot(nrm);
      ++ctr_.crossings;
      ctr_.max_exit_vn = std::max(ctr_.max_exit_vn, vn);
      if (std::abs(vn) < 1e-8) ++ctr_.grazing_events;
      ens_.t_exit[i] = t_ + sc;
      if (cfg_.mode == BoundaryMode::Absorbing) {
        ens_.x[i] = xc;
        ens_.v[i] = vh[i];
        ens_.status[i] = MarkerStatus::Absorbed;
        live[i] = 0;
        continue;
      }
      ens_.status[i] = MarkerStatus::Exterior;
    } else if (ens_.status[i] == MarkerStatus::Exterior && b_new > 0.0) {
      ++ctr_.reentries;
      if (cfg_.fatal_reentry) throw ReEntryDetected("exterior marker re-entered the domain");
    }
    ens_.x[i] = x_new;
  }
  t_ = std::isfinite(t_new) ? t_new : t_ + dt;
  compute_acceleration();
  for (std::size_t i = 0; i < n; ++i) {
    if (!live[i]) continue;
    ens_.v[i] = vh[i] + 0.5 * dt * acc_[i];
    if (cfg_.tangent_maps) kick_tangent(ens_.J[i], dacc_[i], 0.5 * dt);
  }
  ++ctr_.steps;
  return true;
}

double Propagator::step(double dt, double t_target) {
  for (int k = 0; k <= cfg_.max_halvings; ++k) {
    if (try_step(dt, k == 0 ? t_target : kInf)) return dt;
    ++ctr_.rejections;
    dt *= 0.5;
  }
  throw StepRejected("marker moved more than the allowed multiple of the softening after halving");
}

void Propagator::advance_to(double T) {
  while (t_ < T) {
    double dt = cfg_.dt_at(t_);
    if (t_ + dt >= T * (1.0 - 1e-14)) {
      step(T - t_, T);
    } else {
      step(dt);
    }
  }
}

void marker_derivatives(const Ensemble& e, std::size_t i, double t, Vec3& Z, Vec3& W) {
  Vec6 g = e.J.empty() ? e.dmu0[i] : Vec6(e.J[i].transpose().partialPivLu().solve(e.dmu0[i]));
  Z = g.head<3>();
  W = t * Z + g.tail<3>();
}

Derivatives Propagator::derivatives() const {
  Derivatives out;
  for (std::size_t i = 0; i < ens_.size(); ++i) {
    if (ens_.status[i] == MarkerStatus::Absorbed) continue;
    Vec3 Z, W;
    marker_derivatives(ens_, i, t_, Z, W);
    out.S_Z_all = std::max(out.S_Z_all, Z.norm());
    out.S_W_all = std::max(out.S_W_all, W.norm());
    if (ens_.status[i] == MarkerStatus::InDomain) {
      out.S_Z = std::max(out.S_Z, Z.norm());
      out.S_W = std::max(out.S_W, W.norm());
    }
    if (!ens_.J.empty()) out.max_det_dev = std::max(out.max_det_dev, std::abs(ens_.J[i].determinant() - 1.0));
  }
  return out;
}

namespace {

constexpr char kMagic[8] = {'V', 'P', 'W', 'S', 'T', 'A', 'T', 'E'};
constexpr std::uint32_t kStateVersion = 1;

// The format is little-endian; this build targets little-endian hosts only.
static_assert(std::endian::native == std::endian::little);

template <class T>
void put(std::ofstream& o, const T& v) {
  o.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("truncated state file");
  return v;
}

void put_vec(std::ofstream& o, const Vec3& v) {
  for (int k = 0; k < 3; ++k) put(o, v(k));
}

Vec3 get_vec(std::ifstream& in) {
  Vec3 v;
  for (int k = 0; k < 3; ++k) v(k) = get<double>(in);
  return v;
}

}  // namespace

void Propagator::save(const std::string& path) const {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw FormatError("cannot open " + path);
  o.write(kMagic, 8);
  put(o, kStateVersion);
  put(o, t_);
  put(o, soft_.c0);
  put(o, soft_.c1);
  put(o, ext_.c_star);
  put(o, ctr_.steps);
  put(o, ctr_.rejections);
  put(o, ctr_.reentries);
  put(o, ctr_.grazing_events);
  put(o, ctr_.crossings);
  put(o, ctr_.max_exit_vn);
  const std::uint64_t n = ens_.size();
  put(o, n);
  const std::uint8_t has_j = ens_.J.empty() ? 0 : 1;
  put(o, has_j);
  for (std::size_t i = 0; i < n; ++i) {
    put_vec(o, ens_.x[i]);
    put_vec(o, ens_.v[i]);
    put_vec(o, ens_.x0[i]);
    put_vec(o, ens_.v0[i]);
    put(o, ens_.mu0[i]);
    put(o, ens_.q[i]);
    for (int k = 0; k < 6; ++k) put(o, ens_.dmu0[i](k));
    put(o, static_cast<std::uint8_t>(ens_.status[i]));
    put(o, ens_.t_exit[i]);
    if (has_j)
      for (int k = 0; k < 36; ++k) put(o, ens_.J[i].data()[k]);
  }
  if (!o) throw FormatError("write failed for " + path);
}

void Propagator::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw FormatError("not a state file: " + path);
  if (get<std::uint32_t>(in) != kStateVersion) throw FormatError("unsupported state version");
  t_ = get<double>(in);
  soft_.c0 = get<double>(in);
  soft_.c1 = get<double>(in);
  ext_.c_star = get<double>(in);
  ctr_.steps = get<std::uint64_t>(in);
  ctr_.rejections = get<std::uint64_t>(in);
  ctr_.reentries = get<std::uint64_t>(in);
  ctr_.grazing_events = get<std::uint64_t>(in);
  ctr_.crossings = get<std::uint64_t>(in);
  ctr_.max_exit_vn = get<double>(in);
  const std::uint64_t n = get<std::uint64_t>(in);
  const bool has_j = get<std::uint8_t>(in) != 0;
  Ensemble e;
  for (std::uint64_t i = 0; i < n; ++i) {
    e.x.push_back(get_vec(in));
    e.v.push_back(get_vec(in));
    e.x0.push_back(get_vec(in));
    e.v0.push_back(get_vec(in));
    e.mu0.push_back(get<double>(in));
    e.q.push_back(get<double>(in));
    Vec6 g;
    for (int k = 0; k < 6; ++k) g(k) = get<double>(in);
    e.dmu0.push_back(g);
    e.status.push_back(static_cast<MarkerStatus>(get<std::uint8_t>(in)));
    e.t_exit.push_back(get<double>(in));
    if (has_j) {
      Mat6 J;
      for (int k = 0; k < 36; ++k) J.data()[k] = get<double>(in);
      e.J.push_back(J);
    }
  }
  cfg_.tangent_maps = has_j;
  ens_ = std::move(e);
  compute_acceleration();
}

}  // namespace vpw

namespace vpw {

double total_energy(const Ensemble& e, const GreenKernel& k, double lambda) {
  double kin = 0.0, pot = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e.status[i] == MarkerStatus::Absorbed) continue;
    kin += 0.5 * e.q[i] * e.v[i].squaredNorm();
    for (std::size_t j = i + 1; j < e.size(); ++j)
      if (e.status[j] != MarkerStatus::Absorbed) pot += e.q[i] * e.q[j] * k.value(e.x[i], e.x[j]);
  }
  return kin + lambda * pot;
}

}  // namespace vpw
