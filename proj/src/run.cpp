#include "vpw/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vpw/csv.hpp"
#include "vpw/errors.hpp"

namespace vpw {

namespace fs = std::filesystem;

std::vector<double> series_times(const RunConfig& cfg) {
  std::vector<double> t = {0.0};
  for (int j = 0;; ++j) {
    double s = std::pow(2.0, double(j) / cfg.series_per_octave);
    if (s > cfg.t_end * (1.0 + 1e-12)) break;
    t.push_back(s);
  }
  for (double c : cfg.checkpoint_times()) t.push_back(c);
  if (cfg.t_end > 0.0) t.push_back(cfg.t_end);
  std::sort(t.begin(), t.end());
  std::vector<double> out;
  for (double s : t)
    if (out.empty() || s > out.back() * (1.0 + 1e-12) + 1e-300) out.push_back(s);
  return out;
}

Softening resolve_softening(const Scenario& s, const Ensemble& e) {
  if (s.field.softening) return Softening::constant(*s.field.softening);
  NearestNeighbor nn = mean_nearest_neighbor(e);
  Softening soft = Softening::from_neighbors(nn, s.field.soft_x_factor, s.field.soft_v_factor);
  if (!(soft.c0 > 0.0)) soft.c0 = 0.05;
  return soft;
}

double resolve_c_star(const Scenario& s, const Ensemble& e, const Softening& soft, std::size_t n_samples) {
  if (s.c_star) return *s.c_star;
  if (s.lambda == 0.0) return 1.0;
  const ConvexDomain d = s.domain();
  ExtensionMap ext(FieldSolver(GreenKernel::for_domain(d, soft.c0)), ExtensionConfig::for_domain(d, 1.0, s.lambda));
  const double R = s.data.center_x.norm() + s.data.rx + 2.0;
  auto samples = sample_strip(d, ext.config().delta_star, 3.0, R, n_samples, s.seed ^ 0x5157);
  auto src_at = [&](double t) {
    SourceSet src;
    for (std::size_t i = 0; i < e.size(); ++i) {
      Vec3 y = e.x[i] + t * e.v[i];
      if (e.status[i] == MarkerStatus::InDomain && d.b(y) > 0.0) {
        src.y.push_back(y);
        src.q.push_back(e.q[i]);
      }
    }
    return src;
  };
  return calibrate_c_star(ext, src_at, {0.0, 1.0, 10.0, 100.0}, samples);
}

EinfTracker make_einf_tracker(const Scenario& s, const ConvexDomain& d) {
  return EinfTracker(a_grid(d, s.field.agrid_lo, s.field.agrid_hi, s.field.agrid_step), s.field.agrid_lo,
                     s.field.agrid_hi, s.field.agrid_step);
}

namespace {

void write_markers(const std::string& path, const Scenario& s, const Ensemble& e) {
  CsvWriter w(path, "markers", s.seed, {"id", "x1", "x2", "x3", "v1", "v2", "v3", "mu0", "charge", "status"});
  for (std::size_t i = 0; i < e.size(); ++i)
    w.row(std::vector<std::string>{std::to_string(i), csv_num(e.x[i](0)), csv_num(e.x[i](1)), csv_num(e.x[i](2)),
                                   csv_num(e.v[i](0)), csv_num(e.v[i](1)), csv_num(e.v[i](2)), csv_num(e.mu0[i]),
                                   csv_num(e.q[i]), status_name(e.status[i])});
}

Ensemble read_markers(const std::string& path) {
  CsvTable t = read_csv(path);
  Ensemble e;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    e.x.emplace_back(t.num(r, "x1"), t.num(r, "x2"), t.num(r, "x3"));
    e.v.emplace_back(t.num(r, "v1"), t.num(r, "v2"), t.num(r, "v3"));
    e.mu0.push_back(t.num(r, "mu0"));
    e.q.push_back(t.num(r, "charge"));
    const std::string& st = t.rows[r][t.col("status")];
    e.status.push_back(st == "in_domain" ? MarkerStatus::InDomain
                                         : st == "exterior" ? MarkerStatus::Exterior : MarkerStatus::Absorbed);
  }
  return e;
}

void write_fields(const std::string& path, const Scenario& s, const FieldSnapshot& f) {
  std::vector<std::string> cols = {"x1", "x2", "x3", "phi", "E1", "E2", "E3"};
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) cols.push_back("dE" + std::to_string(i) + std::to_string(j));
  CsvWriter w(path, "fields", s.seed, cols);
  for (std::size_t p = 0; p < f.probes.size(); ++p) {
    const FieldSample& v = f.values[p];
    std::vector<double> row = {f.probes[p](0), f.probes[p](1), f.probes[p](2), v.phi, v.E(0), v.E(1), v.E(2)};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) row.push_back(v.gradE(i, j));
    w.row(row);
  }
}

const std::vector<std::string> kSeriesCols = {"t",       "sup_phi",       "sup_E",
                                              "sup_gradE", "S00",         "S44",
                                              "S44_in_domain", "cone_exterior_mass", "S_Z",
                                              "S_W",     "det_dev",       "grazing_events",
                                              "absorbed_charge", "source_charge", "reentries"};

void write_series(const std::string& path, const Scenario& s, const std::vector<SeriesRow>& rows) {
  CsvWriter w(path, "series", s.seed, kSeriesCols);
  for (const SeriesRow& r : rows)
    w.row({r.t, r.sup_phi, r.sup_E, r.sup_gradE, r.S00, r.S44, r.S44_in_domain, r.cone_exterior_mass, r.S_Z, r.S_W,
           r.det_dev, r.grazing_events, r.absorbed_charge, r.source_charge, r.reentries});
}

std::vector<SeriesRow> read_series(const std::string& path) {
  CsvTable t = read_csv(path);
  std::vector<SeriesRow> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    SeriesRow s;
    double* f[] = {&s.t,   &s.sup_phi, &s.sup_E,  &s.sup_gradE, &s.S00, &s.S44, &s.S44_in_domain, &s.cone_exterior_mass,
                   &s.S_Z, &s.S_W,     &s.det_dev, &s.grazing_events, &s.absorbed_charge, &s.source_charge,
                   &s.reentries};
    for (std::size_t c = 0; c < kSeriesCols.size(); ++c) *f[c] = t.num(r, kSeriesCols[c]);
    out.push_back(s);
  }
  return out;
}

void write_einf(const std::string& path, const Scenario& s, const EinfTracker& tr) {
  CsvWriter w(path, "einf", s.seed, {"k", "t", "a1", "a2", "a3", "E1", "E2", "E3", "residual"});
  std::vector<double> res = tr.residuals();
  for (std::size_t k = 0; k < tr.history().size(); ++k) {
    double r = k == 0 ? std::nan("") : res[k - 1];
    for (std::size_t p = 0; p < tr.grid().size(); ++p) {
      const Vec3& a = tr.grid()[p];
      const Vec3& E = tr.history()[k][p];
      w.row({double(k + 1), tr.times()[k], a(0), a(1), a(2), E(0), E(1), E(2), r});
    }
  }
}

}  // namespace

RunResult simulate(const Scenario& s, const RunOptions& opt) {
  auto t_start = std::chrono::steady_clock::now();
  const ConvexDomain d = s.domain();
  RunResult res;
  res.scenario = s;
  if (opt.write) {
    fs::create_directories(s.out_dir);
    std::ofstream(s.out_dir + "/resolved_config.txt") << "# vpw resolved_config v" << kCsvSchemaVersion
                                                       << " seed=" << s.seed << "\n"
                                                       << render_scenario(s);
  }

  Ensemble e0 = sample_initial(s.data, d, s.seed);
  res.softening = resolve_softening(s, e0);
  res.c_star = resolve_c_star(s, e0, res.softening, opt.calibration_samples);
  if (opt.write) {
    CsvWriter w(s.out_dir + "/run_info.csv", "run_info", s.seed, {"soft_c0", "soft_c1", "c_star", "n_markers"});
    w.row({res.softening.c0, res.softening.c1, res.c_star, double(e0.size())});
  }
  GreenKernel kernel = GreenKernel::for_domain(d);
  Propagator prop(kernel, ExtensionConfig::for_domain(d, res.c_star, s.lambda), res.softening, s.run);
  prop.init(e0);
  if (!opt.restart.empty()) prop.load(opt.restart);

  const std::vector<Vec3> probes =
      fixed_probe_grid(d, s.field.probe_rmin, s.field.probe_rmax, s.field.probe_ratio, s.field.probe_dirs);
  res.einf = make_einf_tracker(s, d);
  const std::vector<double> cps = s.run.checkpoint_times();
  std::vector<double> times = series_times(s.run);

  auto record = [&](double t) {
    SeriesRow r;
    r.t = t;
    const Ensemble& e = prop.ensemble();
    FieldSolver fsol = prop.solver_at(t);
    SourceSet src = prop.sources();
    if (!src.y.empty()) {
      std::vector<FieldSample> f = fsol.evaluate(src, probes, true);
      for (const FieldSample& v : f) {
        r.sup_phi = std::max(r.sup_phi, std::abs(v.phi));
        r.sup_E = std::max(r.sup_E, v.E.norm());
        r.sup_gradE = std::max(r.sup_gradE, v.gradE.norm());
      }
    }
    r.S00 = moment_sup(e, t, 0, 0);
    r.S44 = moment_sup(e, t, 4, 4);
    r.S44_in_domain = moment_sup(e, t, 4, 4, MomentScope::InDomain);
    r.cone_exterior_mass = cone_exterior_mass(e, d);
    if (!e.J.empty()) {
      Derivatives dv = prop.derivatives();
      r.S_Z = dv.S_Z;
      r.S_W = dv.S_W;
      r.det_dev = dv.max_det_dev;
    }
    r.grazing_events = double(prop.counters().grazing_events);
    r.absorbed_charge = e.charge_with(MarkerStatus::Absorbed);
    double sc = 0.0;
    for (double q : src.q) sc += q;
    r.source_charge = sc;
    r.reentries = double(prop.counters().reentries);
    res.series.push_back(r);
  };

  auto checkpoint = [&](int k, double t) {
    res.checkpoints.push_back({k, t, prop.ensemble()});
    if (!opt.write && k == 0) return;
    FieldSolver fsol = prop.solver_at(t);
    SourceSet src = prop.sources();
    if (k > 0) {
      std::vector<Vec3> xs;
      for (const Vec3& a : res.einf.grid()) xs.push_back(t * a);
      std::vector<FieldSample> f = fsol.evaluate(src, xs, false);
      std::vector<Vec3> t2E(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) t2E[i] = t * t * f[i].E;
      res.einf.add(t, std::move(t2E));
    }
    if (opt.write) {
      const std::string tag = std::to_string(k);
      write_markers(s.out_dir + "/markers_t" + tag + ".csv", s, prop.ensemble());
      write_fields(s.out_dir + "/fields_t" + tag + ".csv", s, fsol.snapshot(src, t, probes, true));
      prop.save(s.out_dir + "/state_t" + tag + ".bin");
    }
  };

  try {
    if (prop.t() == 0.0) {
      record(0.0);
      checkpoint(0, 0.0);
    }
    std::size_t ci = 0;
    while (ci < cps.size() && cps[ci] <= prop.t()) ++ci;
    for (double t : times) {
      if (t <= prop.t()) continue;
      prop.advance_to(t);
      record(t);
      if (ci < cps.size() && std::abs(cps[ci] - t) <= 1e-12 * t) {
        checkpoint(static_cast<int>(ci) + 1, t);
        ++ci;
      }
      if (opt.verbose) std::fprintf(stderr, "t = %g  steps = %llu\n", t, (unsigned long long)prop.counters().steps);
    }
  } catch (...) {
    if (opt.write) {
      write_series(s.out_dir + "/series.csv", s, res.series);
      write_einf(s.out_dir + "/einf.csv", s, res.einf);
    }
    throw;
  }
  if (opt.write) {
    write_series(s.out_dir + "/series.csv", s, res.series);
    write_einf(s.out_dir + "/einf.csv", s, res.einf);
  }
  res.counters = prop.counters();
  res.final_state = prop.ensemble();
  res.t_final = prop.t();
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

AsymptoticsReport analyze(const Scenario& s, const std::vector<Checkpoint>& cps, const EinfTracker& einf,
                          const std::vector<SeriesRow>& series, const Softening& soft) {
  AsymptoticsReport r;
  const ConvexDomain d = s.domain();
  std::vector<ScatterProfile> prof;
  for (const Checkpoint& c : cps)
    if (c.t > 1.0) prof.push_back(scatter_profile(c.ens, d, c.t, s.lambda, &einf, s.z_radius));
  for (std::size_t k = 0; k + 1 < prof.size(); ++k) {
    r.t1.push_back(prof[k].t);
    r.t2.push_back(prof[k + 1].t);
    double ds = std::nan(""), du = std::nan("");
    try {
      ds = scattering_drift(prof[k], prof[k + 1], true);
      du = scattering_drift(prof[k], prof[k + 1], false);
    } catch (const EmptyGoodSet&) {
    }
    r.drift_shifted.push_back(ds);
    r.drift_unshifted.push_back(du);
    r.good_fraction.push_back(prof[k + 1].good_fraction());
  }
  for (const SeriesRow& row : series)
    if (row.t >= 10.0 && row.t <= 200.0) {
      r.collapse_t.push_back(row.t);
      r.collapse_mass.push_back(row.cone_exterior_mass);
    }
  try {
    r.collapse_fit = rate_fit(r.collapse_t, r.collapse_mass);
    r.collapse_ok = true;
  } catch (const Error&) {
  }
  if (!einf.empty()) {
    r.einf_residuals = einf.residuals();
    r.einf_relative_change = einf.relative_change();
    r.einf_converged = einf.converged();
    if (d.kind() != DomainKind::Graph && !prof.empty()) {
      const double tl = einf.times().back();
      GreenKernel cone = GreenKernel::for_domain(d, soft.at(tl) / tl);
      r.selfconsistency = einf_selfconsistency(prof.back(), cone, einf.grid(), einf.latest());
      r.has_selfconsistency = true;
    }
  }
  return r;
}

void write_asymptotics(const std::string& dir, const Scenario& s, const AsymptoticsReport& r, const EinfTracker& einf) {
  fs::create_directories(dir);
  {
    CsvWriter w(dir + "/scattering.csv", "scattering", s.seed,
                {"t1", "t2", "drift_shifted", "drift_unshifted", "good_fraction"});
    for (std::size_t k = 0; k < r.t1.size(); ++k)
      w.row({r.t1[k], r.t2[k], r.drift_shifted[k], r.drift_unshifted[k], r.good_fraction[k]});
  }
  {
    CsvWriter w(dir + "/collapse.csv", "collapse", s.seed, {"t", "mass", "fit_slope", "fit_intercept", "fit_r2"});
    for (std::size_t k = 0; k < r.collapse_t.size(); ++k)
      w.row({r.collapse_t[k], r.collapse_mass[k], r.collapse_fit.slope, r.collapse_fit.intercept, r.collapse_fit.r2});
  }
  if (r.has_selfconsistency) {
    CsvWriter w(dir + "/einf_check.csv", "einf_check", s.seed,
                {"a1", "a2", "a3", "Einf1", "Einf2", "Einf3", "rhs1", "rhs2", "rhs3", "rel_sup_error"});
    for (std::size_t p = 0; p < einf.grid().size(); ++p) {
      const Vec3& a = einf.grid()[p];
      const Vec3& E = einf.latest()[p];
      const Vec3& R = r.selfconsistency.rhs[p];
      w.row({a(0), a(1), a(2), E(0), E(1), E(2), R(0), R(1), R(2), r.selfconsistency.rel_sup_error});
    }
  }
}

LoadedRun load_run(const std::string& dir) {
  LoadedRun lr;
  lr.scenario = load_scenario(dir + "/resolved_config.txt");
  const ConvexDomain d = lr.scenario.domain();
  lr.series = read_series(dir + "/series.csv");
  {
    CsvTable info = read_csv(dir + "/run_info.csv");
    lr.softening = {info.num(0, "soft_c0"), info.num(0, "soft_c1")};
    lr.c_star = info.num(0, "c_star");
  }
  std::vector<double> cps = lr.scenario.run.checkpoint_times();
  for (int k = 0;; ++k) {
    std::string p = dir + "/markers_t" + std::to_string(k) + ".csv";
    if (!fs::exists(p)) break;
    lr.checkpoints.push_back({k, k == 0 ? 0.0 : cps.at(k - 1), read_markers(p)});
  }
  lr.einf = make_einf_tracker(lr.scenario, d);
  CsvTable t = read_csv(dir + "/einf.csv");
  const std::size_t ng = lr.einf.grid().size();
  if (ng > 0 && t.rows.size() % ng != 0) throw FormatError("einf.csv does not match the a-grid");
  for (std::size_t base = 0; ng > 0 && base < t.rows.size(); base += ng) {
    std::vector<Vec3> E(ng);
    for (std::size_t p = 0; p < ng; ++p) E[p] = Vec3(t.num(base + p, "E1"), t.num(base + p, "E2"), t.num(base + p, "E3"));
    lr.einf.add(t.num(base, "t"), std::move(E));
  }
  return lr;
}

}  // namespace vpw
