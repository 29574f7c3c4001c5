#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "vpw/acceptance.hpp"
#include "vpw/errors.hpp"
#include "vpw/run.hpp"
#include "vpw/verify.hpp"

using namespace vpw;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
  bool quick = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "scenario file");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--seed", c.seed, "seed (overrides the scenario)");
  app->add_option("--threads", c.threads, "worker thread cap");
  app->add_flag("--quick", c.quick, "reduced sample counts");
}

Scenario scenario_from(const Common& c, CLI::App* app) {
  Scenario s = c.config.empty() ? Scenario{} : load_scenario(c.config);
  if (app->count("--seed")) s.seed = c.seed;
  if (!c.out.empty()) s.out_dir = c.out;
  return s;
}

void apply_threads(const Common& c) {
#ifdef _OPENMP
  if (c.threads > 0) omp_set_num_threads(c.threads);
#else
  (void)c;
#endif
}

// Prints each row and returns the exit status.
int report(const std::vector<CheckResult>& rows) {
  int status = 0;
  for (const CheckResult& r : rows) {
    std::printf("%-4s %-36s %-12s n=%-9llu value=%.6g threshold=%.6g\n", r.pass ? "PASS" : "FAIL", r.check.c_str(),
                r.geometry.c_str(), (unsigned long long)r.n, r.value, r.threshold);
    if (!r.pass && status == 0) {
      std::fprintf(stderr, "first failing check: %s (%s)\n", r.check.c_str(), r.geometry.c_str());
      status = 1;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vlasov-Poisson with a conducting wall: simulation and verification"};
  app.require_subcommand(1);

  Common sim_c, asy_c, geo_c, grn_c, ext_c, acc_c;
  std::string restart, run_dir, geometry = "halfspace", check = "all";
  std::uint64_t samples = 0;
  bool verbose = false;

  CLI::App* sim = app.add_subcommand("simulate", "run a scenario");
  add_common(sim, sim_c);
  sim->add_option("--restart", restart, "state file to resume from");
  sim->add_flag("-v,--verbose", verbose, "progress on stderr");

  CLI::App* asy = app.add_subcommand("asymptotics", "scattering, collapse and E_inf reports for a run directory");
  add_common(asy, asy_c);
  asy->add_option("--run", run_dir, "run directory (default: --out)");

  CLI::App* geo = app.add_subcommand("verify-geometry", "geometric invariant suite");
  add_common(geo, geo_c);

  CLI::App* grn = app.add_subcommand("verify-green", "Green function estimate suite");
  add_common(grn, grn_c);
  grn->add_option("--geometry", geometry, "halfspace | corner | paraboloid | hyperboloid");
  grn->add_option("--check", check, "quantegc | quanteg0 | halfgreen1 | compgf0 | t1hyp | ext-flux | corner-log | poisson | all");
  grn->add_option("--samples", samples, "pair count for the sampled checks");

  CLI::App* ext = app.add_subcommand("verify-extension", "extension map invariants");
  add_common(ext, ext_c);

  CLI::App* acc = app.add_subcommand("all-acceptance", "run the acceptance criteria");
  add_common(acc, acc_c);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      apply_threads(sim_c);
      Scenario s = scenario_from(sim_c, sim);
      RunOptions opt;
      opt.restart = restart;
      opt.verbose = verbose;
      if (sim_c.quick) opt.calibration_samples = 4000;
      RunResult r = simulate(s, opt);
      std::printf("t = %g, steps = %llu, rejections = %llu, reentries = %llu, C_* = %g, %.1f s\n", r.t_final,
                  (unsigned long long)r.counters.steps, (unsigned long long)r.counters.rejections,
                  (unsigned long long)r.counters.reentries, r.c_star, r.seconds);
      return 0;
    }
    if (*asy) {
      apply_threads(asy_c);
      std::string dir = !run_dir.empty() ? run_dir : (!asy_c.out.empty() ? asy_c.out : "out");
      std::string out = !asy_c.out.empty() ? asy_c.out : dir;
      LoadedRun lr = load_run(dir);
      AsymptoticsReport r = analyze(lr.scenario, lr.checkpoints, lr.einf, lr.series, lr.softening);
      write_asymptotics(out, lr.scenario, r, lr.einf);
      for (std::size_t k = 0; k < r.t1.size(); ++k)
        std::printf("[%g, %g]  drift shifted %.4g  unshifted %.4g  good %.3f\n", r.t1[k], r.t2[k], r.drift_shifted[k],
                    r.drift_unshifted[k], r.good_fraction[k]);
      if (r.collapse_ok)
        std::printf("collapse slope %.4f  R^2 %.4f\n", r.collapse_fit.slope, r.collapse_fit.r2);
      std::printf("E_inf relative change %.4g  converged %d\n", r.einf_relative_change, int(r.einf_converged));
      if (r.has_selfconsistency) std::printf("E_inf self-consistency %.4g\n", r.selfconsistency.rel_sup_error);
      return 0;
    }
    if (*geo) {
      apply_threads(geo_c);
      Scenario s = scenario_from(geo_c, geo);
      GeometrySuiteOptions opt;
      opt.seed = s.seed;
      if (geo_c.quick) {
        opt.n_samples = 10000;
        opt.n_escape = 100000;
        opt.n_fraction = 50000;
      }
      std::vector<CheckResult> rows = verify_geometry(s.domain(), opt);
      std::filesystem::create_directories(s.out_dir);
      write_geometry_report(s.out_dir + "/geometry_report.csv", s.seed, rows);
      return report(rows);
    }
    if (*grn) {
      apply_threads(grn_c);
      Scenario s = scenario_from(grn_c, grn);
      if (!grn->count("--geometry")) geometry = s.domain_kind;
      if (samples == 0) samples = grn_c.quick ? 10000 : 100000;
      std::vector<CheckResult> rows = verify_green(ConvexDomain::from_name(geometry, s.kappa), check, samples, s.seed);
      std::filesystem::create_directories(s.out_dir);
      write_green_report(s.out_dir + "/green_report.csv", s.seed, rows);
      return report(rows);
    }
    if (*ext) {
      apply_threads(ext_c);
      Scenario s = scenario_from(ext_c, ext);
      ExtensionSuiteOptions opt;
      if (ext_c.quick) {
        opt.n_strip = 10000;
        opt.n_interior = 2000;
        opt.n_markers = std::min<std::size_t>(s.data.n_markers, 1000);
      }
      std::vector<CheckResult> rows = verify_extension(s, opt);
      std::filesystem::create_directories(s.out_dir);
      write_extension_report(s.out_dir + "/extension_report.csv", s.seed, rows);
      return report(rows);
    }
    if (*acc) {
      apply_threads(acc_c);
      AcceptanceOptions opt;
      opt.quick = acc_c.quick;
      if (!acc_c.config.empty()) opt.scenario = load_scenario(acc_c.config);
      opt.seed = acc->count("--seed") ? acc_c.seed : (opt.scenario ? opt.scenario->seed : 1);
      opt.out_dir = !acc_c.out.empty() ? acc_c.out : "acceptance_out";
      std::vector<CriterionResult> rows = run_acceptance(opt, std::cout);
      for (const CriterionResult& r : rows)
        if (!r.pass) {
          std::fprintf(stderr, "first failing criterion: %d %s\n", r.id, r.name.c_str());
          return 1;
        }
      return 0;
    }
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
