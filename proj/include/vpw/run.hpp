#pragma once

#include <string>
#include <vector>

#include "vpw/asymptotics.hpp"
#include "vpw/config.hpp"

namespace vpw {

struct SeriesRow {
  double t = 0.0;
  double sup_phi = 0.0, sup_E = 0.0, sup_gradE = 0.0;
  double S00 = 0.0, S44 = 0.0, S44_in_domain = 0.0;
  double cone_exterior_mass = 0.0;
  double S_Z = 0.0, S_W = 0.0, det_dev = 0.0;
  double grazing_events = 0.0, absorbed_charge = 0.0, source_charge = 0.0, reentries = 0.0;
};

struct Checkpoint {
  int k = 0;
  double t = 0.0;
  Ensemble ens;
};

struct RunOptions {
  bool write = true;
  std::string restart;  // state file to resume from
  std::size_t calibration_samples = 20000;
  bool verbose = false;
};

struct RunResult {
  Scenario scenario;
  Softening softening;
  double c_star = 1.0;
  std::vector<SeriesRow> series;
  std::vector<Checkpoint> checkpoints;
  EinfTracker einf;
  Counters counters;
  Ensemble final_state;
  double t_final = 0.0;
  double seconds = 0.0;
};

// Series sample times: 0, 2^(j/p) up to t_end, and the checkpoints.
std::vector<double> series_times(const RunConfig& cfg);

// The softening and C_* the run would use for this ensemble.
Softening resolve_softening(const Scenario& s, const Ensemble& e);
double resolve_c_star(const Scenario& s, const Ensemble& e, const Softening& soft, std::size_t n_samples);

RunResult simulate(const Scenario& s, const RunOptions& opt = {});

struct AsymptoticsReport {
  std::vector<double> t1, t2, drift_shifted, drift_unshifted, good_fraction;
  std::vector<double> collapse_t, collapse_mass;
  RateFit collapse_fit;
  bool collapse_ok = false;
  std::vector<double> einf_residuals;
  double einf_relative_change = kInf;
  bool einf_converged = false;
  bool has_selfconsistency = false;
  SelfConsistency selfconsistency;
};

// soft is the run's softening; the self-consistency check softens the cone kernel by eps(t)/t at the last checkpoint.
AsymptoticsReport analyze(const Scenario& s, const std::vector<Checkpoint>& cps, const EinfTracker& einf,
                          const std::vector<SeriesRow>& series, const Softening& soft);
void write_asymptotics(const std::string& dir, const Scenario& s, const AsymptoticsReport& r, const EinfTracker& einf);

struct LoadedRun {
  Scenario scenario;
  Softening softening;
  double c_star = 1.0;
  std::vector<Checkpoint> checkpoints;
  EinfTracker einf;
  std::vector<SeriesRow> series;
};
LoadedRun load_run(const std::string& dir);

EinfTracker make_einf_tracker(const Scenario& s, const ConvexDomain& d);

}  // namespace vpw
