#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "vpw/run.hpp"

using namespace vpw;
namespace fs = std::filesystem;

namespace {

Scenario small(const std::string& dir, double t_end) {
  Scenario s;
  s.data.n_markers = 64;
  s.run.t_end = t_end;
  s.c_star = 1.0;
  s.out_dir = (fs::temp_directory_path() / dir).string();
  fs::remove_all(s.out_dir);
  return s;
}

}  // namespace

TEST_CASE("t_end = 0 writes the initial snapshot only") {
  Scenario s = small("vpw_run_t0", 0.0);
  RunResult r = simulate(s, RunOptions{});
  CHECK(r.checkpoints.size() == 1);
  CHECK(fs::exists(s.out_dir + "/markers_t0.csv"));
  CHECK(fs::exists(s.out_dir + "/state_t0.bin"));
  CHECK_FALSE(fs::exists(s.out_dir + "/markers_t1.csv"));
  CHECK(r.series.size() == 1);
}

TEST_CASE("a run directory reads back") {
  Scenario s = small("vpw_run_rt", 3.5);
  RunResult r = simulate(s, RunOptions{});
  REQUIRE(r.checkpoints.size() == 3);  // t = 0, 1.5, 3
  LoadedRun lr = load_run(s.out_dir);
  CHECK(lr.scenario == s);
  CHECK(lr.c_star == r.c_star);
  CHECK(lr.softening.c0 == doctest::Approx(r.softening.c0).epsilon(1e-15));
  CHECK(lr.softening.c1 == doctest::Approx(r.softening.c1).epsilon(1e-15));
  REQUIRE(lr.checkpoints.size() == r.checkpoints.size());
  REQUIRE(lr.series.size() == r.series.size());
  for (std::size_t k = 0; k < r.checkpoints.size(); ++k) {
    const Ensemble& a = r.checkpoints[k].ens;
    const Ensemble& b = lr.checkpoints[k].ens;
    CHECK(lr.checkpoints[k].t == r.checkpoints[k].t);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.x[i] == b.x[i]);
      CHECK(a.v[i] == b.v[i]);
      CHECK(a.status[i] == b.status[i]);
    }
  }
  for (std::size_t i = 0; i < r.series.size(); ++i) CHECK(lr.series[i].S44 == r.series[i].S44);
}

TEST_CASE("restart from a checkpoint reproduces the uninterrupted run") {
  Scenario s = small("vpw_run_full", 3.5);
  RunResult full = simulate(s, RunOptions{});
  Scenario s2 = small("vpw_run_restart", 3.5);
  RunOptions ro;
  ro.restart = s.out_dir + "/state_t1.bin";
  RunResult resumed = simulate(s2, ro);
  const Ensemble& a = full.final_state;
  const Ensemble& b = resumed.final_state;
  REQUIRE(a.size() == b.size());
  double gap = 0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, (a.x[i] - b.x[i]).norm() + (a.v[i] - b.v[i]).norm());
  CHECK(gap == 0.0);
}
