#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vpw/config.hpp"
#include "vpw/errors.hpp"

using namespace vpw;

TEST_CASE("minimal file fills defaults") {
  Scenario s = parse_scenario("domain.kind = halfspace\ndata.epsilon = 0.05\n");
  CHECK(s == Scenario{});
  Scenario t = parse_scenario("# comment\n[run]\nt_end = 50   # shorter\nmode = absorbing\n[data]\ncenter_x = 1, 2, 3\n");
  CHECK(t.run.t_end == 50.0);
  CHECK(t.run.mode == BoundaryMode::Absorbing);
  CHECK(t.data.center_x == Vec3(1, 2, 3));
}

TEST_CASE("unknown keys name the nearest valid key") {
  try {
    parse_scenario("\n[run]\ndt = 0.01\n");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.key == "run.dt");
    CHECK(e.line == 3);
    CHECK(std::string(e.what()).find("run.dt0") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario("data.epsilon = abc"), SchemaError);
  CHECK_THROWS_AS(parse_scenario("domain.kind = sphere"), SchemaError);
  CHECK_THROWS_AS(parse_scenario("data.center_x = 1, 2"), SchemaError);
  CHECK_THROWS_AS(parse_scenario("run.t_end"), SchemaError);
}

TEST_CASE("render round trip") {
  Scenario s;
  s.domain_kind = "corner";
  s.data.center_x = Vec3(2.0, 2.0, 0.1);
  s.data.epsilon = 0.1 / 3.0;
  s.c_star = 4.0;
  s.field.softening = 0.07;
  s.run.tangent_maps = true;
  s.run.dt0 = 1.0 / 7.0;
  s.seed = 12345678901234ULL;
  CHECK(parse_scenario(render_scenario(s)) == s);
  CHECK(parse_scenario(render_scenario(Scenario{})) == Scenario{});
  CHECK(levenshtein("run.dt", "run.dt0") == 1);
  CHECK(schema_keys().size() > 20);
}
