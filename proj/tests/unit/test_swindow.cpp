#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "mineplan/errors.hpp"
#include "mineplan/feasibility.hpp"
#include "mineplan/generator.hpp"
#include "mineplan/swindow.hpp"

using namespace mineplan;
using namespace mineplan::testing;

namespace {

// Three profitable blocks and demand only in the last period.
Instance LateDemand() {
  InstanceData d = Shell(4, 10.0, 30.0);
  d.discount = {1.0, 0.9, 0.8, 0.7};
  for (auto id : {"a", "b", "c"}) d.blocks.push_back(MakeBlock(id, 0, 10.0, 2.0));
  d.min_production_groups.push_back({{"p1"}, {0.0, 0.0, 0.0, 10.0}});
  return Instance(d);
}

}  // namespace

TEST_CASE("window schedule, step rule") {
  const auto s = window_schedule(15, 3, 1);
  REQUIRE(s.size() == 8);
  for (int k = 0; k < 7; ++k) {
    CHECK(s[k].start == 1 + 2 * k);
    CHECK(s[k].fix_through == s[k].start + 1);
  }
  CHECK(s[6] == WindowStep{13, 14});
  CHECK(s[7] == WindowStep{15, 15});

  const auto one = window_schedule(15, 1, 0);
  REQUIRE(one.size() == 15);
  for (int k = 0; k < 15; ++k) CHECK(one[k] == WindowStep{k + 1, k + 1});

  CHECK(window_schedule(4, 7, 1) == std::vector<WindowStep>{{1, 4}});
  CHECK_THROWS_AS(window_schedule(15, 2, 2), StepError);
  CHECK_THROWS_AS(window_schedule(15, 1, 1), StepError);
}

TEST_CASE("window schedule, literal rule") {
  const auto s = window_schedule(10, 4, 1, FixRule::kPaperLiteral);
  REQUIRE(s.size() == 5);
  CHECK(s[0] == WindowStep{1, 2});
  CHECK(s[4] == WindowStep{9, 10});
  CHECK_THROWS_AS(window_schedule(10, 3, 2, FixRule::kPaperLiteral), StepError);
  CHECK(ParseFixRule("paper-literal") == FixRule::kPaperLiteral);
  CHECK_THROWS_AS(ParseFixRule("x"), ConfigError);
}

TEST_CASE("config invariants") {
  SwConfig c;
  c.W = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SwConfig{};
  c.H = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SwConfig{};
  c.W = 2;
  c.O = 2;
  CHECK_THROWS_AS(c.validate(), StepError);
}

TEST_CASE("greedy-compatible instance") {
  const Instance inst = generate_instance(preset("micro"), 7);
  SwConfig c;
  c.W = 2;
  const SwResult r = run_sliding_windows(inst, c);
  CHECK(validate(inst, r.solution, 1e-5).clean());
  CHECK(r.solution.objective > 0.0);
  CHECK(r.trace.size() == window_schedule(3, 2, 1).size());
  // The last window spans the whole horizon, so its objective is the final NPV.
  CHECK(r.trace.back().objective == doctest::Approx(r.solution.objective).epsilon(1e-6));
  std::ostringstream csv;
  write_sw_trace_csv(csv, r.trace);
  CHECK(csv.str().rfind("window_start,solve_time_s,objective,status\n", 0) == 0);
}

TEST_CASE("myopic windows exhaust the reserve for late demand") {
  const Instance inst = LateDemand();
  SwConfig c;
  c.W = 2;
  c.O = 1;
  c.H = 0;
  try {
    run_sliding_windows(inst, c);
    FAIL("expected WindowInfeasible");
  } catch (const WindowInfeasible& e) {
    CHECK(e.window_start() == 3);
  }
  c.H = 2;
  const SwResult r = run_sliding_windows(inst, c);
  CHECK(validate(inst, r.solution, 1e-5).clean());
}

TEST_CASE("literal rule runs to the horizon") {
  const Instance inst = generate_instance(preset("micro"), 2);
  SwConfig c;
  c.W = 3;
  c.O = 1;
  c.fix_rule = FixRule::kPaperLiteral;
  const SwResult r = run_sliding_windows(inst, c);
  CHECK(r.trace.size() == 3);
  CHECK(validate(inst, r.solution, 1e-5).clean());
}
