#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "mineplan/errors.hpp"
#include "mineplan/feasibility.hpp"
#include "mineplan/generator.hpp"
#include "mineplan/model.hpp"
#include "mineplan/solver.hpp"

using namespace mineplan;
using namespace mineplan::testing;

namespace {

Instance Micro(std::uint64_t seed = 7) {
  GenConfig c = preset("micro");
  return generate_instance(c, seed);
}

FixSet AllBinaries(const ModelHandle& m, const std::vector<double>& values) {
  FixSet fs;
  for (const VarKey& k : m.integer_keys()) fs.set(k, std::round(values[m.require_column(k)]));
  return fs;
}

}  // namespace

TEST_CASE("variable count of the one-block model") {
  const Instance inst(Minimal());
  const ModelHandle m = build_model(inst, 1, 1);
  const int arcs = static_cast<int>(inst.pit(0).network.arcs.size());
  CHECK(arcs == 1);
  CHECK(m.num_columns() == 1 + 1 + 1 + arcs + 1 + 1);
  CHECK(m.integer_keys().size() == 4);
}

TEST_CASE("bad period ranges and zero tonnage") {
  const Instance inst = Micro();
  CHECK_THROWS_AS(build_model(inst, 0, 2), RangeError);
  CHECK_THROWS_AS(build_model(inst, 2, 1), RangeError);
  CHECK_THROWS_AS(build_model(inst, 1, 4), RangeError);
  CHECK_THROWS_AS(build_model(inst, 2, 3, RelaxSpec{{1}}), RangeError);
}

TEST_CASE("fully relaxed model equals its LP relaxation") {
  const Instance inst = Micro();
  const ModelHandle m = build_model(inst, 1, 3, RelaxSpec{{1, 2, 3}});
  CHECK(m.integer_keys().empty());
  const auto mip = solve(m, {});
  const auto lp = solve_lp_relaxation(m, {});
  REQUIRE(mip.has_incumbent());
  CHECK(*mip.objective == doctest::Approx(*lp.objective).epsilon(1e-9));
}

TEST_CASE("apply and clear fixes") {
  const Instance inst = Micro();
  ModelHandle m = build_model(inst, 1, 3);
  const auto free_opt = solve(m, {});
  REQUIRE(free_opt.status == SolveStatus::kOptimal);

  FixSet fs;
  const VarKey z1{VarKind::kZ, 0, 0, 1};
  fs.set(z1, 1.0);
  m.apply_fixes(fs);
  const int c = m.require_column(z1);
  CHECK(m.lp().col_lower[c] == 1.0);
  const auto fixed = solve(m, {});
  REQUIRE(fixed.has_incumbent());
  CHECK(fixed.value(m, z1) == doctest::Approx(1.0));

  m.clear_fixes();
  CHECK(m.num_fixed() == 0);
  CHECK(m.lp().col_lower[c] == 0.0);
  CHECK(*solve(m, {}).objective == doctest::Approx(*free_opt.objective).epsilon(1e-9));

  FixSet unknown;
  unknown.set({VarKind::kZ, 99, 0, 1}, 1.0);
  CHECK_THROWS_AS(m.apply_fixes(unknown), UnknownVariable);
}

TEST_CASE("re-solving with all binaries fixed keeps the objective") {
  const Instance inst = generate_instance(preset("micro"), 3);
  ModelHandle m = build_model(inst, 1, inst.periods());
  SolveParams p;
  p.mip_gap = 0.0;
  const auto opt = solve(m, p);
  REQUIRE(opt.status == SolveStatus::kOptimal);
  m.apply_fixes(AllBinaries(m, *opt.values));
  const auto again = solve(m, p);
  CHECK(*again.objective == doctest::Approx(*opt.objective).epsilon(1e-6));
}

TEST_CASE("warm start") {
  const Instance inst = Micro();
  ModelHandle m = build_model(inst, 1, 3);
  const auto opt = solve(m, {});
  const Solution sol = m.to_solution(*opt.values);

  m.apply_fixes(AllBinaries(m, *opt.values));
  m.warm_start(sol);
  const auto fixed = solve(m, {});
  CHECK(fixed.status == SolveStatus::kOptimal);
  CHECK(*fixed.objective >= sol.objective - 1e-6);
  m.clear_fixes();

  Solution junk = Solution::Zeros(inst);
  for (auto& s : junk.z) std::fill(s.begin(), s.end(), 1.0);  // violates y <= x <= z links
  m.warm_start(junk);
  CHECK(solve(m, {}).status == SolveStatus::kOptimal);

  Solution wrong = Solution::Zeros(inst);
  wrong.x.pop_back();
  CHECK_THROWS_AS(m.warm_start(wrong), DimensionMismatch);
}

TEST_CASE("contradictory fixes are infeasible") {
  InstanceData d = Shell(2, 10.0, 100.0);
  d.blocks.push_back(MakeBlock("a", 0, 10.0, 1.0));
  d.blocks.push_back(MakeBlock("b", 1, 10.0, 1.0));
  d.precedences.push_back({"a", "b"});
  const Instance inst(d);
  ModelHandle m = build_model(inst, 1, 2);
  FixSet fs;
  fs.set({VarKind::kZ, 0, 0, 1}, 1.0);
  fs.set({VarKind::kY, 1, 0, 1}, 0.0);
  m.apply_fixes(fs);
  CHECK(solve(m, {}).status == SolveStatus::kInfeasible);
}

TEST_CASE("micro optimum equals the enumeration oracle") {
  for (std::uint64_t seed : {1, 7}) {
    const Instance inst = Micro(seed);
    const ModelHandle m = build_model(inst, 1, inst.periods());
    SolveParams p;
    p.mip_gap = 0.0;
    const auto mip = solve(m, p);
    const double oracle = oracle_optimum(inst);
    CHECK(*mip.objective == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(*solve_lp_relaxation(m, p).objective >= oracle - 1e-6);
  }
}

TEST_CASE("blending instance solves validator-clean") {
  GenConfig cfg = preset("ot-like");
  cfg.blocks_per_pit = 6;
  cfg.periods = 4;
  const Instance inst = generate_instance(cfg, 5);
  REQUIRE(inst.num_pits() == 2);
  const ModelHandle m = build_model(inst, 1, inst.periods());
  const auto res = solve(m, {});
  REQUIRE(res.status == SolveStatus::kOptimal);
  const Solution sol = m.to_solution(*res.values);
  const auto report = validate(inst, sol, 1e-5);
  CHECK(report.clean());
  CHECK(npv(inst, sol) == doctest::Approx(*res.objective).epsilon(1e-6));
  CHECK(m.violations(*res.values, 1e-5).empty());
}

TEST_CASE("history fixes pin earlier periods") {
  const Instance inst = Micro();
  const ModelHandle full = build_model(inst, 1, 3);
  const Solution sol = full.to_solution(*solve(full, {}).values);
  const FixSet fs = fix_periods(inst, sol, 1, 1);
  for (const auto& [k, v] : fs.assignments) CHECK(k.period == 1);
  ModelHandle tail = build_model(inst, 2, 3);
  tail.apply_fixes(fs);
  const auto res = solve(tail, {});
  REQUIRE(res.has_incumbent());
  CHECK(res.value(tail, {VarKind::kX, 0, 0, 1}) == doctest::Approx(sol.x[0][0]));
}

TEST_CASE("solve parameter invariants") {
  SolveParams p;
  p.mip_gap = -1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = SolveParams{};
  p.time_limit = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = SolveParams{};
  p.threads = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK_THROWS_AS(make_session("cplex"), BackendError);
  CHECK(relative_gap(100.0, 101.0) == doctest::Approx(0.01));
}
