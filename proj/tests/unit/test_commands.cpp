#include <sstream>

#include "doctest.h"
#include "mineplan/commands.hpp"
#include "mineplan/errors.hpp"
#include "mineplan/feasibility.hpp"
#include "mineplan/generator.hpp"

using namespace mineplan;

TEST_CASE("grid parsing") {
  const auto g = parse_grid({"W=1..3", "H=0,2", "fixing=sd,sdf"});
  REQUIRE(g.size() == 3);
  CHECK(g[0].values == std::vector<std::string>{"1", "2", "3"});
  CHECK(g[1].values == std::vector<std::string>{"0", "2"});
  CHECK(expand_grid(g).size() == 12);
  CHECK(expand_grid(g)[1] ==
        std::vector<std::pair<std::string, std::string>>{{"W", "1"}, {"H", "0"}, {"fixing", "sdf"}});
  CHECK_THROWS_AS(parse_grid({"W"}), ConfigError);
  CHECK_THROWS_AS(parse_grid({"W=3..1"}), ConfigError);
  CHECK_THROWS_AS(parse_grid({"W=1", "W=2"}), ConfigError);
  CHECK_THROWS_AS(apply_cell(RunConfig{}, {{"Q", "1"}}), ConfigError);
}

TEST_CASE("flag parsing") {
  CHECK(parse_uw("inf") == kUnboundedUw);
  CHECK(parse_uw("3") == 3);
  CHECK_THROWS_AS(parse_uw("-2"), ConfigError);
  CHECK(parse_strategies("all").size() == 4);
  CHECK(parse_strategies("timing,none") ==
        std::vector<Strategy>{Strategy::kTiming, Strategy::kNone});
  CHECK(parse_strategies("blending+timing").size() == 2);
  CHECK(ParseBoundSource("oracle") == BoundSource::kOracle);
  CHECK_THROWS_AS(ParseBoundSource("guess"), ConfigError);
  RunConfig c;
  c.bound_from = BoundSource::kFile;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("gap with solver noise") {
  CHECK(gap_or_zero(100.0 + 1e-6, 100.0) == 0.0);
  CHECK(gap_or_zero(90.0, 100.0) == doctest::Approx(10.0));
  CHECK_THROWS_AS(gap_or_zero(101.0, 100.0), InvalidBound);
}

TEST_CASE("sliding-windows sweep marks invalid steps") {
  const Instance inst = generate_instance(preset("micro"), 7);
  RunConfig cfg;
  const auto rows = sweep_sw(inst, cfg, parse_grid({"W=1..2", "O=0..2"}), oracle_optimum(inst));
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    const int w = std::stoi(r.params[0].second);
    const int o = std::stoi(r.params[1].second);
    CHECK(r.marked() == (w - o < 1));
    if (!r.marked()) CHECK(r.runs.size() == 1);
  }
  std::ostringstream csv;
  write_summary_csv(csv, rows);
  const std::string text = csv.str();
  CHECK(text.rfind("W,O,avg_gap,min_gap,max_gap,avg_time,min_time,max_time,status\n", 0) == 0);
  CHECK(text.find("1,1,--,--,--,--,--,--,invalid") != std::string::npos);
}
