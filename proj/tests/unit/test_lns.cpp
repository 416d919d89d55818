#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "mineplan/errors.hpp"
#include "mineplan/feasibility.hpp"
#include "mineplan/generator.hpp"
#include "mineplan/lns.hpp"
#include "mineplan/swindow.hpp"

using namespace mineplan;
using namespace mineplan::testing;

namespace {

Instance Chain(int n, int bench_step = 0) {
  InstanceData d = Shell(3, 10.0, 1000.0);
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) {
    ids.push_back("c" + std::to_string(i));
    d.blocks.push_back(MakeBlock(ids.back(), i * bench_step, 10.0, 1.0));
  }
  AddChain(d, ids);
  return Instance(d);
}

// Blocks with fe grades; product "ore" wants fe in [0.6, 1.0].
Instance Blend(const std::vector<double>& grades) {
  InstanceData d = Shell(2, 10.0, 1000.0);
  d.products[0].grade_windows["fe"] = {0.6, 1.0};
  for (std::size_t i = 0; i < grades.size(); ++i)
    d.blocks.push_back(MakeBlock("g" + std::to_string(i), 0, 10.0, 1.0, grades[i]));
  return Instance(d);
}

std::set<int> ClosureBrute(const Instance& inst, int b, bool up) {
  std::set<int> seen;
  std::vector<int> stack{b};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& pr : inst.data().precedences) {
      const int i = inst.block_index(pr.block), j = inst.block_index(pr.requires_block);
      const int from = up ? i : j, to = up ? j : i;
      if (from == v && seen.insert(to).second) stack.push_back(to);
    }
  }
  return seen;
}

Solution Scheduled(const Instance& inst, int b, int S, int F) {
  Solution s = Solution::Zeros(inst);
  for (int t = 1; t <= inst.periods(); ++t) {
    s.z[b][t - 1] = t >= S ? 1.0 : 0.0;
    s.y[b][t - 1] = t >= F ? 1.0 : 0.0;
    s.x[b][t - 1] = t >= F ? 1.0 : (t >= S ? 0.5 : 0.0);
  }
  return s;
}

}  // namespace

TEST_CASE("base weights") {
  InstanceData d = Shell(2, 10.0, 100.0);
  for (auto id : {"a", "b", "c", "d"}) d.blocks.push_back(MakeBlock(id, 0, 10.0, 1.0));
  AddChain(d, {"a", "b", "c"});
  const Instance inst(d);
  const auto md = base_weights(inst, FocalMethod::kMd);
  CHECK(md.weights == std::vector<double>{0.5, 0.5, 0.5, 0.0});
  CHECK(base_weights(inst, FocalMethod::kRand).weights == std::vector<double>(4, 1.0));
  CHECK_THROWS_AS(base_weights(inst, FocalMethod::kMix), ConfigError);
  CHECK_THROWS_AS(base_weights(inst, FocalMethod::kObj, 3), MissingValueElement);

  InstanceData o = Shell(1, 10.0, 1000.0);
  o.blocks.push_back(MakeBlock("x", 0, 100.0, 1.0, 0.6));
  CHECK(base_weights(Instance(o), FocalMethod::kObj).weights[0] == doctest::Approx(60.0));
}

TEST_CASE("MD weights against brute-force closures") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance inst(RandomLayered(3, 10, 0.2, seed));  // 30 blocks
    const auto w = base_weights(inst, FocalMethod::kMd).weights;
    for (int b = 0; b < inst.num_blocks(); ++b) {
      const auto n = ClosureBrute(inst, b, true).size() + ClosureBrute(inst, b, false).size();
      CHECK(w[b] == (n > 0 ? 1.0 / static_cast<double>(n) : 0.0));
    }
  }
}

TEST_CASE("restricted cones") {
  const Instance vertical = Chain(3, 1);  // every predecessor on a higher bench
  CHECK(restricted_cone_above(vertical, 0).empty());
  const Instance flat = Chain(3);
  CHECK(restricted_cone_above(flat, 0) == std::vector<int>{1, 2});
  CHECK(restricted_cone_below(flat, 2) == std::vector<int>{0, 1});
  CHECK_THROWS_AS(restricted_cone_above(flat, 9), UnknownBlock);

  const Instance inst(RandomLayered(4, 6, 0.3, 17));
  for (int b = 0; b < inst.num_blocks(); ++b) {
    std::vector<int> above, below;
    for (int j : ClosureBrute(inst, b, true))
      if (inst.bench(j) == inst.bench(b)) above.push_back(j);
    for (int j : ClosureBrute(inst, b, false))
      if (inst.bench(j) == inst.bench(b)) below.push_back(j);
    CHECK(restricted_cone_above(inst, b) == above);
    CHECK(restricted_cone_below(inst, b) == below);
  }
}

TEST_CASE("paths") {
  Rng rng(1);
  InstanceData d = Shell(1, 10.0, 100.0);
  d.blocks.push_back(MakeBlock("lone", 0, 10.0, 1.0));
  const Instance lone(d);
  CHECK(form_path(lone, base_weights(lone, FocalMethod::kRand), 0, 10, rng) == std::set<int>{0});

  const Instance chain = Chain(5);
  const auto w = base_weights(chain, FocalMethod::kMd);
  CHECK(form_path(chain, w, 2, 10, rng) == std::set<int>{0, 1, 2, 3, 4});
  CHECK(form_path(chain, w, 2, 2, rng).size() >= 2);
}

TEST_CASE("weighted sampling") {
  Rng rng(3);
  const std::vector<double> w{0.0, 1.0, 3.0};
  const std::vector<int> cand{0, 1, 2};
  int hits[3] = {0, 0, 0};
  for (int i = 0; i < 4000; ++i) ++hits[sample_weighted(w, cand, rng)];
  CHECK(hits[0] == 0);
  CHECK(hits[2] > 2 * hits[1]);
  const std::vector<double> zeros{0.0, 0.0};
  const std::vector<int> two{0, 1};
  std::set<int> seen;
  for (int i = 0; i < 100; ++i) seen.insert(sample_weighted(zeros, two, rng));
  CHECK(seen.size() == 2);
  CHECK_THROWS_AS(sample_focal(WeightVector{{0.0, 0.0}}, rng), EmptyWeightVector);
}

TEST_CASE("blending contribution") {
  const Instance inst = Blend({0.62, 0.6});
  auto c = blending_contribution(inst, 0);
  CHECK(c[{0, 0, 0}] == doctest::Approx(0.2));
  CHECK(c[{0, 0, 1}] == doctest::Approx(3.8));
  CHECK(blending_contribution(inst, 1)[{0, 0, 0}] == doctest::Approx(0.0));

  InstanceData d = Shell(1, 10.0, 100.0);
  d.products[0].grade_windows["fe"] = {0.6, 1.0};
  d.products.push_back({"other", 5.0, {{"fe", {0.1, 0.2}}}});
  d.blocks.push_back(MakeBlock("x", 0, 10.0, 1.0, 0.9));
  const auto gated = blending_contribution(Instance(d), 0);
  CHECK(gated.at({1, 0, 0}) == 0.0);
  CHECK(gated.at({1, 0, 1}) == 0.0);
}

TEST_CASE("blending mask skips harmful blocks") {
  const Instance inst = Blend({0.3, 0.3, 0.8});
  BlendingLedger ledger;
  ledger.add(inst, 0);
  CHECK(ledger.harmful(inst, 1));
  CHECK_FALSE(ledger.harmful(inst, 2));

  const Solution zero = Solution::Zeros(inst);
  const auto w = base_weights(inst, FocalMethod::kRand);
  const std::vector<Strategy> st{Strategy::kBlending};
  int bad_first = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const auto nb = form_neighbourhood(inst, zero, w, st, 2, rng);
    REQUIRE(nb.focals.size() == 2);
    if (nb.focals[0] != 2) {
      ++bad_first;
      CHECK(nb.focals[1] == 2);
    }
  }
  CHECK(bad_first > 0);
}

TEST_CASE("neighbourhood formation") {
  const Instance chain = Chain(5);
  Rng rng(4);
  const auto nb = form_neighbourhood(chain, Solution::Zeros(chain),
                                     base_weights(chain, FocalMethod::kMd), {}, 5, rng);
  CHECK(nb.blocks == std::set<int>{0, 1, 2, 3, 4});
  CHECK(nb.focals.size() == 1);

  const std::vector<Strategy> pl{Strategy::kPitLinks};
  CHECK_THROWS_AS(form_neighbourhood(chain, Solution::Zeros(chain),
                                     base_weights(chain, FocalMethod::kMd), pl, 5, rng),
                  StrategyInapplicable);
  const std::vector<Strategy> bl{Strategy::kBlending};
  CHECK_THROWS_AS(form_neighbourhood(chain, Solution::Zeros(chain),
                                     base_weights(chain, FocalMethod::kMd), bl, 5, rng),
                  StrategyInapplicable);
}

TEST_CASE("trigger mode") {
  InstanceData d = Shell(3, 10.0, 100.0);
  d.pits[0].capex_cost = 5.0;
  Pit p2 = d.pits[0];
  p2.id = "p2";
  d.pits.push_back(p2);
  for (int i = 0; i < 3; ++i) d.blocks.push_back(MakeBlock("a" + std::to_string(i), 0, 10, 1));
  for (int i = 0; i < 4; ++i)
    d.blocks.push_back(MakeBlock("b" + std::to_string(i), 0, 10, 1, 0.6, "p2"));
  const Instance inst(d);

  Solution s = Solution::Zeros(inst);
  auto start = [&](int b, int t) {
    for (int u = t; u <= 3; ++u) s.z[b][u - 1] = 1.0;
  };
  start(0, 2);
  start(1, 1);
  CHECK(trigger_blocks(inst, 0, s) == std::vector<int>{1, 0, 2});
  CHECK(trigger_blocks(inst, 1, s) == std::vector<int>{3, 4, 5, 6});
  CHECK_THROWS_AS(trigger_blocks(inst, 5, s), UnknownPit);

  const std::vector<Strategy> tr{Strategy::kTrigger};
  int pit1_first = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto nb = form_neighbourhood(inst, s, base_weights(inst, FocalMethod::kRand), tr, 3, rng);
    if (inst.pit_of_block(nb.focals.front()) == 0) {
      ++pit1_first;
      CHECK(nb.blocks == std::set<int>{0, 1, 2});
    }
  }
  CHECK(pit1_first > 0);
}

TEST_CASE("fix sets") {
  const Instance inst = Chain(3);
  const Solution zero = Solution::Zeros(inst);
  Neighbourhood all;
  all.blocks = {0, 1, 2};
  CHECK(fix_set_for(inst, zero, all, Fixing::kSD, kUnboundedUw).empty());
  CHECK(fix_set_for(inst, zero, Neighbourhood{}, Fixing::kSD, kUnboundedUw).size() ==
        2u * 3u * 3u);

  InstanceData d = Shell(15, 10.0, 100.0);
  d.blocks.push_back(MakeBlock("b", 0, 10.0, 1.0));
  const Instance long_inst(d);
  const Solution s = Scheduled(long_inst, 0, 5, 7);
  Neighbourhood one;
  one.blocks = {0};
  const FixSet fs = fix_set_for(long_inst, s, one, Fixing::kSD, 2);
  std::set<int> fixed_periods;
  for (const auto& [k, v] : fs.assignments) {
    CHECK((k.kind == VarKind::kZ || k.kind == VarKind::kY));
    fixed_periods.insert(k.period);
  }
  CHECK(fixed_periods == std::set<int>{1, 2, 10, 11, 12, 13, 14, 15});
  CHECK(fs.size() == 16);

  // Never-extracted block: window clamps to the whole horizon.
  CHECK(fix_set_for(long_inst, Solution::Zeros(long_inst), one, Fixing::kSD, 2).empty());
}

TEST_CASE("flow fixing for untouched pits") {
  GenConfig cfg = preset("pilbara-like");
  cfg.blocks_per_pit = 4;
  cfg.periods = 3;
  const Instance inst = generate_instance(cfg, 3);
  const Solution zero = Solution::Zeros(inst);
  Neighbourhood nb;
  nb.blocks = {inst.pit_blocks(0).front()};
  const FixSet sd = fix_set_for(inst, zero, nb, Fixing::kSD, kUnboundedUw);
  const FixSet sdf = fix_set_for(inst, zero, nb, Fixing::kSDF, kUnboundedUw);
  CHECK(sdf.size() > sd.size());
  for (const auto& [k, v] : sdf.assignments) {
    if (k.kind != VarKind::kF) continue;
    CHECK(inst.pit_of_block(inst.block_of_parcel(k.entity)) != 0);
  }
}

TEST_CASE("RINS fixes") {
  const Instance inst = generate_instance(preset("micro"), 5);
  const ModelHandle m = build_model(inst, 1, inst.periods());
  const auto opt = solve(m, {});
  const Solution inc = m.to_solution(*opt.values);

  SolveResult same;
  same.values = m.columns_from(inc);
  CHECK(rins_fixes(m, same, inc).size() == m.integer_keys().size());

  SolveResult half = same;
  const VarKey z{VarKind::kZ, 0, 0, inst.periods()};
  const bool started = inc.z[0][inst.periods() - 1] > 0.5;
  (*half.values)[m.require_column(z)] = 0.5;
  CHECK(rins_fixes(m, half, inc).contains(z) == false);
  CHECK(started == (inc.z[0][inst.periods() - 1] == 1.0));

  Rng rng(8);
  SolveResult noisy = same;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& v : *noisy.values)
    if (u(rng) < 0.5) v = u(rng);
  const FixSet got = rins_fixes(m, noisy, inc);
  const auto ref = m.columns_from(inc);
  std::size_t expected = 0;
  for (const VarKey& k : m.integer_keys()) {
    const int c = m.require_column(k);
    const bool agree = std::abs((*noisy.values)[c] - ref[c]) <= 1e-5;
    expected += agree;
    CHECK(got.contains(k) == agree);
    if (agree) CHECK(got.assignments.at(k) == ref[c]);
  }
  CHECK(got.size() == expected);
  CHECK_THROWS_AS(rins_fixes(m, SolveResult{}, inc), MissingValues);
}

TEST_CASE("improvement rate and termination") {
  const std::vector<double> h{2.0, 0.0, 1.0};
  CHECK(improvement_rate(h, 3) == doctest::Approx(1.0));
  CHECK(improvement_rate(std::vector<double>{0.0, 0.0}, 2) == 0.0);
  CHECK(improvement_rate(std::vector<double>{5.0}, 1) == 5.0);
  CHECK_THROWS_AS(improvement_rate({}, 0), EmptyHistory);

  TerminationMonitor mon({1000.0, 1.0, 3});
  mon.record(5.0);
  mon.record(0.0);
  CHECK_FALSE(mon.should_stop(0.0));
  mon.record(0.0);  // rate 5/3
  CHECK_FALSE(mon.should_stop(0.0));
  mon.record(0.0);  // rate 1.25
  CHECK_FALSE(mon.should_stop(0.0));
  mon.record(0.0);  // rate 1.0, not below
  CHECK_FALSE(mon.should_stop(0.0));
  mon.record(0.0);  // rate 5/6
  CHECK(mon.should_stop(0.0));
  CHECK(TerminationMonitor({10.0, 1.0, 100}).should_stop(10.0));
}

TEST_CASE("incumbent store accepts strict improvements only") {
  const Instance inst = Chain(2);
  Solution s = Solution::Zeros(inst);
  s.objective = 10.0;
  IncumbentStore store(s);
  Solution t = s;
  t.objective = 10.0;
  CHECK_FALSE(store.publish(t, 0.0, 1, 0));
  t.objective = 12.0;
  CHECK(store.publish(t, 0.0, 2, 0).value() == 10.0);
  CHECK(store.best_objective() == 12.0);
  CHECK(store.history().size() == 2);
}

TEST_CASE("worker assignment") {
  LnsConfig c;
  c.strategies = {Strategy::kTiming};
  CHECK(worker_strategy(c, 0) == Strategy::kNone);
  CHECK(worker_strategy(c, 1) == Strategy::kTiming);
  CHECK(worker_strategy(c, 2) == Strategy::kNone);
  c.focal = FocalMethod::kMix;
  CHECK(worker_focal(c, 0) == FocalMethod::kRand);
  CHECK(worker_focal(c, 1) == FocalMethod::kObj);
  CHECK(worker_focal(c, 5) == FocalMethod::kMd);
  CHECK(ParseStrategy("pitlinks") == Strategy::kPitLinks);
  CHECK_THROWS_AS(ParseFocalMethod("best"), ConfigError);
  c.nbar = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("LNS from an optimal start") {
  const Instance inst = generate_instance(preset("micro"), 7);
  const ModelHandle m = build_model(inst, 1, inst.periods());
  SolveParams p;
  p.mip_gap = 0.0;
  const Solution opt = m.to_solution(*solve(m, p).values);
  LnsConfig c;
  c.nbar = 2;
  c.term.min_iters = 4;
  const LnsResult r = run_lns(inst, opt, c);
  CHECK(r.accepted == 0);
  CHECK(r.iterations == 4);
  CHECK(r.best == [&] {
    Solution s = opt;
    s.objective = npv(inst, opt);
    return s;
  }());
}

TEST_CASE("single-worker LNS is reproducible") {
  GenConfig cfg = preset("micro");
  cfg.blocks_per_pit = 6;
  cfg.periods = 4;
  cfg.benches_per_pit = 2;
  const Instance inst = generate_instance(cfg, 12);
  SwConfig sw;
  sw.W = 1;
  sw.O = 0;
  const Solution init = run_sliding_windows(inst, sw).solution;
  LnsConfig c;
  c.nbar = 3;
  c.rins = true;
  c.seed = 5;
  c.term.min_iters = 6;
  c.term.time_limit = 1e9;
  const LnsResult a = run_lns(inst, init, c);
  const LnsResult b = run_lns(inst, init, c);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].iteration == b.trace[i].iteration);
    CHECK(a.trace[i].neighbourhood_size == b.trace[i].neighbourhood_size);
    CHECK(a.trace[i].solve_status == b.trace[i].solve_status);
    CHECK(a.trace[i].objective == b.trace[i].objective);
    CHECK(a.trace[i].accepted == b.trace[i].accepted);
  }
  CHECK(a.best == b.best);
  std::ostringstream csv;
  write_lns_trace_csv(csv, a.trace);
  CHECK(csv.str().rfind("wall_time_s,iteration,worker,strategy,neighbourhood_size,"
                        "solve_status,objective,gap_pct,accepted\n",
                        0) == 0);
}
