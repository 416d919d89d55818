#include <algorithm>
#include <filesystem>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "mineplan/errors.hpp"
#include "mineplan/generator.hpp"
#include "mineplan/instance.hpp"
#include "mineplan/model.hpp"
#include "mineplan/solver.hpp"

using namespace mineplan;
using namespace mineplan::testing;

namespace {

// Reachability by repeated edge relaxation until nothing changes.
std::vector<std::set<int>> BruteReach(const Instance& inst) {
  const int n = inst.num_blocks();
  std::vector<std::set<int>> reach(n);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& pr : inst.data().precedences) {
      const int i = inst.block_index(pr.block);
      const int j = inst.block_index(pr.requires_block);
      const std::size_t before = reach[i].size();
      reach[i].insert(j);
      reach[i].insert(reach[j].begin(), reach[j].end());
      changed = changed || reach[i].size() != before;
    }
  }
  return reach;
}

std::filesystem::path TempFile(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mineplan_test_" + name);
}

}  // namespace

TEST_CASE("minimal instance loads") {
  CHECK(check_integrity(Minimal()).empty());
  const auto path = TempFile("minimal.json");
  save_instance(Minimal(), path);
  const Instance inst = load_instance(path);
  CHECK(inst.num_blocks() == 1);
  CHECK(inst.periods() == 1);
}

TEST_CASE("two-cycle is rejected") {
  InstanceData d = Minimal();
  d.blocks.push_back(MakeBlock("b2", 0, 10.0, 1.0));
  d.precedences = {{"b1", "b2"}, {"b2", "b1"}};
  const auto path = TempFile("cycle.json");
  save_instance(d, path);
  try {
    load_instance(path);
    FAIL("expected IntegrityError");
  } catch (const IntegrityError& e) {
    CHECK(std::string(e.what()).find("precedence cycle") != std::string::npos);
  }
}

TEST_CASE("malformed file is a parse error") {
  CHECK_THROWS_AS(parse_instance_json("{ not json"), ParseError);
}

TEST_CASE("shipped t1-like corpus file") {
  const Instance inst = load_instance(MINEPLAN_CORPUS_DIR "/t1_like.json");
  CHECK(inst.num_blocks() == 64);
  CHECK(inst.periods() == 15);
  CHECK(inst.num_products() == 1);
  CHECK(inst.num_groups() == 0);
  for (int r = 0; r < inst.num_products(); ++r) CHECK(inst.product(r).grade_windows.empty());
}

TEST_CASE("round trips") {
  const auto path = TempFile("rt.json");
  save_instance(Minimal(), path);
  CHECK(load_instance(path).data() == Minimal());

  GenConfig cfg = preset("pilbara-like");
  cfg.pits = 2;
  const InstanceData gen = generate_instance_data(cfg, 11);
  save_instance(gen, path);
  CHECK(load_instance(path).data() == gen);
}

TEST_CASE("unwritable path") {
  CHECK_THROWS_AS(save_instance(Minimal(), "/nonexistent_dir/x/y.json"), IoError);
}

TEST_CASE("integrity violations name their entity") {
  InstanceData d = Shell(3, 5.0, 100.0, true);
  d.blocks.push_back(MakeBlock("b1", 0, 10.0, 1.0));
  d.pits[0].network.nodes[2].stockpile_capacity.resize(2);
  auto v = check_integrity(d);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("stock") != std::string::npos);
  CHECK(v[0].find("period 3") != std::string::npos);

  InstanceData e = Minimal();
  e.blocks.push_back(MakeBlock("b2", 0, 10.0, 1.0, 0.6, "ghost"));
  v = check_integrity(e);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("b2") != std::string::npos);
}

TEST_CASE("closures") {
  InstanceData d = Shell(1, 5.0, 100.0);
  for (auto id : {"a", "b", "c", "d"}) d.blocks.push_back(MakeBlock(id, 0, 10.0, 1.0));
  AddChain(d, {"a", "b", "c"});
  const Instance inst(d);
  CHECK(predecessors(inst, "a") == std::vector<std::string>{"b", "c"});
  CHECK(successors(inst, "c") == std::vector<std::string>{"a", "b"});
  CHECK(predecessors(inst, "d").empty());
  CHECK(successors(inst, "d").empty());
  CHECK_THROWS_AS(predecessors(inst, "zz"), UnknownBlock);
}

TEST_CASE("closure matches brute-force reachability") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const Instance inst(RandomLayered(5, 10, 0.15, seed));  // 50 nodes
    const auto reach = BruteReach(inst);
    for (int b = 0; b < inst.num_blocks(); ++b) {
      const auto pred = inst.predecessors(b);
      CHECK(std::set<int>(pred.begin(), pred.end()) == reach[b]);
      std::set<int> succ;
      for (int i = 0; i < inst.num_blocks(); ++i)
        if (reach[i].count(b)) succ.insert(i);
      const auto s = inst.successors(b);
      CHECK(std::set<int>(s.begin(), s.end()) == succ);
    }
  }
  const Instance big(RandomLayered(10, 20, 0.05, 99));  // 200 nodes
  const auto reach = BruteReach(big);
  for (int b = 0; b < big.num_blocks(); ++b) {
    const auto pred = big.predecessors(b);
    CHECK(std::set<int>(pred.begin(), pred.end()) == reach[b]);
  }
}

TEST_CASE("topological order respects precedences") {
  const Instance inst(RandomLayered(4, 6, 0.3, 5));
  std::vector<int> pos(inst.num_blocks());
  const auto topo = inst.topological_order();
  for (std::size_t k = 0; k < topo.size(); ++k) pos[topo[k]] = static_cast<int>(k);
  for (int b = 0; b < inst.num_blocks(); ++b)
    for (int j : inst.requires_blocks(b)) CHECK(pos[j] < pos[b]);
}

TEST_CASE("generator") {
  GenConfig micro;
  micro.pits = 1;
  micro.blocks_per_pit = 4;
  micro.benches_per_pit = 1;
  micro.periods = 3;
  const Instance inst = generate_instance(micro, 7);
  const ModelHandle m = build_model(inst, 1, inst.periods());
  CHECK(solve(m, {}).status == SolveStatus::kOptimal);

  CHECK(generate_instance_data(micro, 7) == generate_instance_data(micro, 7));
  CHECK_FALSE(generate_instance_data(micro, 7) == generate_instance_data(micro, 8));

  const InstanceData t1 = generate_instance_data(preset("t1-like"), 3);
  CHECK(check_integrity(t1).empty());
  CHECK(t1.blocks.size() == 64);
  CHECK(t1.periods == 15);
  CHECK(t1.products.size() == 1);

  for (auto name : preset_names()) {
    const InstanceData d = generate_instance_data(preset(name), 1);
    CHECK(check_integrity(d).empty());
    std::map<std::string, int> bench;
    for (const auto& b : d.blocks) bench[b.id] = b.bench;
    for (const auto& pr : d.precedences) CHECK(bench[pr.requires_block] >= bench[pr.block]);
  }

  GenConfig bad;
  bad.blocks_per_pit = 0;
  CHECK_THROWS_AS(generate_instance(bad, 1), ConfigError);
  bad = GenConfig{};
  bad.periods = 0;
  CHECK_THROWS_AS(generate_instance(bad, 1), ConfigError);
  CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("generated instances are solver-feasible") {
  for (auto name : {"micro", "ot-like", "pilbara-like"}) {
    GenConfig cfg = preset(name);
    cfg.periods = std::min(cfg.periods, 4);
    cfg.blocks_per_pit = std::min(cfg.blocks_per_pit, 8);
    const Instance inst = generate_instance(cfg, 2);
    const ModelHandle m = build_model(inst, 1, inst.periods());
    SolveParams p;
    p.mip_gap = 1e-2;
    p.time_limit = 60;
    CAPTURE(name);
    CHECK(solve(m, p).has_incumbent());
  }
}
