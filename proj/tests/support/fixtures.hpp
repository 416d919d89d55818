#pragma once

#include <random>
#include <string>
#include <vector>

#include "mineplan/instance.hpp"

namespace mineplan::testing {

// One pit, plant and one product sink; optionally a stockpile in between.
inline FlowNetwork SimpleNetwork(int periods, bool stockpile = false,
                                 double stock_cap = 100.0) {
  FlowNetwork net;
  net.nodes.push_back({"src", NodeKind::kSource, "", std::nullopt, {}});
  net.nodes.push_back({"out", NodeKind::kProductSink, "ore", std::nullopt, {}});
  net.arcs.push_back({"src", "out"});
  if (stockpile) {
    net.nodes.push_back(
        {"stock", NodeKind::kStockpile, "", 0.0, std::vector<double>(periods, stock_cap)});
    net.arcs.push_back({"src", "stock"});
    net.arcs.push_back({"stock", "out"});
  }
  return net;
}

inline Block MakeBlock(const std::string& id, int bench, double tons, double cost,
                       double grade = 0.6, const std::string& pit = "p1") {
  Block b;
  b.id = id;
  b.pit = pit;
  b.bench = bench;
  Parcel p;
  p.id = id + "_p1";
  p.type = "ore";
  p.tonnage = tons;
  p.extraction_cost = cost;
  p.grades["fe"] = grade;
  b.parcels.push_back(p);
  return b;
}

// Shell with one element "fe", one product "ore" (revenue sigma), one pit
// "p1" with the given capacity, undiscounted.
inline InstanceData Shell(int periods, double sigma, double capacity, bool stockpile = false) {
  InstanceData d;
  d.periods = periods;
  d.discount.assign(periods, 1.0);
  d.elements = {"fe"};
  d.products.push_back({"ore", sigma, {}});
  Pit pit;
  pit.id = "p1";
  pit.mining_capacity = capacity;
  pit.network = SimpleNetwork(periods, stockpile);
  d.pits.push_back(pit);
  return d;
}

// The smallest legal instance: 1 pit, 1 block, 1 parcel, 1 product, 1 period.
inline InstanceData Minimal() {
  InstanceData d = Shell(1, 5.0, 100.0);
  d.blocks.push_back(MakeBlock("b1", 0, 10.0, 1.0));
  return d;
}

// Chain ids[0] requires ids[1] requires ... on one bench.
inline void AddChain(InstanceData& d, const std::vector<std::string>& ids) {
  for (std::size_t i = 0; i + 1 < ids.size(); ++i)
    d.precedences.push_back({ids[i], ids[i + 1]});
}

// Random layered DAG: `layers` benches of `width` blocks, each block
// requiring some blocks of the bench above and possibly same-bench blocks
// with a smaller position.
inline InstanceData RandomLayered(int layers, int width, double p_edge, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  InstanceData d = Shell(2, 10.0, 1000.0);
  for (int l = 0; l < layers; ++l)
    for (int i = 0; i < width; ++i)
      d.blocks.push_back(MakeBlock("b" + std::to_string(l) + "_" + std::to_string(i), l, 10.0,
                                   1.0, 0.3 + 0.4 * u(rng)));
  auto id = [&](int l, int i) { return "b" + std::to_string(l) + "_" + std::to_string(i); };
  for (int l = 0; l < layers; ++l)
    for (int i = 0; i < width; ++i) {
      if (l + 1 < layers)
        for (int j = 0; j < width; ++j)
          if (u(rng) < p_edge) d.precedences.push_back({id(l, i), id(l + 1, j)});
      for (int j = 0; j < i; ++j)
        if (u(rng) < p_edge) d.precedences.push_back({id(l, i), id(l, j)});
    }
  return d;
}

}  // namespace mineplan::testing
