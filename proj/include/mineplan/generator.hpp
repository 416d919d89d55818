#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mineplan/instance.hpp"

namespace mineplan {

struct GenConfig {
  int pits = 1;
  int blocks_per_pit = 4;
  int benches_per_pit = 1;
  int periods = 3;
  int elements = 1;
  int products = 1;
  bool blending = false;        // grade windows plus a waste dump
  bool min_production = false;  // groups over pits
  bool capex = false;           // pits carry an opening cost
  bool stockpiles = true;
  int max_parcels_per_block = 3;
  // Chance that a block requires its left neighbour on the same bench.
  double ramp_probability = 0.4;
  double discount_rate = 0.1;   // pi_t = (1 + rate)^-(t - 1)
  // Hard case for sliding windows: all material is profitable, capacities
  // are ample, and the only demand sits in the last period. A myopic window
  // mines everything early and leaves nothing for that demand.
  bool late_demand = false;

  // Throws ConfigError for non-positive counts or an invalid rate.
  void validate() const;
};

// Named shapes: "micro", "t1-like", "ot-like", "pilbara-like".
// Throws ConfigError for unknown names.
GenConfig preset(std::string_view name);
std::vector<std::string_view> preset_names();

// Deterministic in (cfg, seed). The result passes check_integrity and the
// full model built from it is feasible: a reference schedule is built first
// and every capacity, demand and grade window is derived from it with slack.
InstanceData generate_instance_data(const GenConfig& cfg, std::uint64_t seed);
Instance generate_instance(const GenConfig& cfg, std::uint64_t seed);

}  // namespace mineplan
