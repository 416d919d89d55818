#pragma once

#include <array>
#include <string_view>

namespace mineplan {

// Constraint families shared by the model builder (row tags) and the
// validator (report entries). kBounds and kIntegrality cover variable domains.
enum class ConstraintFamily {
  kBlendMin,
  kBlendMax,
  kNodeCapacity,
  kMiningCapacity,
  kPitActivation,
  kMinProduction,
  kMassBalance,
  kStockpileBalance,
  kStockpileOutflow,
  kStockpileCapacity,
  kPrecedence,
  kStartBeforeProgress,  // x <= z
  kDepletion,            // y <= x
  kMonotoneX,
  kMonotoneY,
  kMonotoneZ,
  kFlowLink,
  kParcelAvailability,
  kBounds,
  kIntegrality,
};

inline constexpr int kNumConstraintFamilies = 20;

constexpr std::string_view ToString(ConstraintFamily f) {
  constexpr std::array<std::string_view, kNumConstraintFamilies> names = {
      "blend_min",         "blend_max",          "node_capacity",
      "mining_capacity",   "pit_activation",     "min_production",
      "mass_balance",      "stockpile_balance",  "stockpile_outflow",
      "stockpile_capacity", "precedence",        "start_before_progress",
      "depletion",         "monotone_x",         "monotone_y",
      "monotone_z",        "flow_link",          "parcel_availability",
      "bounds",            "integrality"};
  return names[static_cast<int>(f)];
}

}  // namespace mineplan
