#pragma once

#include <string>
#include <vector>

#include "mineplan/constraint_family.hpp"
#include "mineplan/instance.hpp"
#include "mineplan/solution.hpp"

namespace mineplan {

inline constexpr double kDefaultTolerance = 1e-6;

struct Violation {
  ConstraintFamily family;
  std::string indices;  // e.g. "block=b3 period=2"
  double magnitude = 0.0;
};

struct ViolationReport {
  // Names the conventions the checks follow (flow link in tons, parcel
  // usage bounded by one).
  std::string header;
  double tolerance = kDefaultTolerance;
  std::vector<Violation> entries;
  double max_violation = 0.0;

  bool clean() const { return entries.empty(); }
  bool has(ConstraintFamily family) const;
  std::string to_json() const;
};

// Re-evaluates every constraint family of the planning model at `sol`, plus
// the variable domains. Independent of the model builder. Throws
// DimensionMismatch if sol does not cover the full horizon.
ViolationReport validate(const Instance& inst, const Solution& sol,
                         double tol = kDefaultTolerance);

// Discounted revenue minus extraction and capex costs.
double npv(const Instance& inst, const Solution& sol);

// 100 * (bound - objective) / max(1e-10, |bound|). Throws InvalidBound when
// bound < objective - 1e-9.
double gap_to_bound(double objective, double bound);

struct OracleResult {
  double objective = 0.0;
  Solution solution;
  long long evaluated = 0;  // continuous programs solved
};

// Exact optimum by exhaustive enumeration of block start/depletion periods
// and pit opening periods, solving the remaining continuous program for each
// assignment. Partial assignments whose continuous relaxation cannot beat the
// best completed assignment are skipped. Throws TooLarge when |B| > 6,
// |T| > 4 or more than `limit` programs would be solved; InfeasibleInstance
// when no assignment is feasible.
OracleResult oracle_solve(const Instance& inst, long long limit = 200000);
double oracle_optimum(const Instance& inst, long long limit = 200000);

}  // namespace mineplan
