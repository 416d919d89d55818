#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mineplan/instance.hpp"
#include "mineplan/solution.hpp"
#include "mineplan/solver.hpp"

namespace mineplan {

// kStep advances windows by W - O and fixes that many periods per window.
// kPaperLiteral advances by W - O - 1 (fixing periods up to W - O - 1 of
// each window), which never advances when W - O = 1.
enum class FixRule { kStep, kPaperLiteral };

std::string_view ToString(FixRule rule);
FixRule ParseFixRule(std::string_view text);  // throws ConfigError

struct SwConfig {
  int W = 3;
  int O = 1;
  int H = 0;
  SolveParams sub_params;
  FixRule fix_rule = FixRule::kStep;

  // Throws ConfigError for W < 1, O < 0, H < 0; StepError when the advance
  // step is not positive.
  void validate() const;
};

struct WindowStep {
  int start = 1;
  int fix_through = 1;
  bool operator==(const WindowStep&) const = default;
};

// Pure arithmetic; the last entry's fix range reaches period T.
std::vector<WindowStep> window_schedule(int T, int W, int O,
                                        FixRule rule = FixRule::kStep);

struct SwTraceRow {
  int window_start = 1;
  double solve_time_s = 0.0;
  double objective = 0.0;
  SolveStatus status = SolveStatus::kError;
};

struct SwResult {
  Solution solution;
  std::vector<SwTraceRow> trace;
  double total_time_s = 0.0;
};

// Throws WindowInfeasible(start) when a window subproblem is infeasible.
SwResult run_sliding_windows(const Instance& inst, const SwConfig& cfg);

void write_sw_trace_csv(std::ostream& out, const std::vector<SwTraceRow>& trace);

}  // namespace mineplan
