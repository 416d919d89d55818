#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mineplan/generator.hpp"
#include "mineplan/instance.hpp"
#include "mineplan/lns.hpp"
#include "mineplan/solution.hpp"
#include "mineplan/solver.hpp"
#include "mineplan/swindow.hpp"

namespace mineplan {

// Where the upper bound for gaps comes from.
enum class BoundSource { kFullSolve, kFile, kOracle };

std::string_view ToString(BoundSource source);
BoundSource ParseBoundSource(std::string_view text);  // ConfigError

enum class LogLevel { kQuiet, kInfo, kDebug };
LogLevel ParseLogLevel(std::string_view text);

struct RunConfig {
  std::uint64_t seed = 0;
  int seeds = 1;  // runs use seed, seed + 1, ...
  std::filesystem::path out_dir = ".";
  LogLevel log_level = LogLevel::kInfo;
  SolveParams mip;  // full solves and the bound solve
  SwConfig sw;
  LnsConfig lns;
  BoundSource bound_from = BoundSource::kFullSolve;
  std::optional<std::filesystem::path> bound_file;
  bool include_init_time = false;
  double tolerance = 1e-5;  // solution files must validate at this tolerance

  // Checks every owned parameter block; ConfigError or StepError.
  void validate() const;
};

struct FullSolveResult {
  Solution solution;
  SolveStatus status = SolveStatus::kError;
  double objective = 0.0;
  std::optional<double> best_bound;
  double time_s = 0.0;
};

// Solves the whole horizon. Throws BackendError without an incumbent.
FullSolveResult full_solve(const Instance& inst, const SolveParams& params);

// Upper bound on the optimum per cfg.bound_from. A bound file holds a bare
// number or a JSON object with a "bound" member.
double reference_bound(const Instance& inst, const RunConfig& cfg);

// gap_to_bound, with objectives that overshoot the bound by solver noise
// (1e-7 relative) reported as 0.
double gap_or_zero(double objective, double bound);

struct SeedRun {
  std::uint64_t seed = 0;
  double objective = 0.0;
  double time_s = 0.0;
  std::optional<double> gap_pct;
};

// One grid cell: parameter assignment plus per-seed outcomes.
struct SummaryRow {
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<SeedRun> runs;
  std::string status = "ok";  // ok, infeasible, invalid, error

  bool marked() const { return status != "ok"; }  // printed as "--"
};

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

// Sliding windows followed by LNS from its solution, for one seed.
struct LnsRun {
  SwResult init;
  LnsResult lns;
};
LnsRun run_sw_then_lns(const Instance& inst, const RunConfig& cfg, std::uint64_t seed);

// Axis values from tokens like "W=1..7", "H=0,2,4", "fixing=sd,sdf".
struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};
std::vector<GridAxis> parse_grid(const std::vector<std::string>& tokens);  // ConfigError
// Cartesian product, first axis varying slowest.
std::vector<std::vector<std::pair<std::string, std::string>>> expand_grid(
    const std::vector<GridAxis>& axes);

// Applies one grid assignment to a copy of cfg. Keys: W, H, O, nbar, focal,
// strategies, fixing, uw, rins, workers. ConfigError for anything else.
RunConfig apply_cell(const RunConfig& cfg,
                     const std::vector<std::pair<std::string, std::string>>& cell);

std::vector<Strategy> parse_strategies(std::string_view text);  // "all" allowed
int parse_uw(std::string_view text);                              // N or "inf"

// Sliding-windows grid. Cells whose window step is not positive, and cells
// with an infeasible window, are marked.
std::vector<SummaryRow> sweep_sw(const Instance& inst, const RunConfig& cfg,
                                 const std::vector<GridAxis>& grid,
                                 std::optional<double> bound);
// LNS grid, each seed started from sliding windows.
std::vector<SummaryRow> sweep_lns(const Instance& inst, const RunConfig& cfg,
                                  const std::vector<GridAxis>& grid,
                                  std::optional<double> bound);

// Command entry points. Each returns the process exit code and writes its
// files under cfg.out_dir (gen writes to `out`).
int cmd_gen(const GenConfig& gen, std::uint64_t seed, const std::filesystem::path& out,
            std::ostream& log);
int cmd_validate(const std::filesystem::path& instance,
                 const std::vector<std::filesystem::path>& solutions, const RunConfig& cfg,
                 std::ostream& log);
int cmd_full(const std::filesystem::path& instance, const RunConfig& cfg, std::ostream& log);
int cmd_sw(const std::filesystem::path& instance, const RunConfig& cfg, std::ostream& log);
int cmd_lns(const std::filesystem::path& instance, const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const std::filesystem::path& instance, const RunConfig& cfg,
              const std::vector<std::string>& sw_grid,
              const std::vector<std::string>& lns_grid, std::ostream& log);

}  // namespace mineplan
