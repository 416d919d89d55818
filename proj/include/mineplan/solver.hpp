#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mineplan/model.hpp"

namespace mineplan {

enum class SolveStatus { kOptimal, kGapLimit, kTimeLimit, kInfeasible, kUnbounded, kError };
enum class Emphasis { kDefault, kFeasibilityFirst };

std::string_view ToString(SolveStatus status);

struct SolveParams {
  double mip_gap = 1e-3;
  double time_limit = std::numeric_limits<double>::infinity();
  int seed = 0;
  int threads = 1;
  Emphasis emphasis = Emphasis::kDefault;

  // Throws ConfigError on mip_gap < 0, time_limit <= 0 or threads < 1.
  void validate() const;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kError;
  std::optional<double> objective;
  std::optional<double> best_bound;
  std::optional<std::vector<double>> values;  // one per model column
  double runtime = 0.0;

  bool has_incumbent() const { return objective.has_value(); }
  // Throws MissingValues without an incumbent; UnknownVariable for a bad key.
  double value(const ModelHandle& m, const VarKey& key) const;
};

// Relative gap: |bound - objective| / max(1e-10, |objective|).
double relative_gap(double objective, double bound);

// One backend session. Sessions are owned by a single thread; separate
// sessions may solve concurrently. A session remembers the last model it
// loaded and only pushes column bounds when asked to solve the same model
// structure again.
class Session {
 public:
  virtual ~Session() = default;
  virtual std::string_view name() const = 0;
  virtual SolveResult solve(const ModelHandle& m, const SolveParams& p) = 0;
  virtual SolveResult solve_lp_relaxation(const ModelHandle& m,
                                          const SolveParams& p) = 0;
};

// Known backends: "highs". Throws BackendError for anything else.
std::unique_ptr<Session> make_session(std::string_view backend = "highs");

// One-shot helpers using a fresh session.
SolveResult solve(const ModelHandle& m, const SolveParams& p);
SolveResult solve_lp_relaxation(const ModelHandle& m, const SolveParams& p);

}  // namespace mineplan
