#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <string_view>
#include <tuple>
#include <vector>

#include "mineplan/instance.hpp"
#include "mineplan/model.hpp"
#include "mineplan/solution.hpp"
#include "mineplan/solver.hpp"

namespace mineplan {

using Rng = std::mt19937_64;

enum class FocalMethod { kRand, kObj, kMd, kMix };
enum class Strategy { kNone, kBlending, kTiming, kPitLinks, kTrigger };
enum class Fixing { kSD, kSDF };

std::string_view ToString(FocalMethod m);
std::string_view ToString(Strategy s);
std::string_view ToString(Fixing f);
FocalMethod ParseFocalMethod(std::string_view text);  // throws ConfigError
Strategy ParseStrategy(std::string_view text);
Fixing ParseFixing(std::string_view text);

// Timing rebuilds before the last neighbourhood is accepted regardless.
inline constexpr int kTimingMaxRebuilds = 20;
// Unfix window meaning "never fix binaries of neighbourhood blocks".
inline constexpr int kUnboundedUw = -1;

// Per-block focal weights, indexed by block.
struct WeightVector {
  std::vector<double> weights;
  bool any_positive() const;
};

// RAND: 1 per block. OBJ: sum of tau_p * grade of `value_element` over the
// block's parcels. MD: 1/n with n the transitive predecessor plus successor
// count, 0 when n = 0. Throws MissingValueElement for OBJ with an element
// index outside the instance and ConfigError for MIX.
WeightVector base_weights(const Instance& inst, FocalMethod method,
                          int value_element = 0);

// Same-bench transitive predecessors (above) or successors (below) of b,
// sorted, excluding b. Throws UnknownBlock.
std::vector<int> restricted_cone_above(const Instance& inst, int b);
std::vector<int> restricted_cone_below(const Instance& inst, int b);

// Index drawn from `candidates` proportionally to weights[candidate];
// uniformly when every candidate weighs zero. candidates must be non-empty.
int sample_weighted(std::span<const double> weights, std::span<const int> candidates,
                    Rng& rng);

// Draws a block proportionally to w. Throws EmptyWeightVector when no
// weight is positive.
int sample_focal(const WeightVector& w, Rng& rng);

// Path around focal f: f and its cones, then alternately one sampled block
// from the cone above the current top (with its cone above) and one from the
// cone below the current bottom (with its cone below). Stops when both
// frontiers are empty or the size reaches nbar; whole cone batches are added,
// so the result may exceed nbar by the last batch.
std::set<int> form_path(const Instance& inst, const WeightVector& weights, int f,
                        int nbar, Rng& rng);

// Blending constraint id: (product, element, side) with side 0 = lower
// window bound, 1 = upper.
using BlendKey = std::tuple<int, int, int>;
using BlendMap = std::map<BlendKey, double>;

// Contribution of block b to each blending constraint as if mined at once:
// lower side sum tau_p (grade - min), upper side sum tau_p (max - grade);
// positive helps. Zero when b's pit cannot reach the product.
BlendMap blending_contribution(const Instance& inst, int b);

struct BlendingLedger {
  BlendMap c_of_N;
  void add(const Instance& inst, int b);
  // True when b contributes negatively to an entry that is currently negative.
  bool harmful(const Instance& inst, int b) const;
};

struct Neighbourhood {
  std::set<int> blocks;
  std::vector<int> focals;
  std::set<Strategy> strategy_tags;
};

// Throws StrategyInapplicable when a strategy needs a model feature the
// instance lacks, EmptyWeightVector when no focal can be drawn at all.
Neighbourhood form_neighbourhood(const Instance& inst, const Solution& incumbent,
                                 const WeightVector& weights,
                                 std::span<const Strategy> strategies, int nbar,
                                 Rng& rng);

// Blocks of pit m by incumbent start period (unscheduled last), ties by id.
// Throws UnknownPit.
std::vector<int> trigger_blocks(const Instance& inst, int m, const Solution& incumbent);

// Variables to pin for a restricted solve around nb. uw = kUnboundedUw
// disables the unfix window.
FixSet fix_set_for(const Instance& inst, const Solution& incumbent,
                   const Neighbourhood& nb, Fixing fixing, int uw);

// Every integer variable of m whose LP value is within tol of the
// incumbent's, fixed to the incumbent value. Throws MissingValues.
FixSet rins_fixes(const ModelHandle& m, const SolveResult& lp,
                  const Solution& incumbent, double tol = 1e-5);

// Sum of improvements divided by iterations. Throws EmptyHistory for
// iterations < 1.
double improvement_rate(std::span<const double> improvements, int iterations);

struct TermConfig {
  double time_limit = 600.0;  // L_T, seconds
  double improve_rate = 1.0;  // L_imp, percent
  int min_iters = 10;         // L_iter
};

// Stops once wall time reaches L_T, or once at least L_iter iterations have
// been recorded and the improvement rate is below L_imp.
class TerminationMonitor {
 public:
  explicit TerminationMonitor(TermConfig cfg) : cfg_(cfg) {}
  void record(double improvement_pct);
  int iterations() const { return static_cast<int>(improvements_.size()); }
  double rate() const;
  bool rate_says_stop() const;
  bool should_stop(double elapsed_s) const;

 private:
  TermConfig cfg_;
  std::vector<double> improvements_;
};

struct HistoryEntry {
  double wall_time_s = 0.0;
  int iteration = 0;
  int worker = 0;
  double objective = 0.0;
  bool accepted = false;
};

// Shared best solution. publish() accepts only strict improvements.
class IncumbentStore {
 public:
  explicit IncumbentStore(Solution initial);
  Solution snapshot() const;
  double best_objective() const;
  // On acceptance returns the objective that was replaced.
  std::optional<double> publish(const Solution& candidate, double wall_time_s,
                                int iteration, int worker);
  std::vector<HistoryEntry> history() const;

 private:
  mutable std::mutex mu_;
  Solution best_;
  std::vector<HistoryEntry> history_;
};

struct LnsConfig {
  int nbar = 30;
  FocalMethod focal = FocalMethod::kMd;
  std::vector<Strategy> strategies;
  Fixing fixing = Fixing::kSD;
  int uw = kUnboundedUw;
  bool rins = false;
  int workers = 1;
  SolveParams mip_params;
  TermConfig term;
  int value_element = 0;
  std::uint64_t seed = 0;
  std::optional<double> reference_bound;  // for the trace's gap column

  void validate() const;  // ConfigError
};

struct LnsTraceRow {
  double wall_time_s = 0.0;
  int iteration = 0;
  int worker = 0;
  Strategy strategy = Strategy::kNone;
  int neighbourhood_size = 0;
  SolveStatus solve_status = SolveStatus::kError;
  double objective = 0.0;  // best objective after this iteration
  std::optional<double> gap_pct;
  bool accepted = false;
};

struct LnsResult {
  Solution best;
  std::vector<LnsTraceRow> trace;
  std::vector<HistoryEntry> history;
  double wall_time_s = 0.0;
  int iterations = 0;
  int accepted = 0;
};

// Strategy used by worker w: round-robin over [None] + configured strategies.
Strategy worker_strategy(const LnsConfig& cfg, int worker);
// Weighting used by worker w (MIX cycles RAND, OBJ, MD).
FocalMethod worker_focal(const LnsConfig& cfg, int worker);

LnsResult run_lns(const Instance& inst, const Solution& initial, const LnsConfig& cfg);

void write_lns_trace_csv(std::ostream& out, const std::vector<LnsTraceRow>& trace);

}  // namespace mineplan
