#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "mineplan/errors.hpp"
#include "mineplan/feasibility.hpp"
#include "mineplan/lns.hpp"

namespace mineplan {

void LnsConfig::validate() const {
  if (nbar < 1) throw ConfigError("nbar must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (uw < 0 && uw != kUnboundedUw) throw ConfigError("uw must be >= 0 or unbounded");
  if (!(term.time_limit > 0.0)) throw ConfigError("LNS time limit must be > 0");
  if (term.min_iters < 0) throw ConfigError("minimum iterations must be >= 0");
  if (!std::isfinite(term.improve_rate)) throw ConfigError("improvement rate must be finite");
  mip_params.validate();
}

Strategy worker_strategy(const LnsConfig& cfg, int worker) {
  std::vector<Strategy> rotation{Strategy::kNone};
  for (Strategy s : cfg.strategies)
    if (s != Strategy::kNone) rotation.push_back(s);
  return rotation[worker % rotation.size()];
}

FocalMethod worker_focal(const LnsConfig& cfg, int worker) {
  if (cfg.focal != FocalMethod::kMix) return cfg.focal;
  static constexpr FocalMethod kCycle[] = {FocalMethod::kRand, FocalMethod::kObj,
                                           FocalMethod::kMd};
  return kCycle[worker % 3];
}

namespace {

using Clock = std::chrono::steady_clock;

// Iteration bookkeeping shared by all workers.
class Shared {
 public:
  Shared(const LnsConfig& cfg, Solution initial)
      : store(std::move(initial)), monitor_(cfg.term), t0_(Clock::now()) {}

  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - t0_).count();
  }

  // Claims an iteration number, or -1 when the run should stop.
  int begin_iteration() {
    std::lock_guard<std::mutex> lock(mu_);
    if (stop_ || monitor_.should_stop(elapsed())) {
      stop_ = true;
      return -1;
    }
    return ++started_;
  }

  void finish_iteration(LnsTraceRow row, double improvement_pct) {
    std::lock_guard<std::mutex> lock(mu_);
    monitor_.record(improvement_pct);
    trace_.push_back(row);
    if (monitor_.rate_says_stop()) stop_ = true;
  }

  void stop() {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }

  std::vector<LnsTraceRow> trace() const {
    std::lock_guard<std::mutex> lock(mu_);
    return trace_;
  }
  int iterations() const {
    std::lock_guard<std::mutex> lock(mu_);
    return monitor_.iterations();
  }

  IncumbentStore store;

 private:
  mutable std::mutex mu_;
  TerminationMonitor monitor_;
  Clock::time_point t0_;
  int started_ = 0;
  bool stop_ = false;
  std::vector<LnsTraceRow> trace_;
};

void Worker(const Instance& inst, const LnsConfig& cfg, int worker, Shared& shared) {
  Rng rng(cfg.seed + static_cast<std::uint64_t>(worker));
  const Strategy strategy = worker_strategy(cfg, worker);
  const std::vector<Strategy> strategies{strategy};
  const WeightVector weights =
      base_weights(inst, worker_focal(cfg, worker), cfg.value_element);
  ModelHandle model = build_model(inst, 1, inst.periods());
  auto session = make_session();

  while (true) {
    const int iteration = shared.begin_iteration();
    if (iteration < 0) break;
    const Solution snap = shared.store.snapshot();
    const Neighbourhood nb =
        form_neighbourhood(inst, snap, weights, strategies, cfg.nbar, rng);

    model.clear_fixes();
    model.apply_fixes(fix_set_for(inst, snap, nb, cfg.fixing, cfg.uw));
    model.warm_start(snap);

    SolveParams params = cfg.mip_params;
    params.seed = cfg.mip_params.seed + worker;
    const double remaining = cfg.term.time_limit - shared.elapsed();
    params.time_limit = std::max(1e-3, std::min(params.time_limit, remaining));
    if (cfg.rins) {
      const SolveResult lp = session->solve_lp_relaxation(model, params);
      if (lp.values) model.apply_fixes(rins_fixes(model, lp, snap));
    }
    const SolveResult res = session->solve(model, params);

    double improvement = 0.0;
    bool accepted = false;
    if (res.has_incumbent()) {
      Solution cand = model.to_solution(*res.values);
      cand.objective = npv(inst, cand);
      if (cand.objective > snap.objective + 1e-9 && validate(inst, cand, 1e-5).clean()) {
        if (auto old = shared.store.publish(cand, shared.elapsed(), iteration, worker)) {
          accepted = true;
          improvement = 100.0 * (cand.objective - *old) / std::max(std::abs(*old), 1e-10);
        }
      }
    }
    LnsTraceRow row;
    row.wall_time_s = shared.elapsed();
    row.iteration = iteration;
    row.worker = worker;
    row.strategy = strategy;
    row.neighbourhood_size = static_cast<int>(nb.blocks.size());
    row.solve_status = res.status;
    row.objective = shared.store.best_objective();
    if (cfg.reference_bound && *cfg.reference_bound >= row.objective - 1e-9)
      row.gap_pct = gap_to_bound(row.objective, *cfg.reference_bound);
    row.accepted = accepted;
    shared.finish_iteration(row, improvement);
  }
}

}  // namespace

LnsResult run_lns(const Instance& inst, const Solution& initial, const LnsConfig& cfg) {
  cfg.validate();
  require_dimensions(inst, initial);
  Solution start = initial;
  start.objective = npv(inst, initial);
  Shared shared(cfg, start);

  std::vector<std::exception_ptr> errors(cfg.workers);
  auto run = [&](int w) {
    try {
      Worker(inst, cfg, w, shared);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (cfg.workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < cfg.workers; ++w) threads.emplace_back(run, w);
    for (auto& t : threads) t.join();
  }
  const bool all_failed = std::all_of(errors.begin(), errors.end(),
                                      [](const std::exception_ptr& e) { return e != nullptr; });
  if (all_failed) std::rethrow_exception(errors.front());

  LnsResult out;
  out.best = shared.store.snapshot();
  out.trace = shared.trace();
  out.history = shared.store.history();
  out.wall_time_s = shared.elapsed();
  out.iterations = shared.iterations();
  out.accepted = static_cast<int>(std::count_if(out.history.begin(), out.history.end(),
                                                [](const HistoryEntry& h) { return h.accepted; }));
  return out;
}

void write_lns_trace_csv(std::ostream& out, const std::vector<LnsTraceRow>& trace) {
  out << "wall_time_s,iteration,worker,strategy,neighbourhood_size,solve_status,"
         "objective,gap_pct,accepted\n";
  for (const auto& r : trace) {
    out << r.wall_time_s << ',' << r.iteration << ',' << r.worker << ','
        << ToString(r.strategy) << ',' << r.neighbourhood_size << ','
        << ToString(r.solve_status) << ',' << r.objective << ',';
    if (r.gap_pct) out << *r.gap_pct;
    out << ',' << (r.accepted ? 1 : 0) << '\n';
  }
}

}  // namespace mineplan
