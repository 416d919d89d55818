#include <cmath>
#include <numeric>

#include "mineplan/errors.hpp"
#include "mineplan/lns.hpp"

namespace mineplan {

FixSet fix_set_for(const Instance& inst, const Solution& incumbent,
                   const Neighbourhood& nb, Fixing fixing, int uw) {
  require_dimensions(inst, incumbent);
  const int T = inst.periods();
  FixSet fs;
  auto pin = [&](int b, int t) {
    fs.set({VarKind::kZ, b, 0, t}, incumbent.z[b][t - 1]);
    fs.set({VarKind::kY, b, 0, t}, incumbent.y[b][t - 1]);
  };
  for (int b = 0; b < inst.num_blocks(); ++b) {
    if (nb.blocks.count(b)) continue;
    for (int t = 1; t <= T; ++t) pin(b, t);
  }
  if (fixing == Fixing::kSDF) {
    std::vector<bool> touched(inst.num_pits(), false);
    for (int b : nb.blocks) touched[inst.pit_of_block(b)] = true;
    for (int m = 0; m < inst.num_pits(); ++m) {
      if (touched[m]) continue;
      for (int b : inst.pit_blocks(m))
        for (int q = 0; q < inst.parcel_count(b); ++q) {
          const int p = inst.first_parcel(b) + q;
          for (std::size_t a = 0; a < incumbent.f[p].size(); ++a)
            for (int t = 1; t <= T; ++t)
              fs.set({VarKind::kF, p, static_cast<int>(a), t}, incumbent.f[p][a][t - 1]);
        }
    }
  }
  if (uw != kUnboundedUw) {
    if (uw < 0) throw ConfigError("unfix window must be >= 0");
    for (int b : nb.blocks) {
      const int S = start_period(incumbent, b);
      const int F = finish_period(incumbent, b);
      int lo = S - uw;
      int hi = F + uw;
      if (F > T || S > T) hi = T;
      if (S > T) lo = 1;
      for (int t = 1; t <= T; ++t)
        if (t < lo || t > hi) pin(b, t);
    }
  }
  return fs;
}

FixSet rins_fixes(const ModelHandle& m, const SolveResult& lp, const Solution& incumbent,
                  double tol) {
  if (!lp.values) throw MissingValues("LP relaxation result carries no values");
  if (lp.values->size() != static_cast<std::size_t>(m.num_columns()))
    throw DimensionMismatch("LP values do not match the model");
  require_dimensions(m.instance(), incumbent);
  FixSet fs;
  for (int c = 0; c < m.num_columns(); ++c) {
    const VarKey k = m.key_of(c);
    if (!k.is_integer_kind()) continue;
    const int t = k.period - 1;
    double inc = 0.0;
    switch (k.kind) {
      case VarKind::kY: inc = incumbent.y[k.entity][t]; break;
      case VarKind::kZ: inc = incumbent.z[k.entity][t]; break;
      case VarKind::kWI: inc = incumbent.wi[k.entity][t]; break;
      case VarKind::kWP: inc = incumbent.wp[k.entity][t]; break;
      default: continue;
    }
    if (std::abs((*lp.values)[c] - inc) <= tol) fs.set(k, inc);
  }
  return fs;
}

double improvement_rate(std::span<const double> improvements, int iterations) {
  if (iterations < 1) throw EmptyHistory("improvement rate needs at least one iteration");
  return std::accumulate(improvements.begin(), improvements.end(), 0.0) / iterations;
}

void TerminationMonitor::record(double improvement_pct) {
  improvements_.push_back(improvement_pct);
}

double TerminationMonitor::rate() const {
  return improvement_rate(improvements_, iterations());
}

bool TerminationMonitor::rate_says_stop() const {
  return iterations() >= cfg_.min_iters && iterations() >= 1 && rate() < cfg_.improve_rate;
}

bool TerminationMonitor::should_stop(double elapsed_s) const {
  return elapsed_s >= cfg_.time_limit || rate_says_stop();
}

IncumbentStore::IncumbentStore(Solution initial) : best_(std::move(initial)) {}

Solution IncumbentStore::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return best_;
}

double IncumbentStore::best_objective() const {
  std::lock_guard<std::mutex> lock(mu_);
  return best_.objective;
}

std::optional<double> IncumbentStore::publish(const Solution& candidate,
                                              double wall_time_s, int iteration,
                                              int worker) {
  std::lock_guard<std::mutex> lock(mu_);
  const bool better = candidate.objective > best_.objective + 1e-9;
  history_.push_back({wall_time_s, iteration, worker, candidate.objective, better});
  if (!better) return std::nullopt;
  const double old = best_.objective;
  best_ = candidate;
  return old;
}

std::vector<HistoryEntry> IncumbentStore::history() const {
  std::lock_guard<std::mutex> lock(mu_);
  return history_;
}

}  // namespace mineplan
