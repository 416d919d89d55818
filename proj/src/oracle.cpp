#include <cmath>
#include <limits>

#include "mineplan/errors.hpp"
#include "mineplan/feasibility.hpp"
#include "mineplan/model.hpp"
#include "mineplan/solver.hpp"

namespace mineplan {

namespace {

// Depth-first enumeration: first an opening period per capex pit, then a
// (start, finish) pair per block in topological order. Opening a pit earlier
// than needed only relaxes its capacity, so wp is 1 from the opening period
// on; pits without capex are open from period 1.
class Enumerator {
 public:
  Enumerator(const Instance& inst, long long limit)
      : inst_(inst),
        T_(inst.periods()),
        limit_(limit),
        model_(build_model(inst, 1, inst.periods())),
        session_(make_session()) {
    params_.mip_gap = 0.0;
    start_.assign(inst.num_blocks(), 0);
    finish_.assign(inst.num_blocks(), 0);
    open_.assign(inst.num_pits(), 0);
    for (int m = 0; m < inst.num_pits(); ++m)
      if (inst.pit(m).capex_cost > 0.0) capex_pits_.push_back(m);
      else open_[m] = 1;
  }

  OracleResult Run() {
    Pits(0);
    if (!found_) throw InfeasibleInstance("no feasible assignment exists");
    OracleResult out;
    out.objective = best_;
    out.solution = model_.to_solution(best_values_);
    out.solution.objective = best_;
    out.evaluated = evaluated_;
    return out;
  }

 private:
  void Pits(std::size_t k) {
    if (k == capex_pits_.size()) {
      Blocks(0);
      return;
    }
    const int m = capex_pits_[k];
    for (int o = 1; o <= T_ + 1; ++o) {
      open_[m] = o;
      if (Promising(0, k + 1))
        Pits(k + 1);
    }
    open_[m] = 0;
  }

  void Blocks(std::size_t depth) {
    const auto order = inst_.topological_order();
    if (depth == order.size()) return;
    const int b = order[depth];
    int earliest = 1;
    for (int j : inst_.requires_blocks(b)) earliest = std::max(earliest, finish_[j]);
    for (int s = earliest; s <= T_ + 1; ++s)
      for (int f = s; f <= T_ + 1; ++f) {
        start_[b] = s;
        finish_[b] = f;
        const bool leaf = depth + 1 == order.size();
        if (Promising(static_cast<int>(depth + 1), capex_pits_.size()) && !leaf)
          Blocks(depth + 1);
      }
    start_[b] = 0;
    finish_[b] = 0;
  }

  // Solves the continuous program with the current partial assignment fixed.
  // Returns whether deeper enumeration can still improve on the best.
  bool Promising(int blocks_done, std::size_t pits_done) {
    if (++evaluated_ > limit_)
      throw TooLarge("enumeration exceeds " + std::to_string(limit_) + " programs");
    FixSet fs;
    for (std::size_t k = 0; k < pits_done; ++k) {
      const int m = capex_pits_[k];
      for (int t = 1; t <= T_; ++t) {
        fs.set({VarKind::kWI, m, 0, t}, t == open_[m] ? 1.0 : 0.0);
        fs.set({VarKind::kWP, m, 0, t}, t >= open_[m] ? 1.0 : 0.0);
      }
    }
    for (int m = 0; m < inst_.num_pits(); ++m)
      if (inst_.pit(m).capex_cost <= 0.0)
        for (int t = 1; t <= T_; ++t) {
          fs.set({VarKind::kWI, m, 0, t}, t == 1 ? 1.0 : 0.0);
          fs.set({VarKind::kWP, m, 0, t}, 1.0);
        }
    const auto order = inst_.topological_order();
    for (int d = 0; d < blocks_done; ++d) {
      const int b = order[d];
      for (int t = 1; t <= T_; ++t) {
        fs.set({VarKind::kZ, b, 0, t}, t >= start_[b] ? 1.0 : 0.0);
        fs.set({VarKind::kY, b, 0, t}, t >= finish_[b] ? 1.0 : 0.0);
      }
    }
    model_.clear_fixes();
    model_.apply_fixes(fs);
    const SolveResult res = session_->solve_lp_relaxation(model_, params_);
    if (res.status == SolveStatus::kError)
      throw BackendError("continuous subproblem failed during enumeration");
    if (!res.has_incumbent()) return false;
    const double obj = *res.objective;
    const bool complete = pits_done == capex_pits_.size() &&
                          blocks_done == inst_.num_blocks();
    if (complete) {
      if (!found_ || obj > best_) {
        found_ = true;
        best_ = obj;
        best_values_ = *res.values;
      }
      return false;
    }
    return !found_ || obj > best_ + 1e-9 * std::max(1.0, std::abs(best_));
  }

  const Instance& inst_;
  int T_;
  long long limit_;
  ModelHandle model_;
  std::unique_ptr<Session> session_;
  SolveParams params_;
  std::vector<int> capex_pits_;
  std::vector<int> start_, finish_, open_;
  long long evaluated_ = 0;
  bool found_ = false;
  double best_ = -std::numeric_limits<double>::infinity();
  std::vector<double> best_values_;
};

}  // namespace

OracleResult oracle_solve(const Instance& inst, long long limit) {
  if (inst.num_blocks() > 6 || inst.periods() > 4)
    throw TooLarge("oracle is limited to 6 blocks and 4 periods");
  return Enumerator(inst, limit).Run();
}

double oracle_optimum(const Instance& inst, long long limit) {
  return oracle_solve(inst, limit).objective;
}

}  // namespace mineplan
