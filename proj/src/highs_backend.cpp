#include <chrono>
#include <cmath>

#include <Highs.h>

#include "mineplan/errors.hpp"
#include "mineplan/solver.hpp"

namespace mineplan {

std::string_view ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kGapLimit: return "gap_limit";
    case SolveStatus::kTimeLimit: return "time_limit";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kError: return "error";
  }
  return "error";
}

void SolveParams::validate() const {
  if (!(mip_gap >= 0.0)) throw ConfigError("mip_gap must be >= 0");
  if (!(time_limit > 0.0)) throw ConfigError("time_limit must be > 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

double SolveResult::value(const ModelHandle& m, const VarKey& key) const {
  if (!values) throw MissingValues("solve result carries no values");
  return (*values)[m.require_column(key)];
}

double relative_gap(double objective, double bound) {
  return std::abs(bound - objective) / std::max(1e-10, std::abs(objective));
}

namespace {

class HighsSession final : public Session {
 public:
  HighsSession() {
    highs_.setOptionValue("output_flag", false);
    // Rows are in tons with modest coefficients; tighter than the default
    // so that extracted incumbents validate comfortably at 1e-5.
    highs_.setOptionValue("primal_feasibility_tolerance", 1e-8);
    highs_.setOptionValue("mip_feasibility_tolerance", 1e-7);
  }

  std::string_view name() const override { return "highs"; }

  SolveResult solve(const ModelHandle& m, const SolveParams& p) override {
    return Run(m, p, /*relax=*/false);
  }

  SolveResult solve_lp_relaxation(const ModelHandle& m,
                                  const SolveParams& p) override {
    return Run(m, p, /*relax=*/true);
  }

 private:
  void Load(const ModelHandle& m, bool relax) {
    const LinearModel& lm = m.lp();
    if (loaded_id_ == m.structure_id() && loaded_relaxed_ == relax) {
      highs_.changeColsBounds(0, lm.num_cols() - 1, lm.col_lower.data(),
                              lm.col_upper.data());
      return;
    }
    HighsLp lp;
    lp.num_col_ = lm.num_cols();
    lp.num_row_ = lm.num_rows();
    lp.sense_ = ObjSense::kMaximize;
    lp.col_cost_ = lm.col_cost;
    lp.col_lower_ = lm.col_lower;
    lp.col_upper_ = lm.col_upper;
    lp.row_lower_.resize(lm.num_rows());
    lp.row_upper_.resize(lm.num_rows());
    for (int r = 0; r < lm.num_rows(); ++r) {
      lp.row_lower_[r] = lm.row_lower[r] <= -1e30 ? -kHighsInf : lm.row_lower[r];
      lp.row_upper_[r] = lm.row_upper[r] >= 1e30 ? kHighsInf : lm.row_upper[r];
    }
    lp.a_matrix_.format_ = MatrixFormat::kRowwise;
    lp.a_matrix_.num_col_ = lm.num_cols();
    lp.a_matrix_.num_row_ = lm.num_rows();
    lp.a_matrix_.start_ = lm.row_start;
    lp.a_matrix_.index_ = lm.row_index;
    lp.a_matrix_.value_ = lm.row_value;
    bool any_integer = false;
    if (!relax) {
      lp.integrality_.resize(lm.num_cols(), HighsVarType::kContinuous);
      for (int c = 0; c < lm.num_cols(); ++c)
        if (lm.col_integer[c]) {
          lp.integrality_[c] = HighsVarType::kInteger;
          any_integer = true;
        }
      if (!any_integer) lp.integrality_.clear();
    }
    if (highs_.passModel(std::move(lp)) == HighsStatus::kError) {
      loaded_id_ = 0;
      throw BackendError("HiGHS rejected the model");
    }
    loaded_id_ = m.structure_id();
    loaded_relaxed_ = relax;
  }

  SolveResult Run(const ModelHandle& m, const SolveParams& p, bool relax) {
    p.validate();
    const auto t_start = std::chrono::steady_clock::now();
    try {
      Load(m, relax);
    } catch (const BackendError&) {
      throw;
    } catch (const std::exception& e) {
      loaded_id_ = 0;
      throw BackendError(std::string("HiGHS load failed: ") + e.what());
    }
    highs_.clearSolver();
    highs_.setOptionValue("mip_rel_gap", p.mip_gap);
    highs_.setOptionValue("time_limit",
                          std::isfinite(p.time_limit) ? p.time_limit : kHighsInf);
    highs_.setOptionValue("random_seed", p.seed);
    highs_.setOptionValue("mip_heuristic_effort",
                          p.emphasis == Emphasis::kFeasibilityFirst ? 0.3 : 0.05);
    if (!relax && m.start()) {
      HighsSolution start;
      start.col_value = *m.start();
      start.value_valid = true;
      highs_.setSolution(start);
    }
    const HighsStatus run_status = highs_.run();
    SolveResult res;
    res.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                t_start)
                      .count();
    if (run_status == HighsStatus::kError) {
      loaded_id_ = 0;
      res.status = SolveStatus::kError;
      return res;
    }
    const HighsModelStatus ms = highs_.getModelStatus();
    switch (ms) {
      case HighsModelStatus::kOptimal: res.status = SolveStatus::kOptimal; break;
      case HighsModelStatus::kTimeLimit:
      case HighsModelStatus::kIterationLimit:
      case HighsModelStatus::kSolutionLimit:
      case HighsModelStatus::kInterrupt:
        res.status = SolveStatus::kTimeLimit;
        break;
      case HighsModelStatus::kInfeasible:
      case HighsModelStatus::kUnboundedOrInfeasible:
        res.status = SolveStatus::kInfeasible;
        break;
      case HighsModelStatus::kUnbounded: res.status = SolveStatus::kUnbounded; break;
      default: res.status = SolveStatus::kError; break;
    }
    const HighsInfo& info = highs_.getInfo();
    const bool has_solution =
        info.primal_solution_status == kSolutionStatusFeasible &&
        (res.status == SolveStatus::kOptimal || res.status == SolveStatus::kTimeLimit);
    if (has_solution) {
      res.values = highs_.getSolution().col_value;
      res.objective = info.objective_function_value;
      const bool mip = !relax && highs_.getLp().integrality_.size() > 0;
      double bound = mip ? info.mip_dual_bound : info.objective_function_value;
      if (!std::isfinite(bound)) bound = *res.objective;
      res.best_bound = std::max(bound, *res.objective);
    }
    return res;
  }

  Highs highs_;
  std::uint64_t loaded_id_ = 0;
  bool loaded_relaxed_ = false;
};

}  // namespace

std::unique_ptr<Session> make_session(std::string_view backend) {
  if (backend == "highs") return std::make_unique<HighsSession>();
  throw BackendError("unknown backend '" + std::string(backend) + "'");
}

SolveResult solve(const ModelHandle& m, const SolveParams& p) {
  return make_session()->solve(m, p);
}

SolveResult solve_lp_relaxation(const ModelHandle& m, const SolveParams& p) {
  return make_session()->solve_lp_relaxation(m, p);
}

}  // namespace mineplan
