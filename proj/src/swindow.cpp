#include "mineplan/swindow.hpp"

#include <algorithm>
#include <chrono>

#include "mineplan/errors.hpp"
#include "mineplan/feasibility.hpp"
#include "mineplan/model.hpp"

namespace mineplan {

std::string_view ToString(FixRule rule) {
  return rule == FixRule::kStep ? "step" : "paper-literal";
}

FixRule ParseFixRule(std::string_view text) {
  if (text == "step") return FixRule::kStep;
  if (text == "paper-literal") return FixRule::kPaperLiteral;
  throw ConfigError("unknown fix rule '" + std::string(text) + "'");
}

namespace {

int Step(int W, int O, FixRule rule) {
  return rule == FixRule::kStep ? W - O : W - O - 1;
}

}  // namespace

void SwConfig::validate() const {
  if (W < 1) throw ConfigError("window width W must be >= 1");
  if (O < 0) throw ConfigError("overlap O must be >= 0");
  if (H < 0) throw ConfigError("relaxed extension H must be >= 0");
  if (Step(W, O, fix_rule) < 1)
    throw StepError("window advance step must be positive (W=" +
                    std::to_string(W) + ", O=" + std::to_string(O) + ")");
  sub_params.validate();
}

std::vector<WindowStep> window_schedule(int T, int W, int O, FixRule rule) {
  if (T < 1) throw ConfigError("horizon must have at least one period");
  if (W < 1 || O < 0) throw ConfigError("need W >= 1 and O >= 0");
  const int step = Step(W, O, rule);
  if (step < 1)
    throw StepError("window advance step must be positive (W=" +
                    std::to_string(W) + ", O=" + std::to_string(O) + ")");
  std::vector<WindowStep> out;
  for (int start = 1;; start += step) {
    const int through = std::min(T, start + step - 1);
    out.push_back({start, through});
    if (through >= T) break;
  }
  return out;
}

SwResult run_sliding_windows(const Instance& inst, const SwConfig& cfg) {
  cfg.validate();
  const auto t_begin = std::chrono::steady_clock::now();
  const int T = inst.periods();
  SwResult out;
  out.solution = Solution::Zeros(inst);
  auto session = make_session();

  for (const WindowStep& w : window_schedule(T, cfg.W, cfg.O, cfg.fix_rule)) {
    const int integer_end = std::min(T, w.start + cfg.W - 1);
    const int last = std::min(T, w.start + cfg.W + cfg.H - 1);
    RelaxSpec relax;
    for (int t = integer_end + 1; t <= last; ++t) relax.relaxed_periods.insert(t);

    ModelHandle model = build_model(inst, w.start, last, relax);
    if (w.start > 1) model.apply_fixes(fix_periods(inst, out.solution, 1, w.start - 1));
    const SolveResult res = session->solve(model, cfg.sub_params);
    out.trace.push_back({w.start, res.runtime, res.objective.value_or(0.0), res.status});
    if (!res.has_incumbent()) {
      if (res.status == SolveStatus::kInfeasible) throw WindowInfeasible(w.start);
      throw BackendError("window starting at period " + std::to_string(w.start) +
                         " ended with status " + std::string(ToString(res.status)) +
                         " and no incumbent");
    }

    const Solution part = model.to_solution(*res.values);
    for (int t = w.start; t <= w.fix_through; ++t) {
      const int i = t - 1;
      for (int b = 0; b < inst.num_blocks(); ++b) {
        out.solution.x[b][i] = part.x[b][i];
        out.solution.y[b][i] = part.y[b][i];
        out.solution.z[b][i] = part.z[b][i];
      }
      for (int p = 0; p < inst.num_parcels(); ++p) {
        for (std::size_t a = 0; a < part.f[p].size(); ++a)
          out.solution.f[p][a][i] = part.f[p][a][i];
        for (std::size_t k = 0; k < part.s[p].size(); ++k)
          out.solution.s[p][k][i] = part.s[p][k][i];
      }
      for (int m = 0; m < inst.num_pits(); ++m) {
        out.solution.wi[m][i] = part.wi[m][i];
        out.solution.wp[m][i] = part.wp[m][i];
      }
    }
  }
  out.solution.objective = npv(inst, out.solution);
  out.total_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return out;
}

void write_sw_trace_csv(std::ostream& out, const std::vector<SwTraceRow>& trace) {
  out << "window_start,solve_time_s,objective,status\n";
  for (const auto& r : trace)
    out << r.window_start << ',' << r.solve_time_s << ',' << r.objective << ','
        << ToString(r.status) << '\n';
}

}  // namespace mineplan
