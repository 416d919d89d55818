#include "mineplan/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "mineplan/errors.hpp"
#include "mineplan/feasibility.hpp"

namespace mineplan {

std::string_view ToString(BoundSource source) {
  switch (source) {
    case BoundSource::kFullSolve: return "full-solve";
    case BoundSource::kFile: return "file";
    case BoundSource::kOracle: return "oracle";
  }
  return "?";
}

BoundSource ParseBoundSource(std::string_view text) {
  for (auto s : {BoundSource::kFullSolve, BoundSource::kFile, BoundSource::kOracle})
    if (text == ToString(s)) return s;
  throw ConfigError("unknown bound source '" + std::string(text) + "'");
}

LogLevel ParseLogLevel(std::string_view text) {
  if (text == "quiet") return LogLevel::kQuiet;
  if (text == "info") return LogLevel::kInfo;
  if (text == "debug") return LogLevel::kDebug;
  throw ConfigError("unknown log level '" + std::string(text) + "'");
}

void RunConfig::validate() const {
  if (seeds < 1) throw ConfigError("seeds must be >= 1");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
  if (bound_from == BoundSource::kFile && !bound_file)
    throw ConfigError("--bound-from file needs --bound-file");
  mip.validate();
  sw.validate();
  lns.validate();
}

FullSolveResult full_solve(const Instance& inst, const SolveParams& params) {
  params.validate();
  ModelHandle model = build_model(inst, 1, inst.periods());
  const SolveResult res = solve(model, params);
  if (!res.has_incumbent())
    throw BackendError("full solve ended with status " + std::string(ToString(res.status)) +
                       " and no incumbent");
  FullSolveResult out;
  out.solution = model.to_solution(*res.values);
  out.solution.objective = npv(inst, out.solution);
  out.status = res.status;
  out.objective = out.solution.objective;
  out.best_bound = res.best_bound;
  out.time_s = res.runtime;
  return out;
}

namespace {

double ReadBoundFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read bound file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const auto j = nlohmann::json::parse(ss.str());
    if (j.is_number()) return j.get<double>();
    if (j.is_object() && j.contains("bound")) return j.at("bound").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("bound file " + path.string() + ": " + e.what());
  }
  throw ParseError("bound file " + path.string() + " holds no bound");
}

void Log(const RunConfig& cfg, std::ostream& log, const std::string& line) {
  if (cfg.log_level != LogLevel::kQuiet) log << line << '\n';
}

void WriteSolution(const Instance& inst, const Solution& sol,
                   const std::filesystem::path& path, double tol) {
  const ViolationReport report = validate(inst, sol, tol);
  if (!report.clean())
    throw BackendError("refusing to write " + path.string() + ": " +
                       std::to_string(report.entries.size()) + " violations, max " +
                       std::to_string(report.max_violation));
  save_solution(inst, sol, path);
}

std::ofstream OpenOut(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << std::setprecision(10);
  return out;
}

template <class F>
double Seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> Split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

int ParseInt(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad integer '" + text + "' for " + what);
}

std::optional<double> Gap(double objective, std::optional<double> bound) {
  if (!bound) return std::nullopt;
  return gap_or_zero(objective, *bound);
}

std::string Fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

double reference_bound(const Instance& inst, const RunConfig& cfg) {
  switch (cfg.bound_from) {
    case BoundSource::kFile:
      if (!cfg.bound_file) throw ConfigError("--bound-from file needs --bound-file");
      return ReadBoundFile(*cfg.bound_file);
    case BoundSource::kOracle:
      return oracle_optimum(inst);
    case BoundSource::kFullSolve: {
      const FullSolveResult r = full_solve(inst, cfg.mip);
      return std::max(r.objective, r.best_bound.value_or(r.objective));
    }
  }
  throw ConfigError("unknown bound source");
}

double gap_or_zero(double objective, double bound) {
  if (objective > bound && objective - bound <= 1e-7 * std::max(1.0, std::abs(bound)))
    return 0.0;
  return gap_to_bound(objective, bound);
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  if (rows.empty()) return;
  for (const auto& [k, v] : rows.front().params) out << k << ',';
  out << "avg_gap,min_gap,max_gap,avg_time,min_time,max_time,status\n";
  for (const auto& row : rows) {
    for (const auto& [k, v] : row.params) out << v << ',';
    std::vector<double> gaps, times;
    for (const auto& r : row.runs) {
      if (r.gap_pct) gaps.push_back(*r.gap_pct);
      times.push_back(r.time_s);
    }
    auto stats = [&](const std::vector<double>& v) {
      if (row.marked() || v.empty()) {
        out << "--,--,--";
        return;
      }
      const double avg = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
      out << Fmt(avg) << ',' << Fmt(*std::min_element(v.begin(), v.end())) << ','
          << Fmt(*std::max_element(v.begin(), v.end()));
    };
    stats(gaps);
    out << ',';
    stats(times);
    out << ',' << row.status << '\n';
  }
}

LnsRun run_sw_then_lns(const Instance& inst, const RunConfig& cfg, std::uint64_t seed) {
  SwConfig sw = cfg.sw;
  sw.sub_params.seed = static_cast<int>(seed);
  LnsRun out;
  out.init = run_sliding_windows(inst, sw);
  LnsConfig lns = cfg.lns;
  lns.seed = seed;
  out.lns = run_lns(inst, out.init.solution, lns);
  return out;
}

std::vector<GridAxis> parse_grid(const std::vector<std::string>& tokens) {
  std::vector<GridAxis> axes;
  for (const auto& tok : tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size())
      throw ConfigError("grid token '" + tok + "' is not KEY=VALUES");
    GridAxis axis{tok.substr(0, eq), {}};
    const std::string rhs = tok.substr(eq + 1);
    const auto dots = rhs.find("..");
    if (dots != std::string::npos) {
      const int lo = ParseInt(rhs.substr(0, dots), axis.key);
      const int hi = ParseInt(rhs.substr(dots + 2), axis.key);
      if (hi < lo) throw ConfigError("empty range in '" + tok + "'");
      for (int v = lo; v <= hi; ++v) axis.values.push_back(std::to_string(v));
    } else {
      axis.values = Split(rhs, ',');
      for (const auto& v : axis.values)
        if (v.empty()) throw ConfigError("empty value in '" + tok + "'");
    }
    for (const auto& a : axes)
      if (a.key == axis.key) throw ConfigError("grid key '" + axis.key + "' repeated");
    axes.push_back(std::move(axis));
  }
  return axes;
}

std::vector<std::vector<std::pair<std::string, std::string>>> expand_grid(
    const std::vector<GridAxis>& axes) {
  std::vector<std::vector<std::pair<std::string, std::string>>> cells{{}};
  for (const auto& axis : axes) {
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& cell : cells)
      for (const auto& v : axis.values) {
        auto c = cell;
        c.emplace_back(axis.key, v);
        next.push_back(std::move(c));
      }
    cells = std::move(next);
  }
  return cells;
}

std::vector<Strategy> parse_strategies(std::string_view text) {
  if (text == "all")
    return {Strategy::kBlending, Strategy::kTiming, Strategy::kPitLinks, Strategy::kTrigger};
  std::vector<Strategy> out;
  for (const auto& part : Split(text, '+')) {
    for (const auto& name : Split(part, ',')) out.push_back(ParseStrategy(name));
  }
  return out;
}

int parse_uw(std::string_view text) {
  if (text == "inf") return kUnboundedUw;
  const int v = ParseInt(std::string(text), "uw");
  if (v < 0) throw ConfigError("uw must be >= 0 or inf");
  return v;
}

RunConfig apply_cell(const RunConfig& cfg,
                     const std::vector<std::pair<std::string, std::string>>& cell) {
  RunConfig c = cfg;
  for (const auto& [k, v] : cell) {
    if (k == "W") c.sw.W = ParseInt(v, k);
    else if (k == "H") c.sw.H = ParseInt(v, k);
    else if (k == "O") c.sw.O = ParseInt(v, k);
    else if (k == "nbar") c.lns.nbar = ParseInt(v, k);
    else if (k == "focal") c.lns.focal = ParseFocalMethod(v);
    else if (k == "strategies") c.lns.strategies = parse_strategies(v);
    else if (k == "fixing") c.lns.fixing = ParseFixing(v);
    else if (k == "uw") c.lns.uw = parse_uw(v);
    else if (k == "rins") c.lns.rins = (v == "1" || v == "true" || v == "on");
    else if (k == "workers") c.lns.workers = ParseInt(v, k);
    else throw ConfigError("unknown grid key '" + k + "'");
  }
  return c;
}

std::vector<SummaryRow> sweep_sw(const Instance& inst, const RunConfig& cfg,
                                 const std::vector<GridAxis>& grid,
                                 std::optional<double> bound) {
  std::vector<SummaryRow> rows;
  for (const auto& cell : expand_grid(grid)) {
    SummaryRow row;
    row.params = cell;
    const RunConfig c = apply_cell(cfg, cell);
    try {
      c.sw.validate();
    } catch (const StepError&) {
      row.status = "invalid";
      rows.push_back(std::move(row));
      continue;
    }
    for (int k = 0; k < cfg.seeds; ++k) {
      SwConfig sw = c.sw;
      const std::uint64_t seed = cfg.seed + k;
      sw.sub_params.seed = static_cast<int>(seed);
      try {
        const SwResult r = run_sliding_windows(inst, sw);
        row.runs.push_back({seed, r.solution.objective, r.total_time_s,
                            Gap(r.solution.objective, bound)});
      } catch (const WindowInfeasible&) {
        row.status = "infeasible";
        break;
      } catch (const BackendError&) {
        row.status = "error";
        break;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SummaryRow> sweep_lns(const Instance& inst, const RunConfig& cfg,
                                  const std::vector<GridAxis>& grid,
                                  std::optional<double> bound) {
  std::vector<SummaryRow> rows;
  for (const auto& cell : expand_grid(grid)) {
    SummaryRow row;
    row.params = cell;
    const RunConfig c = apply_cell(cfg, cell);
    c.validate();
    for (int k = 0; k < cfg.seeds; ++k) {
      const std::uint64_t seed = cfg.seed + k;
      try {
        const LnsRun r = run_sw_then_lns(inst, c, seed);
        const double t =
            r.lns.wall_time_s + (cfg.include_init_time ? r.init.total_time_s : 0.0);
        row.runs.push_back({seed, r.lns.best.objective, t, Gap(r.lns.best.objective, bound)});
      } catch (const WindowInfeasible&) {
        row.status = "infeasible";
        break;
      } catch (const BackendError&) {
        row.status = "error";
        break;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_gen(const GenConfig& gen, std::uint64_t seed, const std::filesystem::path& out,
            std::ostream& log) {
  gen.validate();
  const Instance inst = generate_instance(gen, seed);
  save_instance(inst, out);
  log << "wrote " << out.string() << ": " << inst.num_pits() << " pits, "
      << inst.num_blocks() << " blocks, " << inst.periods() << " periods\n";
  return 0;
}

int cmd_validate(const std::filesystem::path& instance,
                 const std::vector<std::filesystem::path>& solutions, const RunConfig& cfg,
                 std::ostream& log) {
  const Instance inst = load_instance(instance);
  std::filesystem::create_directories(cfg.out_dir);
  bool all_clean = true;
  for (const auto& path : solutions) {
    const Solution sol = load_solution(inst, path);
    const ViolationReport report = validate(inst, sol, cfg.tolerance);
    const auto out_path = cfg.out_dir / (path.stem().string() + ".report.json");
    OpenOut(out_path) << report.to_json() << '\n';
    log << path.string() << ": " << report.entries.size() << " violations (max "
        << report.max_violation << "), npv " << npv(inst, sol) << '\n';
    all_clean = all_clean && report.clean();
  }
  return all_clean ? 0 : 2;
}

int cmd_full(const std::filesystem::path& instance, const RunConfig& cfg, std::ostream& log) {
  cfg.mip.validate();
  const Instance inst = load_instance(instance);
  std::filesystem::create_directories(cfg.out_dir);
  const FullSolveResult r = full_solve(inst, cfg.mip);
  WriteSolution(inst, r.solution, cfg.out_dir / "solution.json", cfg.tolerance);
  auto trace = OpenOut(cfg.out_dir / "full_trace.csv");
  trace << "status,objective,best_bound,gap_pct,time_s\n"
        << ToString(r.status) << ',' << r.objective << ',';
  if (r.best_bound) trace << *r.best_bound;
  trace << ',';
  if (r.best_bound) trace << gap_or_zero(r.objective, std::max(*r.best_bound, r.objective));
  trace << ',' << r.time_s << '\n';
  Log(cfg, log, "full solve " + std::string(ToString(r.status)) + " npv " + Fmt(r.objective) +
                    (r.best_bound ? " bound " + Fmt(*r.best_bound) : "") + " in " +
                    Fmt(r.time_s) + " s");
  return 0;
}

int cmd_sw(const std::filesystem::path& instance, const RunConfig& cfg, std::ostream& log) {
  cfg.sw.validate();
  const Instance inst = load_instance(instance);
  std::filesystem::create_directories(cfg.out_dir);
  SwConfig sw = cfg.sw;
  sw.sub_params.seed = static_cast<int>(cfg.seed);
  SwResult r;
  try {
    r = run_sliding_windows(inst, sw);
  } catch (const WindowInfeasible& e) {
    log << e.what() << '\n';
    return 2;
  }
  WriteSolution(inst, r.solution, cfg.out_dir / "solution.json", cfg.tolerance);
  auto trace = OpenOut(cfg.out_dir / "sw_trace.csv");
  write_sw_trace_csv(trace, r.trace);
  Log(cfg, log, "sliding windows npv " + Fmt(r.solution.objective) + " in " +
                    Fmt(r.total_time_s) + " s over " + std::to_string(r.trace.size()) +
                    " windows");
  return 0;
}

int cmd_lns(const std::filesystem::path& instance, const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const Instance inst = load_instance(instance);
  std::filesystem::create_directories(cfg.out_dir);
  std::optional<double> bound;
  const double bound_time = Seconds([&] { bound = reference_bound(inst, cfg); });
  Log(cfg, log, "reference bound " + Fmt(*bound) + " (" + std::string(ToString(cfg.bound_from)) +
                    ", " + Fmt(bound_time) + " s)");

  RunConfig run_cfg = cfg;
  run_cfg.lns.reference_bound = bound;
  SummaryRow row;
  row.params = {{"nbar", std::to_string(cfg.lns.nbar)},
                {"focal", std::string(ToString(cfg.lns.focal))},
                {"fixing", std::string(ToString(cfg.lns.fixing))},
                {"uw", cfg.lns.uw == kUnboundedUw ? "inf" : std::to_string(cfg.lns.uw)},
                {"rins", cfg.lns.rins ? "1" : "0"},
                {"workers", std::to_string(cfg.lns.workers)}};
  std::optional<Solution> best;
  for (int k = 0; k < cfg.seeds; ++k) {
    const std::uint64_t seed = cfg.seed + k;
    LnsRun r;
    try {
      r = run_sw_then_lns(inst, run_cfg, seed);
    } catch (const WindowInfeasible& e) {
      log << e.what() << '\n';
      row.status = "infeasible";
      break;
    }
    const double t = r.lns.wall_time_s + (cfg.include_init_time ? r.init.total_time_s : 0.0);
    row.runs.push_back({seed, r.lns.best.objective, t, Gap(r.lns.best.objective, bound)});
    auto trace = OpenOut(cfg.out_dir / ("lns_trace_seed" + std::to_string(seed) + ".csv"));
    write_lns_trace_csv(trace, r.lns.trace);
    Log(cfg, log, "seed " + std::to_string(seed) + ": npv " + Fmt(r.init.solution.objective) +
                      " -> " + Fmt(r.lns.best.objective) + ", gap " +
                      Fmt(*row.runs.back().gap_pct) + "%, " +
                      std::to_string(r.lns.iterations) + " iterations, " + Fmt(t) + " s");
    if (!best || r.lns.best.objective > best->objective) best = r.lns.best;
  }
  if (best) WriteSolution(inst, *best, cfg.out_dir / "solution.json", cfg.tolerance);
  auto summary = OpenOut(cfg.out_dir / "summary.csv");
  write_summary_csv(summary, {row});
  if (cfg.log_level != LogLevel::kQuiet) write_summary_csv(log, {row});
  return row.status == "ok" ? 0 : 2;
}

int cmd_sweep(const std::filesystem::path& instance, const RunConfig& cfg,
              const std::vector<std::string>& sw_grid,
              const std::vector<std::string>& lns_grid, std::ostream& log) {
  if (sw_grid.empty() == lns_grid.empty())
    throw ConfigError("sweep needs exactly one of --sw-grid and --lns-grid");
  if (cfg.seeds < 1) throw ConfigError("seeds must be >= 1");
  const auto grid = parse_grid(sw_grid.empty() ? lns_grid : sw_grid);
  const Instance inst = load_instance(instance);
  std::filesystem::create_directories(cfg.out_dir);
  const double bound = reference_bound(inst, cfg);
  RunConfig c = cfg;
  c.lns.reference_bound = bound;
  const auto rows = sw_grid.empty() ? sweep_lns(inst, c, grid, bound)
                                    : sweep_sw(inst, c, grid, bound);
  auto out = OpenOut(cfg.out_dir / "sweep.csv");
  write_summary_csv(out, rows);
  if (cfg.log_level != LogLevel::kQuiet) write_summary_csv(log, rows);
  const bool any_infeasible = std::any_of(rows.begin(), rows.end(), [](const SummaryRow& r) {
    return r.status == "infeasible";
  });
  return any_infeasible ? 2 : 0;
}

}  // namespace mineplan
