#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mineplan/commands.hpp"
#include "mineplan/errors.hpp"

using namespace mineplan;

namespace {

// Raw flag values; converted into a RunConfig once parsing succeeded.
struct Flags {
  int W = 3, H = 0, O = 1;
  std::string sw_fix_rule = "step";
  int nbar = 30;
  std::string focal = "md";
  std::string strategies = "none";
  std::string fixing = "sd";
  std::string uw = "inf";
  bool rins = false;
  int workers = 1;
  double mip_gap = 1e-3;
  double mip_time = 0.0;  // 0 = unlimited
  int threads = 1;
  double term_time = 600.0;
  double term_improve = 1.0;
  int term_min_iters = 10;
  std::uint64_t seed = 0;
  int seeds = 1;
  int value_element = 0;
  std::string bound_from = "full-solve";
  std::string bound_file;
  bool include_init_time = false;
  std::string out_dir = ".";
  std::string log_level = "info";
  double tol = 1e-5;
};

RunConfig ToConfig(const Flags& f) {
  RunConfig c;
  c.seed = f.seed;
  c.seeds = f.seeds;
  c.out_dir = f.out_dir;
  c.log_level = ParseLogLevel(f.log_level);
  c.tolerance = f.tol;
  c.mip.mip_gap = f.mip_gap;
  if (f.mip_time > 0) c.mip.time_limit = f.mip_time;
  c.mip.threads = f.threads;
  c.sw.W = f.W;
  c.sw.H = f.H;
  c.sw.O = f.O;
  c.sw.fix_rule = ParseFixRule(f.sw_fix_rule);
  c.sw.sub_params = c.mip;
  c.lns.nbar = f.nbar;
  c.lns.focal = ParseFocalMethod(f.focal);
  c.lns.strategies = parse_strategies(f.strategies);
  c.lns.fixing = ParseFixing(f.fixing);
  c.lns.uw = parse_uw(f.uw);
  c.lns.rins = f.rins;
  c.lns.workers = f.workers;
  c.lns.mip_params = c.mip;
  c.lns.term = {f.term_time, f.term_improve, f.term_min_iters};
  c.lns.value_element = f.value_element;
  c.bound_from = ParseBoundSource(f.bound_from);
  if (!f.bound_file.empty()) c.bound_file = f.bound_file;
  c.include_init_time = f.include_init_time;
  return c;
}

void AddSolveFlags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--mip-gap", f.mip_gap, "relative MIP gap per solve");
  cmd->add_option("--mip-time", f.mip_time, "time limit per MIP solve in seconds (0 = none)");
  cmd->add_option("--threads", f.threads, "backend threads per solve");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("-o,--out", f.out_dir, "output directory");
  cmd->add_option("--log-level", f.log_level, "quiet, info or debug");
  cmd->add_option("--tol", f.tol, "validation tolerance for written solutions");
}

void AddSwFlags(CLI::App* cmd, Flags& f) {
  cmd->add_option("-W", f.W, "window length");
  cmd->add_option("-H", f.H, "integrality-relaxed periods after each window");
  cmd->add_option("-O", f.O, "window overlap");
  cmd->add_option("--sw-fix-rule", f.sw_fix_rule, "step or paper-literal");
}

void AddLnsFlags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--nbar", f.nbar, "neighbourhood size");
  cmd->add_option("--focal", f.focal, "rand, obj, md or mix");
  cmd->add_option("--strategies", f.strategies,
                  "comma list of none, blending, timing, pitlinks, trigger, or all");
  cmd->add_option("--fixing", f.fixing, "sd or sdf");
  cmd->add_option("--uw", f.uw, "unfix window N or inf");
  cmd->add_flag("--rins", f.rins, "fix integers agreeing with the LP relaxation");
  cmd->add_option("--workers", f.workers, "parallel LNS workers");
  cmd->add_option("--term-time", f.term_time, "LNS wall-time limit in seconds");
  cmd->add_option("--term-improve", f.term_improve, "stop below this improvement rate (%)");
  cmd->add_option("--term-min-iters", f.term_min_iters, "iterations before the rate counts");
  cmd->add_option("--seeds", f.seeds, "number of seeded runs");
  cmd->add_option("--value-element", f.value_element, "element index for OBJ weights");
  cmd->add_option("--bound-from", f.bound_from, "full-solve, file or oracle");
  cmd->add_option("--bound-file", f.bound_file, "bound for --bound-from file");
  cmd->add_flag("--include-init-time", f.include_init_time,
                "count sliding-windows time in reported times");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-pit mine planning: model, sliding windows and LNS"};
  app.require_subcommand(1);
  Flags f;

  std::string preset = "micro";
  std::string gen_out = "instance.json";
  GenConfig overrides;
  int pits = 0, blocks = 0, periods = 0;
  auto* gen = app.add_subcommand("gen", "generate a synthetic instance");
  gen->add_option("--preset", preset, "micro, t1-like, ot-like or pilbara-like");
  gen->add_option("--pits", pits, "override pit count");
  gen->add_option("--blocks", blocks, "override blocks per pit");
  gen->add_option("--periods", periods, "override period count");
  gen->add_flag("--late-demand", overrides.late_demand, "demand only in the last period");
  gen->add_option("--seed", f.seed, "generator seed");
  gen->add_option("-o,--out", gen_out, "instance file to write");

  std::string instance;
  std::vector<std::string> solutions;
  auto* val = app.add_subcommand("validate", "check solution files against an instance");
  val->add_option("instance", instance)->required()->check(CLI::ExistingFile);
  val->add_option("solutions", solutions)->required()->check(CLI::ExistingFile);
  val->add_option("-o,--out", f.out_dir, "report directory");
  val->add_option("--tol", f.tol, "violation tolerance");

  auto* full = app.add_subcommand("full", "solve the whole horizon");
  full->add_option("instance", instance)->required()->check(CLI::ExistingFile);
  AddSolveFlags(full, f);

  auto* sw = app.add_subcommand("sw", "sliding-windows construction");
  sw->add_option("instance", instance)->required()->check(CLI::ExistingFile);
  AddSolveFlags(sw, f);
  AddSwFlags(sw, f);

  auto* lns = app.add_subcommand("lns", "sliding windows followed by LNS");
  lns->add_option("instance", instance)->required()->check(CLI::ExistingFile);
  AddSolveFlags(lns, f);
  AddSwFlags(lns, f);
  AddLnsFlags(lns, f);

  std::vector<std::string> sw_grid, lns_grid;
  auto* sweep = app.add_subcommand("sweep", "parameter grid with summary CSV");
  sweep->add_option("instance", instance)->required()->check(CLI::ExistingFile);
  sweep->add_option("--sw-grid", sw_grid, "e.g. W=1..7 H=0,2,4 O=0,1,2");
  sweep->add_option("--lns-grid", lns_grid, "e.g. nbar=10,30 fixing=sd,sdf");
  AddSolveFlags(sweep, f);
  AddSwFlags(sweep, f);
  AddLnsFlags(sweep, f);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      GenConfig cfg = mineplan::preset(preset);
      if (pits > 0) cfg.pits = pits;
      if (blocks > 0) cfg.blocks_per_pit = blocks;
      if (periods > 0) cfg.periods = periods;
      cfg.late_demand = cfg.late_demand || overrides.late_demand;
      return cmd_gen(cfg, f.seed, gen_out, std::cout);
    }
    const RunConfig cfg = ToConfig(f);
    if (val->parsed()) {
      std::vector<std::filesystem::path> paths(solutions.begin(), solutions.end());
      return cmd_validate(instance, paths, cfg, std::cout);
    }
    if (full->parsed()) return cmd_full(instance, cfg, std::cout);
    if (sw->parsed()) return cmd_sw(instance, cfg, std::cout);
    if (lns->parsed()) return cmd_lns(instance, cfg, std::cout);
    if (sweep->parsed()) return cmd_sweep(instance, cfg, sw_grid, lns_grid, std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
