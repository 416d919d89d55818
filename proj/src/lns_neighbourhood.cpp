#include <algorithm>

#include "mineplan/errors.hpp"
#include "mineplan/lns.hpp"

namespace mineplan {

std::vector<int> trigger_blocks(const Instance& inst, int m, const Solution& incumbent) {
  inst.require_pit(m);
  std::vector<int> blocks(inst.pit_blocks(m).begin(), inst.pit_blocks(m).end());
  std::vector<int> start(inst.num_blocks());
  for (int b : blocks) start[b] = start_period(incumbent, b);
  std::sort(blocks.begin(), blocks.end(), [&](int a, int b) {
    if (start[a] != start[b]) return start[a] < start[b];
    return inst.block(a).id < inst.block(b).id;
  });
  return blocks;
}

namespace {

bool Has(std::span<const Strategy> s, Strategy x) {
  return std::find(s.begin(), s.end(), x) != s.end();
}

void RequireApplicable(const Instance& inst, std::span<const Strategy> strategies) {
  for (Strategy s : strategies) {
    if (s == Strategy::kBlending) {
      bool any = false;
      for (int r = 0; r < inst.num_products(); ++r)
        any = any || !inst.product(r).grade_windows.empty();
      if (!any) throw StrategyInapplicable("Blending needs grade windows");
    } else if (s == Strategy::kPitLinks) {
      if (inst.num_groups() == 0)
        throw StrategyInapplicable("PitLinks needs minimum-production groups");
    } else if (s == Strategy::kTrigger) {
      bool any = false;
      for (int m = 0; m < inst.num_pits(); ++m) any = any || inst.pit(m).capex_cost > 0.0;
      if (!any) throw StrategyInapplicable("Trigger needs pits with capex");
    }
  }
}

Neighbourhood TriggerMode(const Instance& inst, const Solution& incumbent, int nbar,
                          Rng& rng) {
  Neighbourhood nb;
  nb.strategy_tags.insert(Strategy::kTrigger);
  std::vector<int> pits;
  for (int m = 0; m < inst.num_pits(); ++m)
    if (inst.pit(m).capex_cost > 0.0) pits.push_back(m);
  std::set<int> exhausted;
  while (static_cast<int>(nb.blocks.size()) < nbar && exhausted.size() < pits.size()) {
    std::uniform_int_distribution<std::size_t> pick(0, pits.size() - 1);
    const int m = pits[pick(rng)];
    const auto list = trigger_blocks(inst, m, incumbent);
    nb.focals.push_back(list.front());
    for (int b : list) {
      if (static_cast<int>(nb.blocks.size()) >= nbar) break;
      nb.blocks.insert(b);
    }
    if (std::all_of(list.begin(), list.end(), [&](int b) { return nb.blocks.count(b); }))
      exhausted.insert(m);
  }
  return nb;
}

// Pits sharing a minimum-production group with any pit in `covered`.
std::set<int> LinkedPits(const Instance& inst, const std::set<int>& covered) {
  std::set<int> out = covered;
  for (int k = 0; k < inst.num_groups(); ++k) {
    const auto g = inst.group_pits(k);
    const bool touches =
        std::any_of(g.begin(), g.end(), [&](int m) { return covered.count(m) > 0; });
    if (touches) out.insert(g.begin(), g.end());
  }
  return out;
}

Neighbourhood PathMode(const Instance& inst, const Solution& incumbent,
                       const WeightVector& base, std::span<const Strategy> strategies,
                       int nbar, Rng& rng) {
  const bool blending = Has(strategies, Strategy::kBlending);
  const bool timing = Has(strategies, Strategy::kTiming);
  const bool pitlinks = Has(strategies, Strategy::kPitLinks);
  const int T = inst.periods();
  std::vector<int> S(inst.num_blocks()), F(inst.num_blocks());
  for (int b = 0; b < inst.num_blocks(); ++b) {
    S[b] = start_period(incumbent, b);
    F[b] = finish_period(incumbent, b);
  }

  Neighbourhood nb;
  for (int attempt = 0; attempt <= kTimingMaxRebuilds; ++attempt) {
    nb = Neighbourhood{};
    for (Strategy s : strategies)
      if (s != Strategy::kNone) nb.strategy_tags.insert(s);
    if (nb.strategy_tags.empty()) nb.strategy_tags.insert(Strategy::kNone);
    BlendingLedger ledger;
    std::set<int> covered;
    std::optional<std::pair<int, int>> window;
    bool scheduled_focal = false;

    while (static_cast<int>(nb.blocks.size()) < nbar) {
      auto masked = [&](bool with_pitlinks) {
        WeightVector w = base;
        std::set<int> allowed_pits;
        if (with_pitlinks && !covered.empty()) allowed_pits = LinkedPits(inst, covered);
        for (int b = 0; b < inst.num_blocks(); ++b) {
          double& v = w.weights[b];
          if (v <= 0.0) continue;
          if (nb.blocks.count(b)) v = 0.0;
          else if (blending && ledger.harmful(inst, b)) v = 0.0;
          else if (window && !((S[b] >= window->first && S[b] <= window->second) ||
                               (F[b] >= window->first && F[b] <= window->second)))
            v = 0.0;
          else if (with_pitlinks && !covered.empty() &&
                   !allowed_pits.count(inst.pit_of_block(b)))
            v = 0.0;
        }
        return w;
      };
      WeightVector w = masked(pitlinks);
      if (!w.any_positive() && pitlinks) w = masked(false);
      if (!w.any_positive()) {
        if (nb.blocks.empty() && !base.any_positive())
          throw EmptyWeightVector("no block has a positive weight");
        break;
      }
      const int f = sample_focal(w, rng);
      nb.focals.push_back(f);
      const int room = nbar - static_cast<int>(nb.blocks.size());
      for (int b : form_path(inst, base, f, room, rng)) {
        if (nb.blocks.insert(b).second) {
          if (blending) ledger.add(inst, b);
          covered.insert(inst.pit_of_block(b));
        }
      }
      if (timing && S[f] < T + 1) {
        scheduled_focal = true;
        if (!window) window = std::make_pair(S[f], F[f]);
      }
    }
    if (!timing || scheduled_focal) break;
  }
  return nb;
}

}  // namespace

Neighbourhood form_neighbourhood(const Instance& inst, const Solution& incumbent,
                                 const WeightVector& weights,
                                 std::span<const Strategy> strategies, int nbar,
                                 Rng& rng) {
  require_dimensions(inst, incumbent);
  if (static_cast<int>(weights.weights.size()) != inst.num_blocks())
    throw DimensionMismatch("weight vector does not match block count");
  if (nbar < 1) throw ConfigError("nbar must be >= 1");
  RequireApplicable(inst, strategies);
  if (Has(strategies, Strategy::kTrigger)) return TriggerMode(inst, incumbent, nbar, rng);
  return PathMode(inst, incumbent, weights, strategies, nbar, rng);
}

}  // namespace mineplan
