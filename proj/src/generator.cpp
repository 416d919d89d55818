#include "mineplan/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "mineplan/errors.hpp"

namespace mineplan {

void GenConfig::validate() const {
  if (pits < 1) throw ConfigError("pit count must be >= 1");
  if (blocks_per_pit < 1) throw ConfigError("blocks per pit must be >= 1");
  if (benches_per_pit < 1) throw ConfigError("benches per pit must be >= 1");
  if (periods < 1) throw ConfigError("periods must be >= 1");
  if (elements < 1) throw ConfigError("element count must be >= 1");
  if (products < 1) throw ConfigError("product count must be >= 1");
  if (max_parcels_per_block < 1) throw ConfigError("parcels per block must be >= 1");
  if (!(discount_rate >= 0.0) || !std::isfinite(discount_rate))
    throw ConfigError("discount rate must be finite and >= 0");
  if (!(ramp_probability >= 0.0 && ramp_probability <= 1.0))
    throw ConfigError("ramp probability must lie in [0, 1]");
}

GenConfig preset(std::string_view name) {
  GenConfig c;
  if (name == "micro") {
    c.blocks_per_pit = 4;
    c.periods = 3;
  } else if (name == "t1-like") {
    c.blocks_per_pit = 64;
    c.benches_per_pit = 4;
    c.periods = 15;
    c.max_parcels_per_block = 1;
  } else if (name == "ot-like") {
    c.pits = 2;
    c.blocks_per_pit = 30;
    c.benches_per_pit = 3;
    c.periods = 15;
    c.elements = 3;
    c.products = 3;
    c.blending = true;
  } else if (name == "pilbara-like") {
    c.pits = 6;
    c.blocks_per_pit = 12;
    c.benches_per_pit = 2;
    c.periods = 15;
    c.elements = 2;
    c.products = 2;
    c.blending = true;
    c.min_production = true;
    c.capex = true;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return c;
}

std::vector<std::string_view> preset_names() {
  return {"micro", "t1-like", "ot-like", "pilbara-like"};
}

namespace {

std::string ElementName(int e) {
  static const char* kNames[] = {"fe", "sio2", "al2o3", "p", "s"};
  return e < 5 ? kNames[e] : "el" + std::to_string(e);
}

// Usage of one pit's resources by the reference schedule, per period.
struct Usage {
  std::vector<double> mined, plant_out, stock_out, dump_out, stock_level;
  explicit Usage(int T)
      : mined(T, 0.0), plant_out(T, 0.0), stock_out(T, 0.0), dump_out(T, 0.0),
        stock_level(T, 0.0) {}
};

double Peak(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

class Generator {
 public:
  Generator(const GenConfig& cfg, std::uint64_t seed)
      : cfg_(cfg), rng_(seed * 0x9E3779B97F4A7C15ULL + 0x1234567ULL), T_(cfg.periods) {}

  InstanceData Run() {
    d_.periods = T_;
    for (int t = 1; t <= T_; ++t)
      d_.discount.push_back(std::pow(1.0 + cfg_.discount_rate, -(t - 1)));
    for (int e = 0; e < cfg_.elements; ++e) d_.elements.push_back(ElementName(e));
    for (int r = 0; r < cfg_.products; ++r) {
      Product p;
      p.id = "prod" + std::to_string(r + 1);
      p.revenue_per_ton = 10.0 + 2.0 * r;
      d_.products.push_back(p);
    }
    if (cfg_.blending) {
      Product w;
      w.id = "waste";
      d_.products.push_back(w);
    }
    arrivals_.assign(cfg_.products, std::vector<double>(T_, 0.0));
    grade_mass_.assign(cfg_.products,
                       std::vector<std::vector<double>>(
                           cfg_.elements, std::vector<double>(T_, 0.0)));
    for (int m = 0; m < cfg_.pits; ++m) MakePit(m);
    SetWindows();
    SetGroups();
    return std::move(d_);
  }

 private:
  double U(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int I(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool Coin(double p) { return U(0.0, 1.0) < p; }

  void MakePit(int m) {
    Pit pit;
    pit.id = "pit" + std::to_string(m + 1);
    const int n = cfg_.blocks_per_pit;
    const int L = std::min(cfg_.benches_per_pit, n);

    // Wider benches on top: bench l gets a share proportional to l + 1.
    std::vector<int> per_bench(L, 1);
    const int total_weight = L * (L + 1) / 2;
    int assigned = L;
    for (int l = 0; l < L; ++l) {
      int extra = (n - L) * (l + 1) / total_weight;
      per_bench[l] += extra;
      assigned += extra;
    }
    for (int l = L - 1; assigned < n; l = (l + L - 1) % L) {
      ++per_bench[l];
      ++assigned;
    }

    std::vector<std::vector<int>> bench_blocks(L);
    int k = 0;
    for (int l = L - 1; l >= 0; --l)
      for (int i = 0; i < per_bench[l]; ++i) {
        Block b;
        b.id = pit.id + "_b" + std::to_string(++k);
        b.pit = pit.id;
        b.bench = l;
        bench_blocks[l].push_back(static_cast<int>(d_.blocks.size()));
        d_.blocks.push_back(std::move(b));
      }

    // Precedences: the block(s) above, plus occasional same-bench ramps from
    // a later position to an earlier one.
    for (int l = 0; l < L; ++l) {
      const int nl = per_bench[l];
      for (int i = 0; i < nl; ++i) {
        const std::string& id = d_.blocks[bench_blocks[l][i]].id;
        if (l + 1 < L) {
          const int nu = per_bench[l + 1];
          const int j0 = std::min(nu - 1, static_cast<int>((i + 0.5) / nl * nu));
          d_.precedences.push_back({id, d_.blocks[bench_blocks[l + 1][j0]].id});
          for (int j : {j0 - 1, j0 + 1})
            if (j >= 0 && j < nu && Coin(0.5))
              d_.precedences.push_back({id, d_.blocks[bench_blocks[l + 1][j]].id});
        }
        if (i > 0 && Coin(cfg_.ramp_probability))
          d_.precedences.push_back({id, d_.blocks[bench_blocks[l][i - 1]].id});
      }
    }

    // Parcels. Deeper benches are richer in ore.
    for (int l = 0; l < L; ++l)
      for (int b : bench_blocks[l]) {
        Block& blk = d_.blocks[b];
        const double depth = L > 1 ? 1.0 - static_cast<double>(l) / (L - 1) : 0.5;
        const double p_ore = cfg_.late_demand ? 1.0 : 0.3 + 0.5 * depth;
        const int np = I(1, cfg_.max_parcels_per_block);
        const double tons = U(8.0, 12.0);
        std::vector<double> share(np);
        double sum = 0.0;
        for (auto& s : share) sum += (s = U(0.5, 1.5));
        for (int q = 0; q < np; ++q) {
          Parcel p;
          p.id = blk.id + "_p" + std::to_string(q + 1);
          const bool ore = Coin(p_ore);
          p.type = ore ? "ore" : "waste";
          p.tonnage = std::round(tons * share[q] / sum * 1000.0) / 1000.0;
          if (ore)
            p.extraction_cost = U(2.0, 6.0);
          else
            p.extraction_cost = cfg_.blending ? U(1.0, 3.0) : U(11.0, 14.0);
          for (int e = 0; e < cfg_.elements; ++e) {
            double g = e == 0 ? (ore ? U(0.45, 0.65) : U(0.1, 0.3)) : U(0.01, 0.1);
            p.grades[ElementName(e)] = std::round(g * 1e4) / 1e4;
          }
          blk.parcels.push_back(std::move(p));
        }
      }

    // Network.
    auto& nodes = pit.network.nodes;
    auto& arcs = pit.network.arcs;
    nodes.push_back({"src", NodeKind::kSource, "", std::nullopt, {}});
    nodes.push_back({"plant", NodeKind::kIntermediate, "", 0.0, {}});
    arcs.push_back({"src", "plant"});
    if (cfg_.stockpiles) {
      nodes.push_back({"stock", NodeKind::kStockpile, "", 0.0, {}});
      arcs.push_back({"src", "stock"});
      arcs.push_back({"stock", "plant"});
    }
    for (int r = 0; r < cfg_.products; ++r) {
      const std::string sink = "out_" + d_.products[r].id;
      nodes.push_back({sink, NodeKind::kProductSink, d_.products[r].id, std::nullopt, {}});
      arcs.push_back({"plant", sink});
    }
    if (cfg_.blending) {
      nodes.push_back({"dump", NodeKind::kIntermediate, "", 0.0, {}});
      nodes.push_back({"out_waste", NodeKind::kProductSink, "waste", std::nullopt, {}});
      arcs.push_back({"src", "dump"});
      arcs.push_back({"dump", "out_waste"});
    }

    // Reference schedule: extraction in topological order (top bench first,
    // positions ascending), whole blocks per period, round-robin routes.
    std::vector<int> order;
    for (int l = L - 1; l >= 0; --l)
      for (int b : bench_blocks[l]) order.push_back(b);
    std::vector<int> period_of(order.size());
    if (cfg_.late_demand) {
      const int reserve = std::max(1, n / 8);
      const int early = std::max(1, (T_ + 1) / 2);
      const int head = n - reserve;
      for (int i = 0; i < n; ++i)
        period_of[i] = i >= head || T_ == 1 ? T_
                                            : std::min(T_ - 1, 1 + i * early / std::max(1, head));
    } else {
      const int used = std::max(1, static_cast<int>(std::ceil(0.75 * T_)));
      for (int i = 0; i < n; ++i) period_of[i] = 1 + i * used / n;
    }

    Usage use(T_);
    double total_tons = 0.0;
    double margin = 0.0;
    int route = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const int t = period_of[i];
      for (const Parcel& p : d_.blocks[order[i]].parcels) {
        total_tons += p.tonnage;
        margin += p.tonnage * std::max(0.0, d_.products[0].revenue_per_ton - p.extraction_cost);
        use.mined[t - 1] += p.tonnage;
        if (cfg_.blending && p.type == "waste") {
          use.dump_out[t - 1] += p.tonnage;
          continue;
        }
        const int r = route % cfg_.products;
        const bool via_stock = cfg_.stockpiles && t < T_ && route % 3 == 2;
        ++route;
        int arrive = t;
        if (via_stock) {
          use.stock_level[t - 1] += p.tonnage;
          use.stock_out[t] += p.tonnage;
          arrive = t + 1;
        }
        use.plant_out[arrive - 1] += p.tonnage;
        arrivals_[r][arrive - 1] += p.tonnage;
        for (int e = 0; e < cfg_.elements; ++e)
          grade_mass_[r][e][arrive - 1] += p.tonnage * p.grades.at(ElementName(e));
      }
    }

    auto cap = [&](const std::vector<double>& v) {
      if (cfg_.late_demand) return std::round(1.1 * total_tons * 1000.0) / 1000.0;
      return std::ceil(std::max(1.1 * Peak(v), 1.0) * 1000.0) / 1000.0;
    };
    pit.mining_capacity = cap(use.mined);
    for (auto& node : nodes) {
      if (node.id == "plant") node.exit_capacity = cap(use.plant_out);
      if (node.id == "dump") node.exit_capacity = cap(use.dump_out);
      if (node.id == "stock") {
        node.exit_capacity = cap(use.stock_out);
        node.stockpile_capacity.assign(T_, cap(use.stock_level));
      }
    }
    pit.capex_cost = cfg_.capex ? std::round(0.15 * margin * 100.0) / 100.0 : 0.0;
    pit_mined_.push_back(use.mined);
    d_.pits.push_back(std::move(pit));
  }

  void SetWindows() {
    if (!cfg_.blending) return;
    for (int r = 0; r < cfg_.products; ++r)
      for (int e = 0; e < cfg_.elements; ++e) {
        double lo = 1.0, hi = 0.0;
        for (int t = 0; t < T_; ++t) {
          if (arrivals_[r][t] <= 0.0) continue;
          const double blend = grade_mass_[r][e][t] / arrivals_[r][t];
          lo = std::min(lo, blend);
          hi = std::max(hi, blend);
        }
        if (lo > hi) {
          lo = 0.0;
          hi = 1.0;
        }
        lo = std::max(0.0, std::floor((lo - 0.02) * 1e4) / 1e4);
        hi = std::min(1.0, std::ceil((hi + 0.02) * 1e4) / 1e4);
        d_.products[r].grade_windows[ElementName(e)] = {lo, hi};
      }
  }

  void SetGroups() {
    if (!cfg_.min_production && !cfg_.late_demand) return;
    std::vector<std::vector<int>> groups;
    if (cfg_.late_demand) {
      groups.emplace_back();
      for (int m = 0; m < cfg_.pits; ++m) groups.back().push_back(m);
    } else {
      for (int m = 0; m < cfg_.pits; m += 2) {
        groups.push_back({m});
        if (m + 1 < cfg_.pits) groups.back().push_back(m + 1);
      }
    }
    for (const auto& g : groups) {
      MinProductionGroup grp;
      grp.minimum.assign(T_, 0.0);
      for (int m : g) grp.pits.push_back(d_.pits[m].id);
      for (int t = 0; t < T_; ++t) {
        if (cfg_.late_demand && t != T_ - 1) continue;
        double prod = 0.0;
        for (int m : g) prod += pit_mined_[m][t];
        grp.minimum[t] = std::floor(0.9 * prod * 1000.0) / 1000.0;
      }
      d_.min_production_groups.push_back(std::move(grp));
    }
  }

  GenConfig cfg_;
  std::mt19937_64 rng_;
  int T_;
  InstanceData d_;
  std::vector<std::vector<double>> arrivals_;                 // [product][t]
  std::vector<std::vector<std::vector<double>>> grade_mass_;  // [product][e][t]
  std::vector<std::vector<double>> pit_mined_;                // [pit][t]
};

}  // namespace

InstanceData generate_instance_data(const GenConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  return Generator(cfg, seed).Run();
}

Instance generate_instance(const GenConfig& cfg, std::uint64_t seed) {
  return Instance(generate_instance_data(cfg, seed));
}

}  // namespace mineplan
