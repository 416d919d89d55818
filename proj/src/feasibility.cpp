// Independent checker for planning solutions. Every constraint is evaluated
// straight from the instance data in the same units as the model rows:
// tonnage rows in tons, fraction rows in fractions. The flow link is checked
// in tonnage form (sum of tau_p * f leaving the source equals
// tau_b * (x^t - x^{t-1})) and each parcel's total extraction is bounded by 1.

#include "mineplan/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "mineplan/errors.hpp"

namespace mineplan {

bool ViolationReport::has(ConstraintFamily family) const {
  return std::any_of(entries.begin(), entries.end(),
                     [&](const Violation& v) { return v.family == family; });
}

std::string ViolationReport::to_json() const {
  nlohmann::json j;
  j["header"] = header;
  j["tolerance"] = tolerance;
  j["max_violation"] = max_violation;
  j["entries"] = nlohmann::json::array();
  for (const auto& v : entries)
    j["entries"].push_back({{"constraint_family", std::string(ToString(v.family))},
                            {"indices", v.indices},
                            {"magnitude", v.magnitude}});
  return j.dump(1);
}

namespace {

class Checker {
 public:
  Checker(const Instance& inst, const Solution& sol, double tol)
      : inst_(inst), sol_(sol), tol_(tol), T_(inst.periods()) {
    report_.tolerance = tol;
    report_.header =
        "flow link checked in tons: sum_p tau_p f(source->*) = tau_b (x^t - x^{t-1}); "
        "parcel extraction bounded by 1 (fraction of parcel tonnage)";
  }

  ViolationReport Run() {
    Domains();
    Blending();
    PitRows();
    MinProduction();
    ParcelRows();
    BlockRows();
    return std::move(report_);
  }

 private:
  // Records max(lhs - hi, lo - lhs) when it exceeds tol.
  void Check(ConstraintFamily fam, double lhs, double lo, double hi,
             const std::string& where) {
    const double mag = std::max(lo - lhs, lhs - hi);
    Record(fam, mag, where);
  }

  void Record(ConstraintFamily fam, double mag, const std::string& where) {
    if (!(mag <= tol_)) {
      if (std::isnan(mag)) mag = std::numeric_limits<double>::infinity();
      report_.entries.push_back({fam, where, mag});
      report_.max_violation = std::max(report_.max_violation, mag);
    }
  }

  std::string BlockAt(int b, int t) const {
    return "block=" + inst_.block(b).id + " period=" + std::to_string(t);
  }
  std::string ParcelAt(int p, int t) const {
    return "parcel=" + inst_.parcel(p).id + " period=" + std::to_string(t);
  }
  std::string PitAt(int m, int t) const {
    return "pit=" + inst_.pit(m).id + " period=" + std::to_string(t);
  }
  const std::string& NodeId(int m, int n) const {
    return inst_.pit(m).network.nodes[n].id;
  }
  int PitOfParcel(int p) const { return inst_.pit_of_block(inst_.block_of_parcel(p)); }

  void Continuous(double v, const std::string& where) {
    if (!std::isfinite(v)) {
      Record(ConstraintFamily::kBounds, std::numeric_limits<double>::infinity(), where);
      return;
    }
    Record(ConstraintFamily::kBounds, std::max(-v, v - 1.0), where);
  }

  void Binary(double v, const std::string& where) {
    Continuous(v, where);
    if (std::isfinite(v)) {
      const double frac = std::abs(v - std::round(v));
      if (frac > kIntegerToleranceLocal) {
        report_.entries.push_back({ConstraintFamily::kIntegrality, where, frac});
        report_.max_violation = std::max(report_.max_violation, frac);
      }
    }
  }

  void Domains() {
    for (int b = 0; b < inst_.num_blocks(); ++b)
      for (int t = 1; t <= T_; ++t) {
        Continuous(sol_.x[b][t - 1], "x " + BlockAt(b, t));
        Binary(sol_.y[b][t - 1], "y " + BlockAt(b, t));
        Binary(sol_.z[b][t - 1], "z " + BlockAt(b, t));
      }
    for (int p = 0; p < inst_.num_parcels(); ++p)
      for (int t = 1; t <= T_; ++t) {
        for (std::size_t a = 0; a < sol_.f[p].size(); ++a)
          Continuous(sol_.f[p][a][t - 1],
                     "f " + ParcelAt(p, t) + " arc=" + std::to_string(a));
        for (std::size_t k = 0; k < sol_.s[p].size(); ++k)
          Continuous(sol_.s[p][k][t - 1],
                     "s " + ParcelAt(p, t) + " slot=" + std::to_string(k));
      }
    for (int m = 0; m < inst_.num_pits(); ++m)
      for (int t = 1; t <= T_; ++t) {
        Binary(sol_.wi[m][t - 1], "wi " + PitAt(m, t));
        Binary(sol_.wp[m][t - 1], "wp " + PitAt(m, t));
      }
  }

  // Tons of parcel p moved along arc a of its pit in period t.
  double Tons(int p, int a, int t) const {
    return inst_.tonnage(p) * sol_.f[p][a][t - 1];
  }

  double ParcelMined(int p, int t) const {
    const PitNetwork& net = inst_.network(PitOfParcel(p));
    double sum = 0.0;
    for (int a : net.out_arcs[net.source]) sum += sol_.f[p][a][t - 1];
    return sum;
  }

  double PitMinedTons(int m, int t) const {
    double sum = 0.0;
    for (int b : inst_.pit_blocks(m))
      for (int q = 0; q < inst_.parcel_count(b); ++q) {
        const int p = inst_.first_parcel(b) + q;
        sum += inst_.tonnage(p) * ParcelMined(p, t);
      }
    return sum;
  }

  void Blending() {
    for (int r = 0; r < inst_.num_products(); ++r) {
      const Product& prod = inst_.product(r);
      for (const auto& [ename, window] : prod.grade_windows) {
        const int e = inst_.element_index(ename);
        for (int t = 1; t <= T_; ++t) {
          double below = 0.0, above = 0.0;
          for (int p = 0; p < inst_.num_parcels(); ++p) {
            const PitNetwork& net = inst_.network(PitOfParcel(p));
            const double g = e >= 0 ? inst_.grade(p, e) : 0.0;
            for (std::size_t a = 0; a < net.arcs.size(); ++a) {
              if (net.product[net.arcs[a].second] != r) continue;
              const double tons = Tons(p, static_cast<int>(a), t);
              below += (g - window.first) * tons;
              above += (g - window.second) * tons;
            }
          }
          const std::string where = "product=" + prod.id + " element=" + ename +
                                    " period=" + std::to_string(t);
          Record(ConstraintFamily::kBlendMin, -below, where);
          Record(ConstraintFamily::kBlendMax, above, where);
        }
      }
    }
  }

  void PitRows() {
    for (int m = 0; m < inst_.num_pits(); ++m) {
      const Pit& pit = inst_.pit(m);
      const PitNetwork& net = inst_.network(m);
      double opened = 0.0;
      for (int t = 1; t <= T_; ++t) {
        for (std::size_t n = 0; n < pit.network.nodes.size(); ++n) {
          const Node& node = pit.network.nodes[n];
          if (static_cast<int>(n) == net.source || node.kind == NodeKind::kProductSink ||
              !node.exit_capacity)
            continue;
          double out = 0.0;
          for (int b : inst_.pit_blocks(m))
            for (int q = 0; q < inst_.parcel_count(b); ++q)
              for (int a : net.out_arcs[n]) out += Tons(inst_.first_parcel(b) + q, a, t);
          Check(ConstraintFamily::kNodeCapacity, out, -INFINITY, *node.exit_capacity,
                "node=" + node.id + " " + PitAt(m, t));
        }
        const double wp = sol_.wp[m][t - 1];
        Check(ConstraintFamily::kMiningCapacity,
              PitMinedTons(m, t) - pit.mining_capacity * wp, -INFINITY, 0.0,
              PitAt(m, t));
        opened += sol_.wi[m][t - 1];
        Check(ConstraintFamily::kPitActivation, wp - opened, -INFINITY, 0.0,
              PitAt(m, t));
        for (std::size_t k = 0; k < net.stockpiles.size(); ++k) {
          double stock = 0.0;
          for (int b : inst_.pit_blocks(m))
            for (int q = 0; q < inst_.parcel_count(b); ++q) {
              const int p = inst_.first_parcel(b) + q;
              stock += inst_.tonnage(p) * sol_.s[p][k][t - 1];
            }
          const Node& node = pit.network.nodes[net.stockpiles[k]];
          Check(ConstraintFamily::kStockpileCapacity, stock, -INFINITY,
                node.stockpile_capacity[t - 1],
                "stockpile=" + node.id + " " + PitAt(m, t));
        }
      }
    }
  }

  void MinProduction() {
    for (int k = 0; k < inst_.num_groups(); ++k) {
      const auto& minimum = inst_.data().min_production_groups[k].minimum;
      for (int t = 1; t <= T_; ++t) {
        double mined = 0.0;
        for (int m : inst_.group_pits(k)) mined += PitMinedTons(m, t);
        Check(ConstraintFamily::kMinProduction, mined, minimum[t - 1], INFINITY,
              "group=" + std::to_string(k) + " period=" + std::to_string(t));
      }
    }
  }

  void ParcelRows() {
    for (int p = 0; p < inst_.num_parcels(); ++p) {
      const int m = PitOfParcel(p);
      const PitNetwork& net = inst_.network(m);
      double total = 0.0;
      for (int t = 1; t <= T_; ++t) {
        for (std::size_t n = 0; n < net.kind.size(); ++n) {
          if (net.kind[n] != NodeKind::kIntermediate) continue;
          double in = 0.0, out = 0.0;
          for (int a : net.in_arcs[n]) in += sol_.f[p][a][t - 1];
          for (int a : net.out_arcs[n]) out += sol_.f[p][a][t - 1];
          Check(ConstraintFamily::kMassBalance, in - out, 0.0, 0.0,
                "node=" + NodeId(m, static_cast<int>(n)) + " " + ParcelAt(p, t));
        }
        for (std::size_t k = 0; k < net.stockpiles.size(); ++k) {
          const int n = net.stockpiles[k];
          double in = 0.0, out = 0.0;
          for (int a : net.in_arcs[n]) in += sol_.f[p][a][t - 1];
          for (int a : net.out_arcs[n]) out += sol_.f[p][a][t - 1];
          const double prev = t > 1 ? sol_.s[p][k][t - 2] : 0.0;
          const double now = sol_.s[p][k][t - 1];
          const std::string where = "stockpile=" + NodeId(m, n) + " " + ParcelAt(p, t);
          Check(ConstraintFamily::kStockpileBalance, now - prev - in + out, 0.0, 0.0,
                where);
          Check(ConstraintFamily::kStockpileOutflow, out - prev, -INFINITY, 0.0,
                where);
        }
        total += ParcelMined(p, t);
      }
      Check(ConstraintFamily::kParcelAvailability, total, -INFINITY, 1.0,
            "parcel=" + inst_.parcel(p).id);
    }
  }

  void BlockRows() {
    for (int i = 0; i < inst_.num_blocks(); ++i)
      for (int j : inst_.requires_blocks(i))
        for (int t = 1; t <= T_; ++t)
          Check(ConstraintFamily::kPrecedence, sol_.z[i][t - 1] - sol_.y[j][t - 1],
                -INFINITY, 0.0,
                "block=" + inst_.block(i).id + " requires=" + inst_.block(j).id +
                    " period=" + std::to_string(t));
    for (int b = 0; b < inst_.num_blocks(); ++b) {
      const auto& x = sol_.x[b];
      const auto& y = sol_.y[b];
      const auto& z = sol_.z[b];
      for (int t = 1; t <= T_; ++t) {
        const int i = t - 1;
        const std::string where = BlockAt(b, t);
        Check(ConstraintFamily::kStartBeforeProgress, x[i] - z[i], -INFINITY, 0.0, where);
        Check(ConstraintFamily::kDepletion, y[i] - x[i], -INFINITY, 0.0, where);
        if (t < T_) {
          Check(ConstraintFamily::kMonotoneX, x[i] - x[i + 1], -INFINITY, 0.0, where);
          Check(ConstraintFamily::kMonotoneY, y[i] - y[i + 1], -INFINITY, 0.0, where);
          Check(ConstraintFamily::kMonotoneZ, z[i] - z[i + 1], -INFINITY, 0.0, where);
        }
        double mined = 0.0;
        for (int q = 0; q < inst_.parcel_count(b); ++q) {
          const int p = inst_.first_parcel(b) + q;
          mined += inst_.tonnage(p) * ParcelMined(p, t);
        }
        const double progress = x[i] - (t > 1 ? x[i - 1] : 0.0);
        Check(ConstraintFamily::kFlowLink, mined - inst_.block_tonnage(b) * progress,
              0.0, 0.0, where);
      }
    }
  }

  static constexpr double kIntegerToleranceLocal = 1e-5;

  const Instance& inst_;
  const Solution& sol_;
  double tol_;
  int T_;
  ViolationReport report_;
};

}  // namespace

ViolationReport validate(const Instance& inst, const Solution& sol, double tol) {
  require_dimensions(inst, sol);
  return Checker(inst, sol, tol).Run();
}

double npv(const Instance& inst, const Solution& sol) {
  require_dimensions(inst, sol);
  double total = 0.0;
  for (int t = 1; t <= inst.periods(); ++t) {
    double cash = 0.0;
    for (int m = 0; m < inst.num_pits(); ++m) {
      const PitNetwork& net = inst.network(m);
      cash -= inst.pit(m).capex_cost * sol.wi[m][t - 1];
      for (int b : inst.pit_blocks(m))
        for (int q = 0; q < inst.parcel_count(b); ++q) {
          const int p = inst.first_parcel(b) + q;
          const double tau = inst.tonnage(p);
          for (std::size_t a = 0; a < net.arcs.size(); ++a) {
            const auto [from, to] = net.arcs[a];
            const double f = sol.f[p][a][t - 1];
            if (net.kind[to] == NodeKind::kProductSink)
              cash += tau * inst.product(net.product[to]).revenue_per_ton * f;
            if (from == net.source) cash -= tau * inst.cost(p) * f;
          }
        }
    }
    total += inst.discount(t) * cash;
  }
  return total;
}

double gap_to_bound(double objective, double bound) {
  if (!(bound >= objective - 1e-9)) {
    std::ostringstream msg;
    msg << "bound " << bound << " is below objective " << objective;
    throw InvalidBound(msg.str());
  }
  return 100.0 * (bound - objective) / std::max(1e-10, std::abs(bound));
}

}  // namespace mineplan
