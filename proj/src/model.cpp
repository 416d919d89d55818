#include "mineplan/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "mineplan/errors.hpp"

namespace mineplan {

std::string_view ToString(VarKind kind) {
  switch (kind) {
    case VarKind::kX: return "x";
    case VarKind::kY: return "y";
    case VarKind::kZ: return "z";
    case VarKind::kF: return "f";
    case VarKind::kS: return "s";
    case VarKind::kWI: return "wi";
    case VarKind::kWP: return "wp";
  }
  return "?";
}

std::string ToString(const VarKey& key) {
  std::string out(ToString(key.kind));
  out += "[" + std::to_string(key.entity);
  if (key.kind == VarKind::kF || key.kind == VarKind::kS)
    out += "," + std::to_string(key.sub);
  out += "]@" + std::to_string(key.period);
  return out;
}

int LinearModel::add_column(double lower, double upper, double cost,
                            bool integer) {
  col_lower.push_back(lower);
  col_upper.push_back(upper);
  col_cost.push_back(cost);
  col_integer.push_back(integer ? 1 : 0);
  return num_cols() - 1;
}

void LinearModel::add_row(double lower, double upper, ConstraintFamily family,
                          std::span<const int> index,
                          std::span<const double> value) {
  row_lower.push_back(lower);
  row_upper.push_back(upper);
  row_family.push_back(family);
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (value[k] == 0.0) continue;
    row_index.push_back(index[k]);
    row_value.push_back(value[k]);
  }
  row_start.push_back(static_cast<int>(row_index.size()));
}

double LinearModel::row_activity(int row, std::span<const double> values) const {
  double sum = 0.0;
  for (int k = row_start[row]; k < row_start[row + 1]; ++k)
    sum += row_value[k] * values[row_index[k]];
  return sum;
}

namespace {

std::atomic<std::uint64_t> next_structure_id{1};

constexpr double kInf = 1e30;

// Accumulates one row's coefficients.
struct RowBuf {
  std::vector<int> idx;
  std::vector<double> val;
  void add(int c, double v) {
    idx.push_back(c);
    val.push_back(v);
  }
  void clear() {
    idx.clear();
    val.clear();
  }
  bool empty() const { return idx.empty(); }
};

}  // namespace

std::optional<int> ModelHandle::column(const VarKey& key) const {
  const Instance& inst = *inst_;
  const int P = last_period_;
  if (key.period < 1 || key.period > P) return std::nullopt;
  const int t = key.period - 1;
  switch (key.kind) {
    case VarKind::kX:
    case VarKind::kY:
    case VarKind::kZ: {
      if (key.entity < 0 || key.entity >= inst.num_blocks() || key.sub != 0)
        return std::nullopt;
      int base = key.kind == VarKind::kX ? base_x_
                 : key.kind == VarKind::kY ? base_y_ : base_z_;
      return base + key.entity * P + t;
    }
    case VarKind::kWI:
    case VarKind::kWP: {
      if (key.entity < 0 || key.entity >= inst.num_pits() || key.sub != 0)
        return std::nullopt;
      int base = key.kind == VarKind::kWI ? base_wi_ : base_wp_;
      return base + key.entity * P + t;
    }
    case VarKind::kF:
      if (key.entity < 0 || key.entity >= inst.num_parcels() || key.sub < 0 ||
          key.sub >= f_arcs_[key.entity])
        return std::nullopt;
      return f_base_[key.entity] + key.sub * P + t;
    case VarKind::kS:
      if (key.entity < 0 || key.entity >= inst.num_parcels() || key.sub < 0 ||
          key.sub >= s_slots_[key.entity])
        return std::nullopt;
      return s_base_[key.entity] + key.sub * P + t;
  }
  return std::nullopt;
}

int ModelHandle::require_column(const VarKey& key) const {
  auto c = column(key);
  if (!c) throw UnknownVariable("no variable " + ToString(key) + " in model");
  return *c;
}

VarKey ModelHandle::key_of(int column) const {
  if (column < 0 || column >= num_columns())
    throw UnknownVariable("column " + std::to_string(column) + " out of range");
  return keys_[column];
}

std::vector<VarKey> ModelHandle::integer_keys() const {
  std::vector<VarKey> out;
  for (int c = 0; c < num_columns(); ++c)
    if (lp_.col_integer[c]) out.push_back(keys_[c]);
  return out;
}

void ModelHandle::apply_fixes(const FixSet& fixes) {
  for (const auto& [key, value] : fixes.assignments) {
    const int c = require_column(key);
    if (!std::isfinite(value))
      throw RangeError("non-finite fix value for " + ToString(key));
    double v = value;
    if (key.is_integer_kind() && lp_.col_integer[c]) {
      double r = std::round(v);
      if (std::abs(v - r) > kIntegerTolerance || r < 0.0 || r > 1.0)
        throw RangeError("binary " + ToString(key) + " fixed to non-binary " +
                         std::to_string(v));
      v = r;
    } else {
      if (v < -kIntegerTolerance || v > 1.0 + kIntegerTolerance)
        throw RangeError("value for " + ToString(key) + " outside [0, 1]");
      v = std::clamp(v, 0.0, 1.0);
    }
    saved_bounds_.try_emplace(c, lp_.col_lower[c], lp_.col_upper[c]);
    lp_.col_lower[c] = v;
    lp_.col_upper[c] = v;
  }
}

void ModelHandle::clear_fixes() {
  for (const auto& [c, lu] : saved_bounds_) {
    lp_.col_lower[c] = lu.first;
    lp_.col_upper[c] = lu.second;
  }
  saved_bounds_.clear();
}

std::vector<double> ModelHandle::columns_from(const Solution& sol) const {
  require_dimensions(*inst_, sol);
  std::vector<double> v(num_columns(), 0.0);
  for (int c = 0; c < num_columns(); ++c) {
    const VarKey& k = keys_[c];
    const int t = k.period - 1;
    switch (k.kind) {
      case VarKind::kX: v[c] = sol.x[k.entity][t]; break;
      case VarKind::kY: v[c] = sol.y[k.entity][t]; break;
      case VarKind::kZ: v[c] = sol.z[k.entity][t]; break;
      case VarKind::kF: v[c] = sol.f[k.entity][k.sub][t]; break;
      case VarKind::kS: v[c] = sol.s[k.entity][k.sub][t]; break;
      case VarKind::kWI: v[c] = sol.wi[k.entity][t]; break;
      case VarKind::kWP: v[c] = sol.wp[k.entity][t]; break;
    }
  }
  return v;
}

void ModelHandle::warm_start(const Solution& sol) { start_ = columns_from(sol); }

double ModelHandle::objective_value(std::span<const double> values) const {
  if (values.size() != static_cast<std::size_t>(num_columns()))
    throw DimensionMismatch("value vector does not match model columns");
  double obj = 0.0;
  for (int c = 0; c < num_columns(); ++c) obj += lp_.col_cost[c] * values[c];
  return obj;
}

Solution ModelHandle::to_solution(std::span<const double> values) const {
  if (values.size() != static_cast<std::size_t>(num_columns()))
    throw DimensionMismatch("value vector does not match model columns");
  std::vector<double> clean(values.begin(), values.end());
  for (int c = 0; c < num_columns(); ++c) {
    double v = clean[c];
    if (keys_[c].is_integer_kind()) {
      double r = std::round(v);
      if (std::abs(v - r) <= kIntegerTolerance) v = r;
    }
    clean[c] = std::clamp(v, 0.0, 1.0);
  }
  Solution sol = Solution::Zeros(*inst_);
  for (int c = 0; c < num_columns(); ++c) {
    const VarKey& k = keys_[c];
    const int t = k.period - 1;
    const double v = clean[c];
    switch (k.kind) {
      case VarKind::kX: sol.x[k.entity][t] = v; break;
      case VarKind::kY: sol.y[k.entity][t] = v; break;
      case VarKind::kZ: sol.z[k.entity][t] = v; break;
      case VarKind::kF: sol.f[k.entity][k.sub][t] = v; break;
      case VarKind::kS: sol.s[k.entity][k.sub][t] = v; break;
      case VarKind::kWI: sol.wi[k.entity][t] = v; break;
      case VarKind::kWP: sol.wp[k.entity][t] = v; break;
    }
  }
  sol.objective = objective_value(clean);
  return sol;
}

std::vector<RowViolation> ModelHandle::violations(std::span<const double> values,
                                                  double tol) const {
  if (values.size() != static_cast<std::size_t>(num_columns()))
    throw DimensionMismatch("value vector does not match model columns");
  std::vector<RowViolation> out;
  for (int r = 0; r < lp_.num_rows(); ++r) {
    const double a = lp_.row_activity(r, values);
    const double mag =
        std::max(lp_.row_lower[r] - a, a - lp_.row_upper[r]);
    if (mag > tol) out.push_back({lp_.row_family[r], r, -1, mag});
  }
  for (int c = 0; c < num_columns(); ++c) {
    const double v = values[c];
    const double lo = lp_.col_lower[c], hi = lp_.col_upper[c];
    const double mag = std::max(lo - v, v - hi);
    if (mag > tol) out.push_back({ConstraintFamily::kBounds, -1, c, mag});
    if (lp_.col_integer[c]) {
      const double frac = std::abs(v - std::round(v));
      if (frac > kIntegerTolerance)
        out.push_back({ConstraintFamily::kIntegrality, -1, c, frac});
    }
  }
  return out;
}

ModelHandle build_model(const Instance& inst, int first_period, int last_period,
                        const RelaxSpec& relax) {
  const int T = inst.periods();
  if (first_period < 1 || first_period > last_period || last_period > T)
    throw RangeError("invalid period range [" + std::to_string(first_period) +
                     ", " + std::to_string(last_period) + "] for horizon " +
                     std::to_string(T));
  for (int t : relax.relaxed_periods)
    if (t < first_period || t > last_period)
      throw RangeError("relaxed period " + std::to_string(t) +
                       " outside model range");
  for (int b = 0; b < inst.num_blocks(); ++b)
    if (!(inst.block_tonnage(b) > 0.0))
      throw CapacityError("block '" + inst.block(b).id + "' has zero tonnage");

  ModelHandle h(inst);
  h.first_period_ = first_period;
  h.last_period_ = last_period;
  h.relax_ = relax;
  h.structure_id_ = next_structure_id.fetch_add(1);

  const int P = last_period;
  const int B = inst.num_blocks();
  const int M = inst.num_pits();
  const int NP = inst.num_parcels();
  LinearModel& lp = h.lp_;
  auto relaxed = [&](int t) { return relax.relaxed_periods.count(t) > 0; };

  auto add_series = [&](VarKind kind, int entity, int sub, auto cost_of) {
    for (int t = 1; t <= P; ++t) {
      const bool integer =
          VarKey{kind, entity, sub, t}.is_integer_kind() && !relaxed(t);
      lp.add_column(0.0, 1.0, cost_of(t), integer);
      h.keys_.push_back({kind, entity, sub, t});
    }
  };
  auto zero = [](int) { return 0.0; };

  h.base_x_ = lp.num_cols();
  for (int b = 0; b < B; ++b) add_series(VarKind::kX, b, 0, zero);
  h.base_y_ = lp.num_cols();
  for (int b = 0; b < B; ++b) add_series(VarKind::kY, b, 0, zero);
  h.base_z_ = lp.num_cols();
  for (int b = 0; b < B; ++b) add_series(VarKind::kZ, b, 0, zero);

  h.f_base_.resize(NP);
  h.f_arcs_.resize(NP);
  h.s_base_.resize(NP);
  h.s_slots_.resize(NP);
  for (int p = 0; p < NP; ++p) {
    const int m = inst.pit_of_block(inst.block_of_parcel(p));
    const PitNetwork& net = inst.network(m);
    const double tau = inst.tonnage(p);
    h.f_base_[p] = lp.num_cols();
    h.f_arcs_[p] = static_cast<int>(net.arcs.size());
    for (std::size_t a = 0; a < net.arcs.size(); ++a) {
      const auto [from, to] = net.arcs[a];
      double unit = 0.0;
      if (net.kind[to] == NodeKind::kProductSink)
        unit += tau * inst.product(net.product[to]).revenue_per_ton;
      if (from == net.source) unit -= tau * inst.cost(p);
      add_series(VarKind::kF, p, static_cast<int>(a),
                 [&](int t) { return inst.discount(t) * unit; });
    }
  }
  for (int p = 0; p < NP; ++p) {
    const int m = inst.pit_of_block(inst.block_of_parcel(p));
    const PitNetwork& net = inst.network(m);
    h.s_base_[p] = lp.num_cols();
    h.s_slots_[p] = static_cast<int>(net.stockpiles.size());
    for (std::size_t k = 0; k < net.stockpiles.size(); ++k)
      add_series(VarKind::kS, p, static_cast<int>(k), zero);
  }
  h.base_wi_ = lp.num_cols();
  for (int m = 0; m < M; ++m) {
    const double capex = inst.pit(m).capex_cost;
    add_series(VarKind::kWI, m, 0,
               [&](int t) { return -inst.discount(t) * capex; });
  }
  h.base_wp_ = lp.num_cols();
  for (int m = 0; m < M; ++m) add_series(VarKind::kWP, m, 0, zero);

  auto col = [&](VarKind kind, int entity, int sub, int t) {
    return *h.column({kind, entity, sub, t});
  };
  RowBuf row;
  auto emit = [&](double lo, double hi, ConstraintFamily fam) {
    lp.add_row(lo, hi, fam, row.idx, row.val);
    row.clear();
  };

  // Blending windows per product sink, element, period.
  for (int r = 0; r < inst.num_products(); ++r) {
    for (const auto& [ename, window] : inst.product(r).grade_windows) {
      const int e = inst.element_index(ename);
      for (int side = 0; side < 2; ++side) {
        const double bound = side == 0 ? window.first : window.second;
        for (int t = 1; t <= P; ++t) {
          for (int p = 0; p < NP; ++p) {
            const int m = inst.pit_of_block(inst.block_of_parcel(p));
            const PitNetwork& net = inst.network(m);
            const double g = e >= 0 ? inst.grade(p, e) : 0.0;
            for (std::size_t a = 0; a < net.arcs.size(); ++a) {
              const int to = net.arcs[a].second;
              if (net.product[to] != r) continue;
              row.add(col(VarKind::kF, p, static_cast<int>(a), t),
                      (g - bound) * inst.tonnage(p));
            }
          }
          if (side == 0)
            emit(0.0, kInf, ConstraintFamily::kBlendMin);
          else
            emit(-kInf, 0.0, ConstraintFamily::kBlendMax);
        }
      }
    }
  }

  for (int m = 0; m < M; ++m) {
    const PitNetwork& net = inst.network(m);
    const auto& nodes = inst.pit(m).network.nodes;
    const auto blocks = inst.pit_blocks(m);
    auto for_pit_parcels = [&](auto fn) {
      for (int b : blocks)
        for (int p = inst.first_parcel(b); p < inst.first_parcel(b) + inst.parcel_count(b); ++p)
          fn(p);
    };
    for (int t = 1; t <= P; ++t) {
      // Exit capacity at every node other than the source and product sinks.
      for (std::size_t n = 0; n < nodes.size(); ++n) {
        if (static_cast<int>(n) == net.source ||
            net.kind[n] == NodeKind::kProductSink || !nodes[n].exit_capacity)
          continue;
        for_pit_parcels([&](int p) {
          for (int a : net.out_arcs[n])
            row.add(col(VarKind::kF, p, a, t), inst.tonnage(p));
        });
        emit(-kInf, *nodes[n].exit_capacity, ConstraintFamily::kNodeCapacity);
      }
      // Mining capacity gated by the pit being open.
      for_pit_parcels([&](int p) {
        for (int a : net.out_arcs[net.source])
          row.add(col(VarKind::kF, p, a, t), inst.tonnage(p));
      });
      row.add(col(VarKind::kWP, m, 0, t), -inst.pit(m).mining_capacity);
      emit(-kInf, 0.0, ConstraintFamily::kMiningCapacity);
      // Open only after an opening decision.
      row.add(col(VarKind::kWP, m, 0, t), 1.0);
      for (int u = 1; u <= t; ++u) row.add(col(VarKind::kWI, m, 0, u), -1.0);
      emit(-kInf, 0.0, ConstraintFamily::kPitActivation);
    }
    // Stockpile capacity.
    for (std::size_t k = 0; k < net.stockpiles.size(); ++k) {
      const Node& node = nodes[net.stockpiles[k]];
      for (int t = 1; t <= P; ++t) {
        for_pit_parcels([&](int p) {
          row.add(col(VarKind::kS, p, static_cast<int>(k), t), inst.tonnage(p));
        });
        emit(-kInf, node.stockpile_capacity[t - 1],
             ConstraintFamily::kStockpileCapacity);
      }
    }
  }

  // Minimum production per group.
  for (int k = 0; k < inst.num_groups(); ++k) {
    const auto& minimum = inst.data().min_production_groups[k].minimum;
    for (int t = 1; t <= P; ++t) {
      for (int m : inst.group_pits(k)) {
        const PitNetwork& net = inst.network(m);
        for (int b : inst.pit_blocks(m))
          for (int p = inst.first_parcel(b); p < inst.first_parcel(b) + inst.parcel_count(b); ++p)
            for (int a : net.out_arcs[net.source])
              row.add(col(VarKind::kF, p, a, t), inst.tonnage(p));
      }
      emit(minimum[t - 1], kInf, ConstraintFamily::kMinProduction);
    }
  }

  // Per-parcel flow conservation, stockpile inventory and availability.
  for (int p = 0; p < NP; ++p) {
    const int m = inst.pit_of_block(inst.block_of_parcel(p));
    const PitNetwork& net = inst.network(m);
    for (int t = 1; t <= P; ++t) {
      for (std::size_t n = 0; n < net.kind.size(); ++n) {
        if (net.kind[n] != NodeKind::kIntermediate) continue;
        for (int a : net.in_arcs[n]) row.add(col(VarKind::kF, p, a, t), 1.0);
        for (int a : net.out_arcs[n]) row.add(col(VarKind::kF, p, a, t), -1.0);
        emit(0.0, 0.0, ConstraintFamily::kMassBalance);
      }
      for (std::size_t k = 0; k < net.stockpiles.size(); ++k) {
        const int n = net.stockpiles[k];
        const int sk = static_cast<int>(k);
        row.add(col(VarKind::kS, p, sk, t), 1.0);
        if (t > 1) row.add(col(VarKind::kS, p, sk, t - 1), -1.0);
        for (int a : net.in_arcs[n]) row.add(col(VarKind::kF, p, a, t), -1.0);
        for (int a : net.out_arcs[n]) row.add(col(VarKind::kF, p, a, t), 1.0);
        emit(0.0, 0.0, ConstraintFamily::kStockpileBalance);

        for (int a : net.out_arcs[n]) row.add(col(VarKind::kF, p, a, t), 1.0);
        if (t > 1) row.add(col(VarKind::kS, p, sk, t - 1), -1.0);
        emit(-kInf, 0.0, ConstraintFamily::kStockpileOutflow);
      }
    }
    for (int t = 1; t <= P; ++t)
      for (int a : net.out_arcs[net.source])
        row.add(col(VarKind::kF, p, a, t), 1.0);
    emit(-kInf, 1.0, ConstraintFamily::kParcelAvailability);
  }

  // Block state: precedence, coherence, flow link.
  for (int i = 0; i < B; ++i) {
    for (int j : inst.requires_blocks(i))
      for (int t = 1; t <= P; ++t) {
        row.add(col(VarKind::kZ, i, 0, t), 1.0);
        row.add(col(VarKind::kY, j, 0, t), -1.0);
        emit(-kInf, 0.0, ConstraintFamily::kPrecedence);
      }
  }
  for (int b = 0; b < B; ++b) {
    const int m = inst.pit_of_block(b);
    const PitNetwork& net = inst.network(m);
    const double tau_b = inst.block_tonnage(b);
    for (int t = 1; t <= P; ++t) {
      row.add(col(VarKind::kX, b, 0, t), 1.0);
      row.add(col(VarKind::kZ, b, 0, t), -1.0);
      emit(-kInf, 0.0, ConstraintFamily::kStartBeforeProgress);
      row.add(col(VarKind::kY, b, 0, t), 1.0);
      row.add(col(VarKind::kX, b, 0, t), -1.0);
      emit(-kInf, 0.0, ConstraintFamily::kDepletion);
      if (t < P) {
        const VarKind kinds[] = {VarKind::kX, VarKind::kY, VarKind::kZ};
        const ConstraintFamily fams[] = {ConstraintFamily::kMonotoneX,
                                         ConstraintFamily::kMonotoneY,
                                         ConstraintFamily::kMonotoneZ};
        for (int q = 0; q < 3; ++q) {
          row.add(col(kinds[q], b, 0, t), 1.0);
          row.add(col(kinds[q], b, 0, t + 1), -1.0);
          emit(-kInf, 0.0, fams[q]);
        }
      }
      for (int p = inst.first_parcel(b); p < inst.first_parcel(b) + inst.parcel_count(b); ++p)
        for (int a : net.out_arcs[net.source])
          row.add(col(VarKind::kF, p, a, t), inst.tonnage(p));
      row.add(col(VarKind::kX, b, 0, t), -tau_b);
      if (t > 1) row.add(col(VarKind::kX, b, 0, t - 1), tau_b);
      emit(0.0, 0.0, ConstraintFamily::kFlowLink);
    }
  }
  return h;
}

FixSet fix_periods(const Instance& inst, const Solution& sol, int from, int to) {
  require_dimensions(inst, sol);
  FixSet fs;
  if (from < 1) from = 1;
  if (to > inst.periods()) to = inst.periods();
  for (int t = from; t <= to; ++t) {
    const int i = t - 1;
    for (int b = 0; b < inst.num_blocks(); ++b) {
      fs.set({VarKind::kX, b, 0, t}, sol.x[b][i]);
      fs.set({VarKind::kY, b, 0, t}, sol.y[b][i]);
      fs.set({VarKind::kZ, b, 0, t}, sol.z[b][i]);
    }
    for (int p = 0; p < inst.num_parcels(); ++p) {
      for (std::size_t a = 0; a < sol.f[p].size(); ++a)
        fs.set({VarKind::kF, p, static_cast<int>(a), t}, sol.f[p][a][i]);
      for (std::size_t k = 0; k < sol.s[p].size(); ++k)
        fs.set({VarKind::kS, p, static_cast<int>(k), t}, sol.s[p][k][i]);
    }
    for (int m = 0; m < inst.num_pits(); ++m) {
      fs.set({VarKind::kWI, m, 0, t}, sol.wi[m][i]);
      fs.set({VarKind::kWP, m, 0, t}, sol.wp[m][i]);
    }
  }
  return fs;
}

}  // namespace mineplan
