#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mineplan/constraint_family.hpp"
#include "mineplan/instance.hpp"
#include "mineplan/solution.hpp"

namespace mineplan {

enum class VarKind : std::uint8_t { kX, kY, kZ, kF, kS, kWI, kWP };

std::string_view ToString(VarKind kind);

// Addresses one model variable.
//   X/Y/Z:  entity = block,  sub = 0
//   F:      entity = parcel, sub = arc index within the parcel's pit network
//   S:      entity = parcel, sub = stockpile slot within the pit network
//   WI/WP:  entity = pit,    sub = 0
// `period` is 1-based.
struct VarKey {
  VarKind kind = VarKind::kX;
  int entity = 0;
  int sub = 0;
  int period = 1;

  auto operator<=>(const VarKey&) const = default;
  bool is_integer_kind() const {
    return kind == VarKind::kY || kind == VarKind::kZ || kind == VarKind::kWI ||
           kind == VarKind::kWP;
  }
};

std::string ToString(const VarKey& key);

// Periods whose integer variables (Y, Z, WI, WP) become continuous in [0, 1].
struct RelaxSpec {
  std::set<int> relaxed_periods;
};

// Variable -> value; fixing sets lower = upper = value.
struct FixSet {
  std::map<VarKey, double> assignments;

  void set(const VarKey& key, double value) { assignments[key] = value; }
  void merge(const FixSet& other) {
    for (const auto& [k, v] : other.assignments) assignments[k] = v;
  }
  std::size_t size() const { return assignments.size(); }
  bool empty() const { return assignments.empty(); }
  bool contains(const VarKey& key) const { return assignments.count(key) > 0; }
};

// Integrality tolerance for binaries.
inline constexpr double kIntegerTolerance = 1e-5;

// Solver-neutral sparse linear model (row-wise). Objective is maximized.
struct LinearModel {
  std::vector<double> col_lower, col_upper, col_cost;
  std::vector<char> col_integer;
  std::vector<double> row_lower, row_upper;
  std::vector<ConstraintFamily> row_family;
  std::vector<int> row_start{0};
  std::vector<int> row_index;
  std::vector<double> row_value;

  int num_cols() const { return static_cast<int>(col_cost.size()); }
  int num_rows() const { return static_cast<int>(row_lower.size()); }

  int add_column(double lower, double upper, double cost, bool integer);
  void add_row(double lower, double upper, ConstraintFamily family,
               std::span<const int> index, std::span<const double> value);
  double row_activity(int row, std::span<const double> values) const;
};

struct RowViolation {
  ConstraintFamily family;
  int row = -1;     // -1 for column-domain violations
  int column = -1;  // set for bounds / integrality entries
  double magnitude = 0.0;
};

// A built model over periods [1, last_period]. Variables for periods before
// first_period exist and are expected to be pinned by history fixes.
class ModelHandle {
 public:
  const Instance& instance() const { return *inst_; }
  int first_period() const { return first_period_; }
  int last_period() const { return last_period_; }
  const RelaxSpec& relax() const { return relax_; }
  bool maximize() const { return true; }

  const LinearModel& lp() const { return lp_; }
  int num_columns() const { return lp_.num_cols(); }
  std::uint64_t structure_id() const { return structure_id_; }

  std::optional<int> column(const VarKey& key) const;
  int require_column(const VarKey& key) const;  // throws UnknownVariable
  VarKey key_of(int column) const;
  bool is_integer(int column) const { return lp_.col_integer[column] != 0; }
  std::vector<VarKey> integer_keys() const;

  // Bound clamps; clear_fixes() restores exactly the previously fixed columns.
  void apply_fixes(const FixSet& fixes);
  void clear_fixes();
  std::size_t num_fixed() const { return saved_bounds_.size(); }

  // Non-binding starting point (restricted to this model's periods).
  void warm_start(const Solution& sol);
  void clear_warm_start() { start_.reset(); }
  const std::optional<std::vector<double>>& start() const { return start_; }

  // Column vector for a full-horizon solution (periods beyond last_period
  // are dropped).
  std::vector<double> columns_from(const Solution& sol) const;
  // Full-horizon solution from column values: binaries within integer
  // tolerance are snapped, continuous values clipped to [0, 1], periods
  // after last_period are zero. objective = model objective at the cleaned
  // point.
  Solution to_solution(std::span<const double> values) const;
  double objective_value(std::span<const double> values) const;

  // Every row or column-domain violation above tol at `values`.
  std::vector<RowViolation> violations(std::span<const double> values,
                                       double tol) const;

 private:
  friend ModelHandle build_model(const Instance&, int, int, const RelaxSpec&);
  explicit ModelHandle(const Instance& inst) : inst_(&inst) {}

  const Instance* inst_;
  int first_period_ = 1;
  int last_period_ = 1;
  RelaxSpec relax_;
  LinearModel lp_;
  std::uint64_t structure_id_ = 0;

  // Column layout: kind base + entity offset + sub * P + (t - 1).
  int base_x_ = 0, base_y_ = 0, base_z_ = 0, base_wi_ = 0, base_wp_ = 0;
  std::vector<int> f_base_;  // per parcel
  std::vector<int> s_base_;  // per parcel
  std::vector<int> f_arcs_;  // arcs per parcel
  std::vector<int> s_slots_;  // stockpiles per parcel
  std::vector<VarKey> keys_;  // per column

  std::map<int, std::pair<double, double>> saved_bounds_;
  std::optional<std::vector<double>> start_;
};

// Throws RangeError unless 1 <= first_period <= last_period <= periods and
// relax periods lie within [first_period, last_period].
ModelHandle build_model(const Instance& inst, int first_period, int last_period,
                        const RelaxSpec& relax = {});

// Fixes every variable of `sol` in periods [from, to].
FixSet fix_periods(const Instance& inst, const Solution& sol, int from, int to);

}  // namespace mineplan
