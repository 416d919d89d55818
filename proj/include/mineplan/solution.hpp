#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mineplan/instance.hpp"

namespace mineplan {

// Full assignment of every decision variable over an instance's horizon.
// Period t is stored at position t - 1.
struct Solution {
  using Series = std::vector<double>;

  std::vector<Series> x;  // [block]: fraction extracted by end of t
  std::vector<Series> y;  // [block]: depleted by end of t (binary)
  std::vector<Series> z;  // [block]: extraction commenced by end of t (binary)
  std::vector<std::vector<Series>> f;  // [parcel][arc of its pit]: fraction
  std::vector<std::vector<Series>> s;  // [parcel][stockpile slot of its pit]
  std::vector<Series> wi;  // [pit]: opened in t (binary)
  std::vector<Series> wp;  // [pit]: open in or before t (binary)
  double objective = 0.0;

  static Solution Zeros(const Instance& inst);

  bool operator==(const Solution&) const = default;
};

// Throws DimensionMismatch when `sol` does not cover `inst`'s full horizon.
void require_dimensions(const Instance& inst, const Solution& sol);

// Period in which block b starts (first z = 1) / is depleted (first y = 1);
// periods() + 1 when that never happens.
int start_period(const Solution& sol, int b, double tol = 1e-5);
int finish_period(const Solution& sol, int b, double tol = 1e-5);

std::string dump_solution_json(const Instance& inst, const Solution& sol);
Solution parse_solution_json(const Instance& inst, std::string_view text);
void save_solution(const Instance& inst, const Solution& sol,
                   const std::filesystem::path& path);
Solution load_solution(const Instance& inst, const std::filesystem::path& path);

}  // namespace mineplan
