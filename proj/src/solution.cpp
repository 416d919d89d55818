#include "mineplan/solution.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mineplan/errors.hpp"

namespace mineplan {

using nlohmann::json;

Solution Solution::Zeros(const Instance& inst) {
  const auto T = static_cast<std::size_t>(inst.periods());
  Solution sol;
  sol.x.assign(inst.num_blocks(), Series(T, 0.0));
  sol.y = sol.x;
  sol.z = sol.x;
  sol.f.resize(inst.num_parcels());
  sol.s.resize(inst.num_parcels());
  for (int p = 0; p < inst.num_parcels(); ++p) {
    const auto& net = inst.network(inst.pit_of_block(inst.block_of_parcel(p)));
    sol.f[p].assign(net.arcs.size(), Series(T, 0.0));
    sol.s[p].assign(net.stockpiles.size(), Series(T, 0.0));
  }
  sol.wi.assign(inst.num_pits(), Series(T, 0.0));
  sol.wp = sol.wi;
  return sol;
}

void require_dimensions(const Instance& inst, const Solution& sol) {
  const auto T = static_cast<std::size_t>(inst.periods());
  auto series_ok = [&](const std::vector<Solution::Series>& v, std::size_t n) {
    if (v.size() != n) return false;
    for (const auto& s : v)
      if (s.size() != T) return false;
    return true;
  };
  bool ok = series_ok(sol.x, inst.num_blocks()) &&
            series_ok(sol.y, inst.num_blocks()) &&
            series_ok(sol.z, inst.num_blocks()) &&
            series_ok(sol.wi, inst.num_pits()) &&
            series_ok(sol.wp, inst.num_pits()) &&
            sol.f.size() == static_cast<std::size_t>(inst.num_parcels()) &&
            sol.s.size() == static_cast<std::size_t>(inst.num_parcels());
  for (int p = 0; ok && p < inst.num_parcels(); ++p) {
    const auto& net = inst.network(inst.pit_of_block(inst.block_of_parcel(p)));
    ok = series_ok(sol.f[p], net.arcs.size()) &&
         series_ok(sol.s[p], net.stockpiles.size());
  }
  if (!ok)
    throw DimensionMismatch("solution does not match instance dimensions");
}

int start_period(const Solution& sol, int b, double tol) {
  const auto& z = sol.z[b];
  for (std::size_t t = 0; t < z.size(); ++t)
    if (z[t] > 1.0 - tol) return static_cast<int>(t) + 1;
  return static_cast<int>(z.size()) + 1;
}

int finish_period(const Solution& sol, int b, double tol) {
  const auto& y = sol.y[b];
  for (std::size_t t = 0; t < y.size(); ++t)
    if (y[t] > 1.0 - tol) return static_cast<int>(t) + 1;
  return static_cast<int>(y.size()) + 1;
}

namespace {

std::string ArcKey(const Pit& pit, const std::pair<int, int>& arc) {
  return pit.network.nodes[arc.first].id + ">" + pit.network.nodes[arc.second].id;
}

Solution::Series ReadSeries(const json& j, std::size_t T, const std::string& w) {
  if (!j.is_array() || j.size() != T)
    throw DimensionMismatch(w + ": expected " + std::to_string(T) + " values");
  Solution::Series out;
  out.reserve(T);
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(w + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string dump_solution_json(const Instance& inst, const Solution& sol) {
  require_dimensions(inst, sol);
  json root;
  root["periods"] = inst.periods();
  root["objective"] = sol.objective;
  json x = json::object(), y = json::object(), z = json::object();
  for (int b = 0; b < inst.num_blocks(); ++b) {
    x[inst.block(b).id] = sol.x[b];
    y[inst.block(b).id] = sol.y[b];
    z[inst.block(b).id] = sol.z[b];
  }
  root["x"] = x;
  root["y"] = y;
  root["z"] = z;
  json f = json::object(), s = json::object();
  for (int p = 0; p < inst.num_parcels(); ++p) {
    const int m = inst.pit_of_block(inst.block_of_parcel(p));
    const auto& net = inst.network(m);
    json jf = json::object();
    for (std::size_t a = 0; a < net.arcs.size(); ++a)
      jf[ArcKey(inst.pit(m), net.arcs[a])] = sol.f[p][a];
    f[inst.parcel(p).id] = jf;
    if (!net.stockpiles.empty()) {
      json js = json::object();
      for (std::size_t k = 0; k < net.stockpiles.size(); ++k)
        js[inst.pit(m).network.nodes[net.stockpiles[k]].id] = sol.s[p][k];
      s[inst.parcel(p).id] = js;
    }
  }
  root["f"] = f;
  root["s"] = s;
  json wi = json::object(), wp = json::object();
  for (int m = 0; m < inst.num_pits(); ++m) {
    wi[inst.pit(m).id] = sol.wi[m];
    wp[inst.pit(m).id] = sol.wp[m];
  }
  root["wi"] = wi;
  root["wp"] = wp;
  return root.dump(1);
}

Solution parse_solution_json(const Instance& inst, std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed solution JSON: ") + e.what());
  }
  const auto T = static_cast<std::size_t>(inst.periods());
  if (!root.is_object() || root.value("periods", -1) != inst.periods())
    throw DimensionMismatch("solution horizon does not match instance");
  Solution sol = Solution::Zeros(inst);
  sol.objective = root.value("objective", 0.0);
  auto need = [&](const json& obj, const std::string& key) -> const json& {
    auto it = obj.find(key);
    if (it == obj.end()) throw DimensionMismatch("solution is missing '" + key + "'");
    return *it;
  };
  for (int b = 0; b < inst.num_blocks(); ++b) {
    const auto& id = inst.block(b).id;
    sol.x[b] = ReadSeries(need(need(root, "x"), id), T, "x." + id);
    sol.y[b] = ReadSeries(need(need(root, "y"), id), T, "y." + id);
    sol.z[b] = ReadSeries(need(need(root, "z"), id), T, "z." + id);
  }
  for (int p = 0; p < inst.num_parcels(); ++p) {
    const int m = inst.pit_of_block(inst.block_of_parcel(p));
    const auto& net = inst.network(m);
    const auto& id = inst.parcel(p).id;
    const json& jf = need(need(root, "f"), id);
    for (std::size_t a = 0; a < net.arcs.size(); ++a) {
      auto key = ArcKey(inst.pit(m), net.arcs[a]);
      sol.f[p][a] = ReadSeries(need(jf, key), T, "f." + id + "." + key);
    }
    if (!net.stockpiles.empty()) {
      const json& js = need(need(root, "s"), id);
      for (std::size_t k = 0; k < net.stockpiles.size(); ++k) {
        const auto& node = inst.pit(m).network.nodes[net.stockpiles[k]].id;
        sol.s[p][k] = ReadSeries(need(js, node), T, "s." + id + "." + node);
      }
    }
  }
  for (int m = 0; m < inst.num_pits(); ++m) {
    const auto& id = inst.pit(m).id;
    sol.wi[m] = ReadSeries(need(need(root, "wi"), id), T, "wi." + id);
    sol.wp[m] = ReadSeries(need(need(root, "wp"), id), T, "wp." + id);
  }
  return sol;
}

void save_solution(const Instance& inst, const Solution& sol,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write solution file " + path.string());
  out << dump_solution_json(inst, sol) << '\n';
  if (!out) throw IoError("failed writing solution file " + path.string());
}

Solution load_solution(const Instance& inst, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open solution file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_solution_json(inst, buf.str());
}

}  // namespace mineplan
