#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mineplan/errors.hpp"
#include "mineplan/instance.hpp"

namespace mineplan {

using nlohmann::json;

namespace {

const json& Field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError(where + ": missing key '" + key + "'");
  return *it;
}

double Number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(where + ": number is not finite");
  return d;
}

std::string String(const json& v, const std::string& where) {
  if (!v.is_string()) throw ParseError(where + ": expected a string");
  return v.get<std::string>();
}

const json& Array(const json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected an array");
  return v;
}

std::vector<double> Numbers(const json& v, const std::string& where) {
  std::vector<double> out;
  for (const auto& x : Array(v, where)) out.push_back(Number(x, where));
  return out;
}

int Integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
  return v.get<int>();
}

std::pair<std::string, std::string> Pair(const json& v,
                                         const std::string& where) {
  if (!v.is_array() || v.size() != 2)
    throw ParseError(where + ": expected a [from, to] pair");
  return {String(v[0], where), String(v[1], where)};
}

Node ParseNode(const json& j, const std::string& where) {
  Node n;
  n.id = String(Field(j, "id", where), where + ".id");
  const std::string w = where + " '" + n.id + "'";
  auto kind = ParseNodeKind(String(Field(j, "kind", w), w + ".kind"));
  if (!kind) throw ParseError(w + ": unknown node kind");
  n.kind = *kind;
  if (n.kind == NodeKind::kProductSink)
    n.product = String(Field(j, "product", w), w + ".product");
  if (auto it = j.find("exit_capacity"); it != j.end() && !it->is_null())
    n.exit_capacity = Number(*it, w + ".exit_capacity");
  if (auto it = j.find("stockpile_capacity"); it != j.end() && !it->is_null())
    n.stockpile_capacity = Numbers(*it, w + ".stockpile_capacity");
  return n;
}

Parcel ParseParcel(const json& j, const std::string& where) {
  Parcel p;
  p.id = String(Field(j, "id", where), where + ".id");
  const std::string w = where + " '" + p.id + "'";
  p.type = String(Field(j, "type", w), w + ".type");
  p.tonnage = Number(Field(j, "tonnage", w), w + ".tonnage");
  p.extraction_cost = Number(Field(j, "extraction_cost", w), w + ".extraction_cost");
  const json& g = Field(j, "grades", w);
  if (!g.is_object()) throw ParseError(w + ".grades: expected an object");
  for (const auto& [e, v] : g.items()) p.grades[e] = Number(v, w + ".grades");
  return p;
}

}  // namespace

InstanceData parse_instance_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  InstanceData d;
  d.periods = Integer(Field(root, "periods", "instance"), "periods");
  d.discount = Numbers(Field(root, "discount", "instance"), "discount");
  for (const auto& e : Array(Field(root, "elements", "instance"), "elements"))
    d.elements.push_back(String(e, "elements"));

  for (const auto& jr : Array(Field(root, "products", "instance"), "products")) {
    Product r;
    r.id = String(Field(jr, "id", "product"), "product.id");
    const std::string w = "product '" + r.id + "'";
    r.revenue_per_ton = Number(Field(jr, "revenue_per_ton", w), w);
    if (auto it = jr.find("grade_windows"); it != jr.end()) {
      if (!it->is_object()) throw ParseError(w + ".grade_windows: expected an object");
      for (const auto& [e, v] : it->items()) {
        auto lohi = Numbers(v, w + ".grade_windows");
        if (lohi.size() != 2)
          throw ParseError(w + ".grade_windows: expected [min, max]");
        r.grade_windows[e] = {lohi[0], lohi[1]};
      }
    }
    d.products.push_back(std::move(r));
  }

  for (const auto& jm : Array(Field(root, "pits", "instance"), "pits")) {
    Pit m;
    m.id = String(Field(jm, "id", "pit"), "pit.id");
    const std::string w = "pit '" + m.id + "'";
    m.capex_cost = Number(Field(jm, "capex_cost", w), w + ".capex_cost");
    m.mining_capacity = Number(Field(jm, "mining_capacity", w), w + ".mining_capacity");
    const json& net = Field(jm, "network", w);
    for (const auto& jn : Array(Field(net, "nodes", w), w + ".nodes"))
      m.network.nodes.push_back(ParseNode(jn, w + " node"));
    for (const auto& ja : Array(Field(net, "arcs", w), w + ".arcs")) {
      auto [from, to] = Pair(ja, w + ".arcs");
      m.network.arcs.push_back({from, to});
    }
    for (const auto& jb : Array(Field(jm, "blocks", w), w + ".blocks")) {
      Block b;
      b.id = String(Field(jb, "id", w + " block"), w + " block.id");
      b.pit = m.id;
      const std::string bw = "block '" + b.id + "'";
      b.bench = Integer(Field(jb, "bench", bw), bw + ".bench");
      for (const auto& jp : Array(Field(jb, "parcels", bw), bw + ".parcels"))
        b.parcels.push_back(ParseParcel(jp, bw + " parcel"));
      d.blocks.push_back(std::move(b));
    }
    d.pits.push_back(std::move(m));
  }

  if (auto it = root.find("precedences"); it != root.end())
    for (const auto& jp : Array(*it, "precedences")) {
      auto [i, j] = Pair(jp, "precedences");
      d.precedences.push_back({i, j});
    }
  if (auto it = root.find("min_production_groups"); it != root.end())
    for (const auto& jg : Array(*it, "min_production_groups")) {
      MinProductionGroup g;
      for (const auto& m : Array(Field(jg, "pits", "group"), "group.pits"))
        g.pits.push_back(String(m, "group.pits"));
      g.minimum = Numbers(Field(jg, "minimum", "group"), "group.minimum");
      d.min_production_groups.push_back(std::move(g));
    }
  return d;
}

std::string dump_instance_json(const InstanceData& d) {
  json root;
  root["periods"] = d.periods;
  root["discount"] = d.discount;
  root["elements"] = d.elements;
  root["products"] = json::array();
  for (const auto& r : d.products) {
    json jr{{"id", r.id}, {"revenue_per_ton", r.revenue_per_ton}};
    jr["grade_windows"] = json::object();
    for (const auto& [e, w] : r.grade_windows)
      jr["grade_windows"][e] = {w.first, w.second};
    root["products"].push_back(std::move(jr));
  }
  root["pits"] = json::array();
  for (const auto& m : d.pits) {
    json jm{{"id", m.id},
            {"capex_cost", m.capex_cost},
            {"mining_capacity", m.mining_capacity}};
    json nodes = json::array();
    for (const auto& n : m.network.nodes) {
      json jn{{"id", n.id}, {"kind", std::string(ToString(n.kind))}};
      if (n.kind == NodeKind::kProductSink) jn["product"] = n.product;
      if (n.exit_capacity) jn["exit_capacity"] = *n.exit_capacity;
      if (n.kind == NodeKind::kStockpile || !n.stockpile_capacity.empty())
        jn["stockpile_capacity"] = n.stockpile_capacity;
      nodes.push_back(std::move(jn));
    }
    json arcs = json::array();
    for (const auto& a : m.network.arcs) arcs.push_back({a.from, a.to});
    jm["network"] = {{"nodes", nodes}, {"arcs", arcs}};
    json blocks = json::array();
    for (const auto& b : d.blocks) {
      if (b.pit != m.id) continue;
      json parcels = json::array();
      for (const auto& p : b.parcels) {
        json grades = json::object();
        for (const auto& [e, g] : p.grades) grades[e] = g;
        parcels.push_back({{"id", p.id},
                           {"type", p.type},
                           {"tonnage", p.tonnage},
                           {"extraction_cost", p.extraction_cost},
                           {"grades", grades}});
      }
      blocks.push_back({{"id", b.id}, {"bench", b.bench}, {"parcels", parcels}});
    }
    jm["blocks"] = std::move(blocks);
    root["pits"].push_back(std::move(jm));
  }
  root["precedences"] = json::array();
  for (const auto& p : d.precedences)
    root["precedences"].push_back({p.block, p.requires_block});
  root["min_production_groups"] = json::array();
  for (const auto& g : d.min_production_groups)
    root["min_production_groups"].push_back(
        {{"pits", g.pits}, {"minimum", g.minimum}});
  return root.dump(1);
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open instance file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return Instance(parse_instance_json(buf.str()));
}

void save_instance(const InstanceData& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write instance file " + path.string());
  out << dump_instance_json(data) << '\n';
  out.flush();
  if (!out) throw IoError("failed writing instance file " + path.string());
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  save_instance(inst.data(), path);
}

}  // namespace mineplan
