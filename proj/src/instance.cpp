#include "mineplan/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "mineplan/errors.hpp"

namespace mineplan {

std::string_view ToString(NodeKind kind) {
  switch (kind) {
    case NodeKind::kSource: return "source";
    case NodeKind::kStockpile: return "stockpile";
    case NodeKind::kIntermediate: return "intermediate";
    case NodeKind::kProductSink: return "product";
  }
  return "intermediate";
}

std::optional<NodeKind> ParseNodeKind(std::string_view text) {
  if (text == "source") return NodeKind::kSource;
  if (text == "stockpile") return NodeKind::kStockpile;
  if (text == "intermediate") return NodeKind::kIntermediate;
  if (text == "product") return NodeKind::kProductSink;
  return std::nullopt;
}

namespace {

bool Finite(double v) { return std::isfinite(v); }

std::string Fmt(double v) { return std::to_string(v); }

// Kahn's algorithm over (block -> required block) edges; returns the blocks
// left over when the graph has a cycle.
std::vector<int> CyclicRemainder(int n, const std::vector<std::vector<int>>& req) {
  std::vector<int> indeg(n, 0);
  for (int i = 0; i < n; ++i) indeg[i] = static_cast<int>(req[i].size());
  std::vector<std::vector<int>> rev(n);
  for (int i = 0; i < n; ++i)
    for (int j : req[i]) rev[j].push_back(i);
  std::vector<int> stack;
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) stack.push_back(i);
  int seen = 0;
  while (!stack.empty()) {
    int j = stack.back();
    stack.pop_back();
    ++seen;
    for (int i : rev[j])
      if (--indeg[i] == 0) stack.push_back(i);
  }
  std::vector<int> rest;
  if (seen == n) return rest;
  for (int i = 0; i < n; ++i)
    if (indeg[i] > 0) rest.push_back(i);
  return rest;
}

void CheckNetwork(const InstanceData& d, const Pit& pit,
                  const std::set<std::string>& product_ids,
                  std::vector<std::string>& out) {
  const std::string where = "pit '" + pit.id + "' network";
  const auto& nodes = pit.network.nodes;
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    if (!index.emplace(nodes[i].id, i).second)
      out.push_back(where + ": duplicate node id '" + nodes[i].id + "'");
  }
  int sources = 0;
  for (const auto& n : nodes) {
    const std::string nw = where + " node '" + n.id + "'";
    if (n.kind == NodeKind::kSource) ++sources;
    if (n.kind == NodeKind::kProductSink && !product_ids.count(n.product))
      out.push_back(nw + ": unknown product '" + n.product + "'");
    const bool needs_exit =
        n.kind == NodeKind::kStockpile || n.kind == NodeKind::kIntermediate;
    if (needs_exit) {
      if (!n.exit_capacity)
        out.push_back(nw + ": missing exit capacity");
      else if (!Finite(*n.exit_capacity) || *n.exit_capacity < 0)
        out.push_back(nw + ": exit capacity must be finite and >= 0");
    }
    if (n.kind == NodeKind::kStockpile) {
      for (int t = static_cast<int>(n.stockpile_capacity.size()) + 1;
           t <= d.periods; ++t)
        out.push_back(nw + ": missing stockpile capacity for period " +
                      std::to_string(t));
      if (static_cast<int>(n.stockpile_capacity.size()) > d.periods)
        out.push_back(nw + ": stockpile capacity has more entries than periods");
      for (std::size_t t = 0; t < n.stockpile_capacity.size(); ++t) {
        double c = n.stockpile_capacity[t];
        if (!Finite(c) || c < 0)
          out.push_back(nw + ": stockpile capacity for period " +
                        std::to_string(t + 1) + " must be finite and >= 0");
      }
    }
  }
  if (sources != 1)
    out.push_back(where + ": expected exactly one source node, found " +
                  std::to_string(sources));

  const int n = static_cast<int>(nodes.size());
  std::vector<std::vector<int>> succ(n);
  for (const auto& a : pit.network.arcs) {
    auto f = index.find(a.from);
    auto t = index.find(a.to);
    const std::string aw = where + " arc " + a.from + "->" + a.to;
    if (f == index.end() || t == index.end()) {
      out.push_back(aw + ": endpoint does not exist");
      continue;
    }
    if (f->second == t->second) {
      out.push_back(aw + ": self-loop");
      continue;
    }
    if (nodes[t->second].kind == NodeKind::kSource)
      out.push_back(aw + ": source node has an incoming arc");
    if (nodes[f->second].kind == NodeKind::kProductSink)
      out.push_back(aw + ": product node has an outgoing arc");
    succ[f->second].push_back(t->second);
  }
  // Every non-sink node must be able to route material to some product.
  std::vector<bool> ok(n, false);
  bool changed = true;
  for (int i = 0; i < n; ++i) ok[i] = nodes[i].kind == NodeKind::kProductSink;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      if (ok[i]) continue;
      for (int j : succ[i])
        if (ok[j]) {
          ok[i] = true;
          changed = true;
          break;
        }
    }
  }
  for (int i = 0; i < n; ++i)
    if (!ok[i])
      out.push_back(where + " node '" + nodes[i].id +
                    "': no path to any product node");
}

}  // namespace

std::vector<std::string> check_integrity(const InstanceData& d) {
  std::vector<std::string> out;
  if (d.periods < 1) out.push_back("periods must be >= 1");
  if (static_cast<int>(d.discount.size()) != d.periods)
    out.push_back("discount has " + std::to_string(d.discount.size()) +
                  " entries, expected " + std::to_string(d.periods));
  for (std::size_t t = 0; t < d.discount.size(); ++t) {
    double pi = d.discount[t];
    if (!Finite(pi) || pi <= 0 || pi > 1)
      out.push_back("discount for period " + std::to_string(t + 1) +
                    " must lie in (0, 1], got " + Fmt(pi));
  }

  std::set<std::string> element_ids;
  for (const auto& e : d.elements)
    if (!element_ids.insert(e).second)
      out.push_back("duplicate element id '" + e + "'");

  std::set<std::string> product_ids;
  for (const auto& r : d.products) {
    const std::string w = "product '" + r.id + "'";
    if (!product_ids.insert(r.id).second) out.push_back("duplicate " + w);
    if (!Finite(r.revenue_per_ton) || r.revenue_per_ton < 0)
      out.push_back(w + ": revenue per ton must be finite and >= 0");
    for (const auto& [e, win] : r.grade_windows) {
      if (!element_ids.count(e))
        out.push_back(w + ": grade window on unknown element '" + e + "'");
      auto [lo, hi] = win;
      if (!Finite(lo) || !Finite(hi) || lo < 0 || lo > hi || hi > 1)
        out.push_back(w + ": grade window for '" + e +
                      "' must satisfy 0 <= min <= max <= 1");
    }
  }

  std::set<std::string> pit_ids;
  std::map<std::string, int> pit_block_count;
  for (const auto& m : d.pits) {
    const std::string w = "pit '" + m.id + "'";
    if (!pit_ids.insert(m.id).second) out.push_back("duplicate " + w);
    pit_block_count[m.id] = 0;
    if (!Finite(m.capex_cost) || m.capex_cost < 0)
      out.push_back(w + ": capex cost must be finite and >= 0");
    if (!Finite(m.mining_capacity) || m.mining_capacity < 0)
      out.push_back(w + ": mining capacity must be finite and >= 0");
    CheckNetwork(d, m, product_ids, out);
  }

  std::unordered_map<std::string, int> block_index;
  std::set<std::string> parcel_ids;
  for (int b = 0; b < static_cast<int>(d.blocks.size()); ++b) {
    const Block& blk = d.blocks[b];
    const std::string w = "block '" + blk.id + "'";
    if (!block_index.emplace(blk.id, b).second) out.push_back("duplicate " + w);
    auto pc = pit_block_count.find(blk.pit);
    if (pc == pit_block_count.end())
      out.push_back(w + ": assigned to nonexistent pit '" + blk.pit + "'");
    else
      ++pc->second;
    if (blk.bench < 0) out.push_back(w + ": bench must be >= 0");
    if (blk.parcels.empty()) out.push_back(w + ": has no parcels");
    double total = 0;
    for (const auto& p : blk.parcels) {
      const std::string pw = w + " parcel '" + p.id + "'";
      if (!parcel_ids.insert(p.id).second)
        out.push_back("duplicate parcel id '" + p.id + "'");
      if (!Finite(p.tonnage) || p.tonnage <= 0)
        out.push_back(pw + ": tonnage must be finite and > 0");
      else
        total += p.tonnage;
      if (!Finite(p.extraction_cost) || p.extraction_cost < 0)
        out.push_back(pw + ": extraction cost must be finite and >= 0");
      for (const auto& [e, g] : p.grades) {
        if (!element_ids.count(e))
          out.push_back(pw + ": grade for unknown element '" + e + "'");
        if (!Finite(g) || g < 0 || g > 1)
          out.push_back(pw + ": grade for '" + e + "' must lie in [0, 1]");
      }
    }
    if (!blk.parcels.empty() && !(total > 0))
      out.push_back(w + ": total tonnage must be > 0");
  }
  for (const auto& [pit, count] : pit_block_count)
    if (count == 0) out.push_back("pit '" + pit + "': has no blocks");

  const int nb = static_cast<int>(d.blocks.size());
  std::vector<std::vector<int>> req(nb);
  for (const auto& pr : d.precedences) {
    auto i = block_index.find(pr.block);
    auto j = block_index.find(pr.requires_block);
    if (i == block_index.end() || j == block_index.end()) {
      out.push_back("precedence (" + pr.block + ", " + pr.requires_block +
                    "): unknown block");
      continue;
    }
    req[i->second].push_back(j->second);
  }
  if (auto rest = CyclicRemainder(nb, req); !rest.empty()) {
    std::string names;
    for (std::size_t k = 0; k < rest.size() && k < 8; ++k)
      names += (k ? ", " : "") + d.blocks[rest[k]].id;
    out.push_back("precedence cycle involving blocks: " + names);
  }

  for (std::size_t k = 0; k < d.min_production_groups.size(); ++k) {
    const auto& g = d.min_production_groups[k];
    const std::string w = "min production group " + std::to_string(k);
    if (g.pits.empty()) out.push_back(w + ": has no pits");
    for (const auto& m : g.pits)
      if (!pit_ids.count(m)) out.push_back(w + ": unknown pit '" + m + "'");
    if (static_cast<int>(g.minimum.size()) != d.periods)
      out.push_back(w + ": minimum has " + std::to_string(g.minimum.size()) +
                    " entries, expected " + std::to_string(d.periods));
    for (std::size_t t = 0; t < g.minimum.size(); ++t)
      if (!Finite(g.minimum[t]) || g.minimum[t] < 0)
        out.push_back(w + ": minimum for period " + std::to_string(t + 1) +
                      " must be finite and >= 0");
  }
  return out;
}

Instance::Instance(InstanceData data) : data_(std::move(data)) {
  if (auto v = check_integrity(data_); !v.empty()) throw IntegrityError(v);

  const int nb = num_blocks();
  const int nm = num_pits();
  const int ne = num_elements();
  const int nr = num_products();
  for (int m = 0; m < nm; ++m) pit_ids_.emplace(data_.pits[m].id, m);

  pit_blocks_.resize(nm);
  block_pit_.resize(nb);
  block_tonnage_.assign(nb, 0.0);
  block_first_parcel_.resize(nb);
  std::unordered_map<std::string, int> element_ids;
  for (int e = 0; e < ne; ++e) element_ids.emplace(data_.elements[e], e);
  for (int b = 0; b < nb; ++b) {
    const Block& blk = data_.blocks[b];
    block_ids_.emplace(blk.id, b);
    block_pit_[b] = pit_ids_.at(blk.pit);
    pit_blocks_[block_pit_[b]].push_back(b);
    block_first_parcel_[b] = static_cast<int>(parcel_block_.size());
    for (const auto& p : blk.parcels) {
      parcel_block_.push_back(b);
      block_tonnage_[b] += p.tonnage;
      std::vector<double> g(ne, 0.0);
      for (const auto& [e, v] : p.grades) g[element_ids.at(e)] = v;
      grade_.insert(grade_.end(), g.begin(), g.end());
    }
  }

  std::unordered_map<std::string, int> product_ids;
  for (int r = 0; r < nr; ++r) product_ids.emplace(data_.products[r].id, r);
  networks_.resize(nm);
  for (int m = 0; m < nm; ++m) {
    const FlowNetwork& fn = data_.pits[m].network;
    PitNetwork& pn = networks_[m];
    const int nn = static_cast<int>(fn.nodes.size());
    std::unordered_map<std::string, int> node_ids;
    pn.kind.resize(nn);
    pn.product.assign(nn, -1);
    pn.stockpile_slot.assign(nn, -1);
    for (int i = 0; i < nn; ++i) {
      node_ids.emplace(fn.nodes[i].id, i);
      pn.kind[i] = fn.nodes[i].kind;
      if (pn.kind[i] == NodeKind::kSource) pn.source = i;
      if (pn.kind[i] == NodeKind::kProductSink)
        pn.product[i] = product_ids.at(fn.nodes[i].product);
      if (pn.kind[i] == NodeKind::kStockpile) {
        pn.stockpile_slot[i] = static_cast<int>(pn.stockpiles.size());
        pn.stockpiles.push_back(i);
      }
    }
    pn.out_arcs.resize(nn);
    pn.in_arcs.resize(nn);
    for (const auto& a : fn.arcs) {
      int from = node_ids.at(a.from), to = node_ids.at(a.to);
      pn.out_arcs[from].push_back(static_cast<int>(pn.arcs.size()));
      pn.in_arcs[to].push_back(static_cast<int>(pn.arcs.size()));
      pn.arcs.emplace_back(from, to);
    }
    pn.reaches_product.assign(static_cast<std::size_t>(nn) * nr, false);
    for (int i = 0; i < nn; ++i)
      if (pn.product[i] >= 0) pn.reaches_product[i * nr + pn.product[i]] = true;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& [from, to] : pn.arcs)
        for (int r = 0; r < nr; ++r)
          if (pn.reaches_product[to * nr + r] &&
              !pn.reaches_product[from * nr + r]) {
            pn.reaches_product[from * nr + r] = true;
            changed = true;
          }
    }
    pn.source_reaches_product.resize(nr);
    for (int r = 0; r < nr; ++r)
      pn.source_reaches_product[r] = pn.reaches_product[pn.source * nr + r];
  }

  requires_.resize(nb);
  required_by_.resize(nb);
  for (const auto& pr : data_.precedences) {
    int i = block_ids_.at(pr.block), j = block_ids_.at(pr.requires_block);
    requires_[i].push_back(j);
    required_by_[j].push_back(i);
  }
  for (int b = 0; b < nb; ++b) {
    std::sort(requires_[b].begin(), requires_[b].end());
    requires_[b].erase(std::unique(requires_[b].begin(), requires_[b].end()),
                       requires_[b].end());
    std::sort(required_by_[b].begin(), required_by_[b].end());
    required_by_[b].erase(
        std::unique(required_by_[b].begin(), required_by_[b].end()),
        required_by_[b].end());
  }

  // Topological order (required blocks first), then closures in that order:
  // pred(b) = U_{j in req(b)} ({j} U pred(j)).
  std::vector<int> remaining(nb);
  for (int b = 0; b < nb; ++b)
    remaining[b] = static_cast<int>(requires_[b].size());
  std::vector<int> ready;
  for (int b = nb - 1; b >= 0; --b)
    if (remaining[b] == 0) ready.push_back(b);
  while (!ready.empty()) {
    int j = ready.back();
    ready.pop_back();
    topo_.push_back(j);
    for (auto it = required_by_[j].rbegin(); it != required_by_[j].rend(); ++it)
      if (--remaining[*it] == 0) ready.push_back(*it);
  }

  std::vector<char> mark(nb, 0);
  pred_closure_.resize(nb);
  for (int b : topo_) {
    auto& out = pred_closure_[b];
    for (int j : requires_[b]) {
      if (!mark[j]) { mark[j] = 1; out.push_back(j); }
      for (int k : pred_closure_[j])
        if (!mark[k]) { mark[k] = 1; out.push_back(k); }
    }
    for (int k : out) mark[k] = 0;
    std::sort(out.begin(), out.end());
  }
  succ_closure_.resize(nb);
  for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
    int b = *it;
    auto& out = succ_closure_[b];
    for (int i : required_by_[b]) {
      if (!mark[i]) { mark[i] = 1; out.push_back(i); }
      for (int k : succ_closure_[i])
        if (!mark[k]) { mark[k] = 1; out.push_back(k); }
    }
    for (int k : out) mark[k] = 0;
    std::sort(out.begin(), out.end());
  }

  for (const auto& g : data_.min_production_groups) {
    std::vector<int> pits;
    for (const auto& id : g.pits) pits.push_back(pit_ids_.at(id));
    std::sort(pits.begin(), pits.end());
    pits.erase(std::unique(pits.begin(), pits.end()), pits.end());
    group_pits_.push_back(std::move(pits));
  }
}

int Instance::block_index(std::string_view id) const {
  auto it = block_ids_.find(std::string(id));
  if (it == block_ids_.end())
    throw UnknownBlock("unknown block '" + std::string(id) + "'");
  return it->second;
}

int Instance::pit_index(std::string_view id) const {
  auto it = pit_ids_.find(std::string(id));
  if (it == pit_ids_.end())
    throw UnknownPit("unknown pit '" + std::string(id) + "'");
  return it->second;
}

int Instance::element_index(std::string_view id) const {
  for (int e = 0; e < num_elements(); ++e)
    if (data_.elements[e] == id) return e;
  return -1;
}

void Instance::require_block(int b) const {
  if (b < 0 || b >= num_blocks())
    throw UnknownBlock("unknown block index " + std::to_string(b));
}

void Instance::require_pit(int m) const {
  if (m < 0 || m >= num_pits())
    throw UnknownPit("unknown pit index " + std::to_string(m));
}

const Parcel& Instance::parcel(int p) const {
  int b = parcel_block_[p];
  return data_.blocks[b].parcels[p - block_first_parcel_[b]];
}

std::span<const int> Instance::predecessors(int b) const {
  require_block(b);
  return pred_closure_[b];
}

std::span<const int> Instance::successors(int b) const {
  require_block(b);
  return succ_closure_[b];
}

namespace {
std::vector<std::string> Names(const Instance& inst, std::span<const int> ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int b : ids) out.push_back(inst.block(b).id);
  std::sort(out.begin(), out.end());
  return out;
}
}  // namespace

std::vector<std::string> predecessors(const Instance& inst,
                                      std::string_view block_id) {
  return Names(inst, inst.predecessors(inst.block_index(block_id)));
}

std::vector<std::string> successors(const Instance& inst,
                                    std::string_view block_id) {
  return Names(inst, inst.successors(inst.block_index(block_id)));
}

}  // namespace mineplan
