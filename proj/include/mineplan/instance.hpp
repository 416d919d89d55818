#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mineplan {

// ---------------------------------------------------------------------------
// Plain problem data. This is what the file format round-trips and what the
// generator produces; it may be ill-formed until check_integrity() says
// otherwise. `Instance` below wraps a checked copy with derived indexes.
// ---------------------------------------------------------------------------

enum class NodeKind { kSource, kStockpile, kIntermediate, kProductSink };

std::string_view ToString(NodeKind kind);
std::optional<NodeKind> ParseNodeKind(std::string_view text);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::kIntermediate;
  std::string product;                   // kProductSink only
  std::optional<double> exit_capacity;   // tons per period
  std::vector<double> stockpile_capacity;  // tons, one entry per period

  bool operator==(const Node&) const = default;
};

struct Arc {
  std::string from;
  std::string to;

  bool operator==(const Arc&) const = default;
};

struct FlowNetwork {
  std::vector<Node> nodes;
  std::vector<Arc> arcs;

  bool operator==(const FlowNetwork&) const = default;
};

struct Parcel {
  std::string id;
  std::string type;  // material type
  double tonnage = 0.0;
  double extraction_cost = 0.0;  // per ton
  std::map<std::string, double> grades;  // element -> mass fraction

  bool operator==(const Parcel&) const = default;
};

struct Block {
  std::string id;
  std::string pit;
  int bench = 0;  // larger index = higher elevation
  std::vector<Parcel> parcels;

  bool operator==(const Block&) const = default;
};

struct Product {
  std::string id;
  double revenue_per_ton = 0.0;
  std::map<std::string, std::pair<double, double>> grade_windows;

  bool operator==(const Product&) const = default;
};

struct Pit {
  std::string id;
  double capex_cost = 0.0;
  double mining_capacity = 0.0;  // tons per period
  FlowNetwork network;

  bool operator==(const Pit&) const = default;
};

struct MinProductionGroup {
  std::vector<std::string> pits;
  std::vector<double> minimum;  // tons, one entry per period

  bool operator==(const MinProductionGroup&) const = default;
};

// (i, j): block i may not start before block j is depleted.
struct Precedence {
  std::string block;
  std::string requires_block;

  bool operator==(const Precedence&) const = default;
};

struct InstanceData {
  int periods = 0;
  std::vector<double> discount;
  std::vector<std::string> elements;
  std::vector<Product> products;
  std::vector<Pit> pits;
  std::vector<Block> blocks;
  std::vector<Precedence> precedences;
  std::vector<MinProductionGroup> min_production_groups;

  bool operator==(const InstanceData&) const = default;
};

// Returns one human-readable line per violated invariant; empty iff the data
// is a well-formed instance.
std::vector<std::string> check_integrity(const InstanceData& data);

// ---------------------------------------------------------------------------
// Checked, immutable instance with dense indexes. Blocks, pits, parcels,
// elements and products are addressed by their position in the data arrays.
// Parcels get a global index in block order. Periods are 1-based.
// ---------------------------------------------------------------------------

struct PitNetwork {
  int source = -1;
  std::vector<NodeKind> kind;
  std::vector<int> product;                 // product index for sinks, else -1
  std::vector<std::pair<int, int>> arcs;    // node indexes
  std::vector<std::vector<int>> out_arcs;   // per node, arc indexes
  std::vector<std::vector<int>> in_arcs;
  std::vector<int> stockpiles;              // node indexes, in node order
  std::vector<int> stockpile_slot;          // node -> position in stockpiles or -1
  std::vector<bool> reaches_product;        // [node * products + r]
  std::vector<bool> source_reaches_product;  // per product
};

class Instance {
 public:
  // Throws IntegrityError when check_integrity(data) is non-empty.
  explicit Instance(InstanceData data);

  const InstanceData& data() const { return data_; }

  int periods() const { return data_.periods; }
  double discount(int period) const { return data_.discount[period - 1]; }

  int num_pits() const { return static_cast<int>(data_.pits.size()); }
  int num_blocks() const { return static_cast<int>(data_.blocks.size()); }
  int num_parcels() const { return static_cast<int>(parcel_block_.size()); }
  int num_elements() const { return static_cast<int>(data_.elements.size()); }
  int num_products() const { return static_cast<int>(data_.products.size()); }

  const Pit& pit(int m) const { return data_.pits[m]; }
  const Block& block(int b) const { return data_.blocks[b]; }
  const Product& product(int r) const { return data_.products[r]; }

  int block_index(std::string_view id) const;  // throws UnknownBlock
  int pit_index(std::string_view id) const;    // throws UnknownPit
  int element_index(std::string_view id) const;  // -1 if absent
  void require_block(int b) const;  // throws UnknownBlock
  void require_pit(int m) const;    // throws UnknownPit

  int pit_of_block(int b) const { return block_pit_[b]; }
  std::span<const int> pit_blocks(int m) const { return pit_blocks_[m]; }
  int bench(int b) const { return data_.blocks[b].bench; }
  double block_tonnage(int b) const { return block_tonnage_[b]; }

  // Global parcel indexes of block b form [first, first + count).
  int first_parcel(int b) const { return block_first_parcel_[b]; }
  int parcel_count(int b) const {
    return static_cast<int>(data_.blocks[b].parcels.size());
  }
  int block_of_parcel(int p) const { return parcel_block_[p]; }
  const Parcel& parcel(int p) const;
  double tonnage(int p) const { return parcel(p).tonnage; }
  double cost(int p) const { return parcel(p).extraction_cost; }
  double grade(int p, int e) const { return grade_[p * num_elements() + e]; }

  const PitNetwork& network(int m) const { return networks_[m]; }

  // Direct precedence lists: `requires_blocks(i)` holds every j with (i, j).
  std::span<const int> requires_blocks(int b) const { return requires_[b]; }
  std::span<const int> required_by(int b) const { return required_by_[b]; }

  // Transitive closures over the precedence DAG, sorted ascending.
  // predecessors(b): blocks that must be depleted before b may start.
  // successors(b): blocks that cannot start until b is depleted.
  std::span<const int> predecessors(int b) const;
  std::span<const int> successors(int b) const;

  // A topological order in which every block comes after all it requires.
  std::span<const int> topological_order() const { return topo_; }

  // Min-production groups as pit indexes.
  std::span<const int> group_pits(int k) const { return group_pits_[k]; }
  int num_groups() const {
    return static_cast<int>(data_.min_production_groups.size());
  }

 private:
  InstanceData data_;
  std::unordered_map<std::string, int> block_ids_;
  std::unordered_map<std::string, int> pit_ids_;
  std::vector<int> block_pit_;
  std::vector<std::vector<int>> pit_blocks_;
  std::vector<double> block_tonnage_;
  std::vector<int> block_first_parcel_;
  std::vector<int> parcel_block_;
  std::vector<double> grade_;
  std::vector<PitNetwork> networks_;
  std::vector<std::vector<int>> requires_;
  std::vector<std::vector<int>> required_by_;
  std::vector<std::vector<int>> pred_closure_;
  std::vector<std::vector<int>> succ_closure_;
  std::vector<int> topo_;
  std::vector<std::vector<int>> group_pits_;
};

// Id-based closure queries; throw UnknownBlock.
std::vector<std::string> predecessors(const Instance& inst,
                                      std::string_view block_id);
std::vector<std::string> successors(const Instance& inst,
                                    std::string_view block_id);

// File I/O (JSON schema documented in README).
InstanceData parse_instance_json(std::string_view text);  // ParseError
std::string dump_instance_json(const InstanceData& data);
Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);
void save_instance(const InstanceData& data, const std::filesystem::path& path);

}  // namespace mineplan
