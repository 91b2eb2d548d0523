#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fansmb {

using VarSet = std::set<int>;

struct Edge {
  int parent = 0;
  int child = 0;
  auto operator<=>(const Edge&) const = default;
};

using EdgeWeights = std::map<Edge, double>;

// Directed acyclic graph over variables 0..d-1. Validated and topologically
// sorted on construction; immutable afterwards.
class Dag {
 public:
  explicit Dag(int d, const std::vector<Edge>& edges = {},
               std::optional<EdgeWeights> weights = std::nullopt);

  int size() const { return d_; }
  const std::set<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool has_edge(int parent, int child) const { return edges_.contains({parent, child}); }

  bool has_weights() const { return weights_.has_value(); }
  const EdgeWeights& weights() const;
  Dag with_weights(EdgeWeights weights) const;

  const std::vector<int>& topological_order() const { return topo_; }
  const std::vector<int>& parents(int v) const { return parents_.at(v); }
  const std::vector<int>& children(int v) const { return children_.at(v); }

 private:
  int d_;
  std::set<Edge> edges_;
  std::optional<EdgeWeights> weights_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::vector<int> topo_;
};

// Parents, children and spouses of `target`.
VarSet markov_boundary_of(const Dag& dag, int target);

// Symmetric 0/1 adjacency with empty diagonal.
class MoralGraph {
 public:
  explicit MoralGraph(int d) : d_(d), adj_(static_cast<std::size_t>(d) * d, 0) {}

  int size() const { return d_; }
  bool adjacent(int i, int j) const { return adj_[index(i, j)] != 0; }
  void connect(int i, int j);
  std::size_t edge_count() const;

  bool operator==(const MoralGraph&) const = default;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * d_ + j; }
  int d_;
  std::vector<unsigned char> adj_;
};

MoralGraph moralize(const Dag& dag);
MoralGraph moral_from_mbs(const std::map<int, VarSet>& mb_map, int d);

// Default variable names X0..X{d-1}.
std::vector<std::string> default_names(int d);

// Edge-list CSV: "# d=<n>", optional "# names=a,b,...", then
// "parent,child[,weight]" rows of 0-based indices.
struct NamedDag {
  Dag dag;
  std::vector<std::string> names;
};

void write_dag_csv(const std::filesystem::path& path, const Dag& dag,
                   const std::vector<std::string>& names = {});
// Accepts either the edge-list form or a dense d x d 0/1 matrix (row = parent).
NamedDag read_dag_csv(const std::filesystem::path& path);

void write_moral_csv(const std::filesystem::path& path, const MoralGraph& graph);
MoralGraph read_moral_csv(const std::filesystem::path& path);

}  // namespace fansmb
