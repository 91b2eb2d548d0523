#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fansmb/fans_config.hpp"
#include "fansmb/graph.hpp"

namespace fansmb {

// Strictly increasing 1-based positions of a subset within [1..d].
struct SubsetOrder {
  std::vector<int> positions;
  std::size_t size() const { return positions.size(); }
  bool operator==(const SubsetOrder&) const = default;
};

SubsetOrder build_subset_order(const VarSet& subset, int d);

// Greedy two-sided collider resolution: a left-to-right pass lifts repeats
// (never above hidden_max), then a right-to-left pass lowers them. The last
// element may reach last_max.
std::vector<int> resolve_colliders(std::vector<int> scores, int hidden_max, int last_max);

// Maps each position i to ceil((M-1) i / (d-1)) and resolves colliders.
SubsetOrder compact_rescale(const SubsetOrder& order, int max_subset, int d);

// Static node scores of the conditioner: inputs and outputs carry their
// variable position, hidden nodes cycle through [1, score_range] per block.
struct NodeScores {
  std::vector<int> input;                // size d
  std::vector<std::vector<int>> hidden;  // per hidden layer
  std::vector<int> output;               // size d * heads (variable-major)
};

NodeScores node_scores(const FansConfig& cfg);

// Per-subset connectivity. layers[l] is (fan_out x fan_in) 0/1; the last one
// feeds the DSF parameter heads.
struct MaskSet {
  SubsetOrder order;
  std::vector<int> effective_scores;  // score of each order position after rescaling
  std::vector<Eigen::MatrixXd> layers;
  std::vector<unsigned char> variable_selected;  // size d

  std::size_t connection_count() const;
};

MaskSet build_masks(const SubsetOrder& order, const FansConfig& cfg);
MaskSet build_masks(const VarSet& subset, const FansConfig& cfg);

}  // namespace fansmb
