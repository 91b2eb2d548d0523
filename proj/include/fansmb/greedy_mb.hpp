#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fansmb/scorer.hpp"

namespace fansmb {

enum class SymmetryRule { Union, Intersection, None };

std::string to_string(SymmetryRule rule);
SymmetryRule parse_symmetry_rule(const std::string& s);

struct SearchConfig {
  double eps_grow = 0.005;
  double eps_shrink = 0.002;
  int patience = 15;
  int max_subset = 0;  // M; 0 means "whatever the scorer accepts"
  int samples = 1000;  // K, only used by the flow scorer
  SymmetryRule symmetry = SymmetryRule::Union;
  std::uint64_t seed = 0;

  // Sparse graphs use 0.005 / 0.002, dense ones 0.001 for both.
  static SearchConfig defaults(bool dense = false);
  void validate() const;
};

struct TraceStep {
  int variable = -1;
  double entropy = 0.0;  // H(target | set) after the step
  bool operator==(const TraceStep&) const = default;
};

struct MbResult {
  int target = -1;
  std::vector<int> members;  // ranked: growing order with shrunk members removed
  std::vector<int> grown;    // MB+ in insertion order
  std::vector<TraceStep> grow_trace;
  std::vector<TraceStep> shrink_trace;
  double initial_entropy = 0.0;  // H(target)
  bool operator==(const MbResult&) const = default;
};

using MbMap = std::map<int, std::vector<int>>;

struct GrowResult {
  std::vector<int> grown;
  std::vector<TraceStep> trace;
  double initial_entropy = 0.0;
};

// Largest |MB+| the search may reach for this scorer and config.
int growth_cap(const Scorer& scorer, const SearchConfig& cfg);

GrowResult grow(int target, const Scorer& scorer, const SearchConfig& cfg);

// Removes members from `grown` (insertion order) while the cheapest removal
// costs at most eps_shrink. Returns the survivors in their original order.
std::vector<int> shrink(const std::vector<int>& grown, int target, const Scorer& scorer,
                        const SearchConfig& cfg, std::vector<TraceStep>* trace = nullptr);

MbResult search_target(int target, const Scorer& scorer, const SearchConfig& cfg);

MbMap symmetry_correct(const MbMap& mbs, SymmetryRule rule);

struct Discovery {
  std::vector<MbResult> per_target;  // indexed by target, before symmetry correction
  MbMap mb;                          // after symmetry correction
};

// Grow/shrink for every target, spread over `workers` threads (0 = OpenMP
// default), then symmetry correction. Output does not depend on `workers`.
// If any target fails, throws after all targets finished, naming each failure.
Discovery discover_all(const Scorer& scorer, const SearchConfig& cfg, int workers = 0);
Discovery discover_all_serial(const Scorer& scorer, const SearchConfig& cfg);

MbMap to_mb_map(const std::vector<MbResult>& results);

}  // namespace fansmb
