#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "fansmb/graph.hpp"
#include "fansmb/greedy_mb.hpp"

namespace fansmb {

// Binary-relevance nDCG with the 1/log2(rank + 2) discount (rank 0-based).
// Empty truth scores 1 for an empty ranking and 0 otherwise.
double ndcg(const std::vector<int>& ranked, const VarSet& truth);

// Mean of precision@(r+1) over the ranks r holding a true item, divided by
// |truth|. Same empty-truth convention as ndcg.
double avep(const std::vector<int>& ranked, const VarSet& truth);

// 1 when both sets are empty, 0 when exactly one is.
double f1(const VarSet& predicted, const VarSet& truth);

struct MetricRow {
  int target = -1;
  double ndcg = 0.0;
  double avep = 0.0;
  double f1 = 0.0;
};

struct MetricReport {
  std::vector<MetricRow> rows;
  MetricRow mean;  // target = -1
};

MetricReport evaluate_run(const MbMap& mbs, const Dag& dag);

// CSV "target,ndcg,avep,f1" with a trailing "mean" row; targets by name.
void write_metrics_csv(const std::filesystem::path& path, const MetricReport& report,
                       const std::vector<std::string>& names);
void print_metrics_table(std::ostream& os, const MetricReport& report,
                         const std::vector<std::string>& names);

}  // namespace fansmb
