#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fansmb/fans_config.hpp"
#include "fansmb/graph.hpp"
#include "fansmb/random.hpp"

namespace fansmb {

// One shared dense parameter set serving every subset; masks are applied at
// evaluation time. Parameters are stored flat so optimizers and checkpoints
// see a single vector. Per flow layer, in order: for each hidden layer its
// weight (fan_out x fan_in, column-major) then bias, then the head weight and
// head bias. Head rows are variable-major: row v * 3k + j holds w_raw[j]
// (j < k), a_raw[j - k] (k <= j < 2k) or b[j - 2k].
class FansModel {
 public:
  explicit FansModel(FansConfig config);

  // Variance-scaled uniform weights; head biases start the transformer near
  // the identity (equal small w_raw, a = 1, b = 0).
  static FansModel initialized(FansConfig config, std::uint64_t seed);

  const FansConfig& config() const { return config_; }
  int dim() const { return config_.d; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

  // layer in [0, hidden_layers]; layer == hidden_layers is the head layer.
  Eigen::Map<const Eigen::MatrixXd> weight(int flow, int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int flow, int layer) const;
  std::size_t weight_offset(int flow, int layer) const { return slot(flow, layer).weight; }
  std::size_t bias_offset(int flow, int layer) const { return slot(flow, layer).bias; }
  int fan_in(int layer) const;
  int fan_out(int layer) const;

  bool operator==(const FansModel& other) const {
    return params_ == other.params_ && layout_key() == other.layout_key();
  }

 private:
  struct Slot {
    std::size_t weight = 0;
    std::size_t bias = 0;
  };
  const Slot& slot(int flow, int layer) const;
  std::vector<int> layout_key() const;

  FansConfig config_;
  std::vector<Slot> slots_;  // flow-major
  std::vector<double> params_;
};

// Binary checkpoint: "FANSv1", field count, config fields as int64 LE,
// parameter count as uint64 LE, parameters as float64 LE. A JSON sidecar
// (<path>.json) repeats the config for inspection.
void save_checkpoint(const std::filesystem::path& path, const FansModel& model);
FansModel load_checkpoint(const std::filesystem::path& path);

// Subset size uniform in [1, M], then a uniform subset of that size.
std::vector<unsigned char> sample_leaf_mask(int d, int max_subset, Rng& rng);
std::vector<unsigned char> sample_leaf_mask(int d, int max_subset, std::uint64_t seed);
VarSet mask_to_set(const std::vector<unsigned char>& mask);

}  // namespace fansmb
