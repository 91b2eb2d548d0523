#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "fansmb/fans_model.hpp"
#include "fansmb/masking.hpp"

namespace fansmb {

// Samples per evaluation chunk. Chunking is fixed so serial and parallel
// kernels perform bit-identical arithmetic.
inline constexpr int kFlowChunk = 64;

// The model restricted to one subset S: masked weights are materialized once
// and reused for every batch evaluated under S. Inputs are n x d sample
// matrices; coordinates outside S are ignored (treated as zero).
class SubsetFlow {
 public:
  SubsetFlow(const FansModel& model, const VarSet& subset);
  SubsetFlow(const FansModel& model, MaskSet masks);

  const MaskSet& masks() const { return masks_; }
  const std::vector<int>& variables() const { return vars_; }
  const FansModel& model() const { return *model_; }

  // DSF parameter heads for flow layer `flow` given that layer's input
  // (n x d). Returns output_width x n; head rows of variables outside S are
  // left at their bias values and carry no meaning.
  Eigen::MatrixXd heads(int flow, const Eigen::MatrixXd& layer_input) const;

  // Per-sample transformed values u (n x d, zero outside S) and
  // sum_{i in S} sum_layers log du_i/dx_i.
  struct Forward {
    Eigen::MatrixXd u;
    Eigen::VectorXd log_det;
  };
  Forward forward(const Eigen::MatrixXd& x) const;

  // log N(u; 0, I_S) + log_det per sample.
  Eigen::VectorXd log_likelihood(const Eigen::MatrixXd& x) const;

  // Adds the gradient of sum_samples log_likelihood to `grad` (same layout
  // as model.parameters()); returns that sum.
  double accumulate_gradient(const Eigen::MatrixXd& x, std::span<double> grad) const;

 private:
  struct LayerTrace {
    Eigen::MatrixXd input;               // d x n, zero outside S
    std::vector<Eigen::MatrixXd> hidden;  // tanh activations
    Eigen::MatrixXd heads;                // output_width x n
  };
  LayerTrace run_layer(int flow, const Eigen::MatrixXd& input_t) const;
  Eigen::MatrixXd masked_input(const Eigen::MatrixXd& x) const;

  const FansModel* model_;
  MaskSet masks_;
  std::vector<int> vars_;
  std::vector<std::vector<Eigen::MatrixXd>> masked_w_;  // [flow][layer]
};

// Mean over samples of the masked log-likelihood under subset `mask`.
// Throws NumericalError if the result is not finite.
double masked_log_likelihood(const FansModel& model, const Eigen::MatrixXd& batch, const VarSet& mask);

// Per-sample log-determinants under a subset, evaluated in kFlowChunk-sized
// chunks. The parallel version splits chunks over OpenMP threads.
Eigen::VectorXd subset_log_det_serial(const SubsetFlow& flow, const Eigen::MatrixXd& x);
Eigen::VectorXd subset_log_det_parallel(const SubsetFlow& flow, const Eigen::MatrixXd& x);

// Same chunking for the full per-sample log-density (base term included).
Eigen::VectorXd subset_log_density_serial(const SubsetFlow& flow, const Eigen::MatrixXd& x);
Eigen::VectorXd subset_log_density_parallel(const SubsetFlow& flow, const Eigen::MatrixXd& x);

// Gradient of the summed masked log-likelihood of one mini-batch in which
// consecutive groups of `group_size` rows share the subset group_masks[g].
// Group gradients are reduced in group order, so both versions agree bitwise.
double batch_gradient_serial(const FansModel& model, const Eigen::MatrixXd& batch,
                             const std::vector<VarSet>& group_masks, int group_size,
                             std::span<double> grad);
double batch_gradient_parallel(const FansModel& model, const Eigen::MatrixXd& batch,
                               const std::vector<VarSet>& group_masks, int group_size,
                               std::span<double> grad);

}  // namespace fansmb
