#pragma once

#include <functional>
#include <vector>

#include "fansmb/dataset.hpp"
#include "fansmb/error.hpp"
#include "fansmb/fans_config.hpp"
#include "fansmb/fans_model.hpp"

namespace fansmb {

// Raised when a mini-batch produces a non-finite loss.
class TrainingDivergence : public NumericalError {
 public:
  TrainingDivergence(int epoch, int batch, const VarSet& mask);
  int epoch() const { return epoch_; }
  int batch() const { return batch_; }

 private:
  int epoch_;
  int batch_;
};

struct TrainResult {
  std::vector<double> loss_trace;  // mean NLL per epoch under the sampled masks
  int epochs_run = 0;
  bool early_stopped = false;
};

// Adam with bias correction.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(std::size_t n, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
                         double eps = 1e-8);
  // `grad` is the gradient of the quantity to minimize.
  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  long long t_ = 0;
  std::vector<double> m_, v_;
};

using EpochCallback = std::function<void(int epoch, double mean_nll)>;

// Maximizes the masked log-likelihood with leaf masks resampled for every
// group of `mask_group` samples. Deterministic given cfg.seed; the batch
// gradient kernel is the parallel one.
TrainResult train(FansModel& model, const Dataset& data, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

}  // namespace fansmb
