#include "fansmb/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fansmb/flow.hpp"

namespace fansmb {

namespace {

std::string describe(int epoch, int batch, const VarSet& mask) {
  std::ostringstream s;
  s << "training diverged at epoch " << epoch << ", batch " << batch << ", mask {";
  bool first = true;
  for (int v : mask) {
    s << (first ? "" : ",") << v;
    first = false;
  }
  s << "}";
  return s.str();
}

double window_mean(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(begin),
                         v.begin() + static_cast<std::ptrdiff_t>(end), 0.0) /
         static_cast<double>(end - begin);
}

}  // namespace

TrainingDivergence::TrainingDivergence(int epoch, int batch, const VarSet& mask)
    : NumericalError(describe(epoch, batch, mask)), epoch_(epoch), batch_(batch) {}

AdamOptimizer::AdamOptimizer(std::size_t n, double learning_rate, double beta1, double beta2, double eps)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

TrainResult train(FansModel& model, const Dataset& data, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  const FansConfig& mc = model.config();
  if (data.dim() != mc.d)
    throw UsageError("dataset has " + std::to_string(data.dim()) + " columns, model expects " +
                     std::to_string(mc.d));
  if (cfg.epochs < 0 || cfg.batch_size < 1 || cfg.mask_group < 1 || !(cfg.learning_rate > 0.0))
    throw UsageError("invalid training configuration");

  TrainResult result;
  const int n = data.rows();
  AdamOptimizer adam(model.parameter_count(), cfg.learning_rate);
  Rng shuffle_rng = make_rng(cfg.seed, "shuffle");
  Rng mask_rng = make_rng(cfg.seed, "masksample");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(model.parameter_count());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_nll = 0.0;
    int batch_index = 0;
    for (int start = 0; start < n; start += cfg.batch_size, ++batch_index) {
      const int len = std::min(cfg.batch_size, n - start);
      Eigen::MatrixXd batch(len, mc.d);
      for (int r = 0; r < len; ++r) batch.row(r) = data.data.row(order[start + r]);

      const int groups = (len + cfg.mask_group - 1) / cfg.mask_group;
      std::vector<VarSet> masks;
      masks.reserve(groups);
      for (int g = 0; g < groups; ++g) masks.push_back(mask_to_set(sample_leaf_mask(mc.d, mc.max_subset, mask_rng)));

      std::fill(grad.begin(), grad.end(), 0.0);
      const double loglik = batch_gradient_parallel(model, batch, masks, cfg.mask_group, grad);
      bool finite = std::isfinite(loglik);
      for (double g : grad) finite = finite && std::isfinite(g);
      if (!finite) throw TrainingDivergence(epoch, batch_index, masks.front());

      // Minimize the mean negative log-likelihood of the batch.
      const double scale = -1.0 / len;
      for (double& g : grad) g *= scale;
      adam.step(model.parameters(), grad);
      epoch_nll -= loglik;
    }
    epoch_nll /= n;
    result.loss_trace.push_back(epoch_nll);
    result.epochs_run = epoch + 1;
    if (on_epoch) on_epoch(epoch, epoch_nll);

    const auto w = static_cast<std::size_t>(cfg.early_stop_window);
    const std::size_t done = result.loss_trace.size();
    if (cfg.early_stop && w > 0 && done >= 2 * w) {
      const double previous = window_mean(result.loss_trace, done - 2 * w, done - w);
      const double current = window_mean(result.loss_trace, done - w, done);
      if (previous - current < cfg.early_stop_tolerance) {
        result.early_stopped = true;
        break;
      }
    }
  }
  return result;
}

}  // namespace fansmb
