#include "fansmb/flow.hpp"

#include <cmath>
#include <numbers>

#include "fansmb/dsf.hpp"
#include "fansmb/error.hpp"
#include "parallel_util.hpp"

namespace fansmb {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

}  // namespace

SubsetFlow::SubsetFlow(const FansModel& model, const VarSet& subset)
    : SubsetFlow(model, build_masks(subset, model.config())) {}

SubsetFlow::SubsetFlow(const FansModel& model, MaskSet masks) : model_(&model), masks_(std::move(masks)) {
  const FansConfig& cfg = model.config();
  for (int v = 0; v < cfg.d; ++v)
    if (masks_.variable_selected[v]) vars_.push_back(v);
  if (cfg.compact && static_cast<int>(vars_.size()) > cfg.max_subset)
    throw UsageError("subset of size " + std::to_string(vars_.size()) + " exceeds M=" +
                     std::to_string(cfg.max_subset) + " of a compact model");
  masked_w_.resize(cfg.flow_layers);
  for (int f = 0; f < cfg.flow_layers; ++f)
    for (int l = 0; l <= cfg.hidden_layers; ++l)
      masked_w_[f].push_back(model.weight(f, l).cwiseProduct(masks_.layers[l]));
}

Eigen::MatrixXd SubsetFlow::masked_input(const Eigen::MatrixXd& x) const {
  if (x.cols() != model_->dim()) throw UsageError("sample dimension does not match the model");
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(x.cols(), x.rows());
  for (int v : vars_) t.row(v) = x.col(v).transpose();
  return t;
}

SubsetFlow::LayerTrace SubsetFlow::run_layer(int flow, const Eigen::MatrixXd& input_t) const {
  const FansConfig& cfg = model_->config();
  LayerTrace t;
  t.input = input_t;
  const Eigen::MatrixXd* cur = &t.input;
  for (int l = 0; l < cfg.hidden_layers; ++l) {
    Eigen::MatrixXd a = masked_w_[flow][l] * (*cur);
    a.colwise() += model_->bias(flow, l);
    t.hidden.push_back(a.array().tanh().matrix());
    cur = &t.hidden.back();
  }
  t.heads = masked_w_[flow][cfg.hidden_layers] * (*cur);
  t.heads.colwise() += model_->bias(flow, cfg.hidden_layers);
  return t;
}

Eigen::MatrixXd SubsetFlow::heads(int flow, const Eigen::MatrixXd& layer_input) const {
  return run_layer(flow, masked_input(layer_input)).heads;
}

SubsetFlow::Forward SubsetFlow::forward(const Eigen::MatrixXd& x) const {
  const FansConfig& cfg = model_->config();
  const int k = cfg.dsf_dim;
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd z = masked_input(x);
  Eigen::VectorXd log_det = Eigen::VectorXd::Zero(n);
  for (int f = 0; f < cfg.flow_layers; ++f) {
    LayerTrace t = run_layer(f, z);
    for (Eigen::Index s = 0; s < n; ++s) {
      const double* col = t.heads.data() + s * t.heads.rows();
      for (int v : vars_) {
        const double* h = col + static_cast<std::size_t>(v) * 3 * k;
        DsfResult r = dsf_transform(z(v, s), {h, static_cast<std::size_t>(k)},
                                    {h + k, static_cast<std::size_t>(k)}, {h + 2 * k, static_cast<std::size_t>(k)});
        z(v, s) = r.u;
        log_det(s) += r.logderiv;
      }
    }
  }
  return {z.transpose(), log_det};
}

Eigen::VectorXd SubsetFlow::log_likelihood(const Eigen::MatrixXd& x) const {
  Forward fw = forward(x);
  Eigen::VectorXd ll = fw.log_det;
  const double base = -kHalfLog2Pi * static_cast<double>(vars_.size());
  for (Eigen::Index s = 0; s < ll.size(); ++s) ll(s) += base - 0.5 * fw.u.row(s).squaredNorm();
  return ll;
}

double SubsetFlow::accumulate_gradient(const Eigen::MatrixXd& x, std::span<double> grad) const {
  const FansConfig& cfg = model_->config();
  if (grad.size() != model_->parameter_count()) throw UsageError("gradient buffer has the wrong size");
  const int k = cfg.dsf_dim;
  const auto ks = static_cast<std::size_t>(k);
  const Eigen::Index n = x.rows();

  // Forward, keeping every layer's activations.
  std::vector<LayerTrace> traces;
  Eigen::MatrixXd z = masked_input(x);
  double total = 0.0;
  for (int f = 0; f < cfg.flow_layers; ++f) {
    traces.push_back(run_layer(f, z));
    const LayerTrace& t = traces.back();
    for (Eigen::Index s = 0; s < n; ++s) {
      const double* col = t.heads.data() + s * t.heads.rows();
      for (int v : vars_) {
        const double* h = col + static_cast<std::size_t>(v) * 3 * k;
        DsfResult r = dsf_transform(z(v, s), {h, ks}, {h + k, ks}, {h + 2 * k, ks});
        z(v, s) = r.u;
        total += r.logderiv;
      }
    }
  }
  for (Eigen::Index s = 0; s < n; ++s)
    for (int v : vars_) total += -kHalfLog2Pi - 0.5 * z(v, s) * z(v, s);

  // Backward. grad_z starts as d(log N(u))/du = -u.
  Eigen::MatrixXd grad_z = Eigen::MatrixXd::Zero(z.rows(), n);
  for (int v : vars_) grad_z.row(v) = -z.row(v);

  for (int f = cfg.flow_layers - 1; f >= 0; --f) {
    const LayerTrace& t = traces[f];
    Eigen::MatrixXd grad_heads = Eigen::MatrixXd::Zero(t.heads.rows(), n);
    Eigen::MatrixXd grad_in = Eigen::MatrixXd::Zero(z.rows(), n);
    for (Eigen::Index s = 0; s < n; ++s) {
      const double* col = t.heads.data() + s * t.heads.rows();
      double* gcol = grad_heads.data() + s * grad_heads.rows();
      for (int v : vars_) {
        const std::size_t off = static_cast<std::size_t>(v) * 3 * k;
        const double* h = col + off;
        double* g = gcol + off;
        grad_in(v, s) = dsf_backward(t.input(v, s), {h, ks}, {h + k, ks}, {h + 2 * k, ks}, grad_z(v, s), 1.0,
                                     {g, ks}, {g + k, ks}, {g + 2 * k, ks});
      }
    }

    const int hl = cfg.hidden_layers;
    Eigen::MatrixXd delta = grad_heads;  // gradient w.r.t. pre-activation of the current layer
    for (int l = hl; l >= 0; --l) {
      const Eigen::MatrixXd& below = l == 0 ? t.input : t.hidden[l - 1];
      Eigen::Map<Eigen::MatrixXd> gw(grad.data() + model_->weight_offset(f, l), model_->fan_out(l),
                                     model_->fan_in(l));
      Eigen::Map<Eigen::VectorXd> gb(grad.data() + model_->bias_offset(f, l), model_->fan_out(l));
      gw += (delta * below.transpose()).cwiseProduct(masks_.layers[l]);
      gb += delta.rowwise().sum();
      Eigen::MatrixXd back = masked_w_[f][l].transpose() * delta;
      if (l == 0) {
        grad_in += back;
      } else {
        delta = back.cwiseProduct((1.0 - below.array().square()).matrix());
      }
    }
    grad_z = Eigen::MatrixXd::Zero(z.rows(), n);
    for (int v : vars_) grad_z.row(v) = grad_in.row(v);
  }
  return total;
}

double masked_log_likelihood(const FansModel& model, const Eigen::MatrixXd& batch, const VarSet& mask) {
  if (batch.rows() == 0) throw UsageError("empty batch");
  SubsetFlow flow(model, mask);
  const double mean = flow.log_likelihood(batch).mean();
  if (!std::isfinite(mean)) throw NumericalError("non-finite masked log-likelihood");
  return mean;
}

namespace {

template <class Kernel>
Eigen::VectorXd chunked_serial(const Eigen::MatrixXd& x, Kernel&& kernel) {
  const Eigen::Index n = x.rows();
  Eigen::VectorXd out(n);
  for (Eigen::Index start = 0; start < n; start += kFlowChunk) {
    const Eigen::Index len = std::min<Eigen::Index>(kFlowChunk, n - start);
    out.segment(start, len) = kernel(x.middleRows(start, len));
  }
  return out;
}

template <class Kernel>
Eigen::VectorXd chunked_parallel(const Eigen::MatrixXd& x, Kernel&& kernel) {
  const Eigen::Index n = x.rows();
  const Eigen::Index chunks = (n + kFlowChunk - 1) / kFlowChunk;
  Eigen::VectorXd out(n);
  detail::ExceptionSlot failure;
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < chunks; ++c) {
    failure.run([&] {
      const Eigen::Index start = c * kFlowChunk;
      const Eigen::Index len = std::min<Eigen::Index>(kFlowChunk, n - start);
      out.segment(start, len) = kernel(x.middleRows(start, len));
    });
  }
  failure.rethrow();
  return out;
}

}  // namespace

Eigen::VectorXd subset_log_det_serial(const SubsetFlow& flow, const Eigen::MatrixXd& x) {
  return chunked_serial(x, [&](const Eigen::MatrixXd& c) { return flow.forward(c).log_det; });
}

Eigen::VectorXd subset_log_det_parallel(const SubsetFlow& flow, const Eigen::MatrixXd& x) {
  return chunked_parallel(x, [&](const Eigen::MatrixXd& c) { return flow.forward(c).log_det; });
}

Eigen::VectorXd subset_log_density_serial(const SubsetFlow& flow, const Eigen::MatrixXd& x) {
  return chunked_serial(x, [&](const Eigen::MatrixXd& c) { return flow.log_likelihood(c); });
}

Eigen::VectorXd subset_log_density_parallel(const SubsetFlow& flow, const Eigen::MatrixXd& x) {
  return chunked_parallel(x, [&](const Eigen::MatrixXd& c) { return flow.log_likelihood(c); });
}

namespace {

void check_groups(const Eigen::MatrixXd& batch, const std::vector<VarSet>& masks, int group_size) {
  if (group_size < 1) throw UsageError("group size must be >= 1");
  const Eigen::Index groups = (batch.rows() + group_size - 1) / group_size;
  if (static_cast<Eigen::Index>(masks.size()) != groups) throw UsageError("need one mask per sample group");
}

}  // namespace

double batch_gradient_serial(const FansModel& model, const Eigen::MatrixXd& batch,
                             const std::vector<VarSet>& group_masks, int group_size,
                             std::span<double> grad) {
  check_groups(batch, group_masks, group_size);
  std::vector<double> local(model.parameter_count());
  double total = 0.0;
  for (std::size_t g = 0; g < group_masks.size(); ++g) {
    std::fill(local.begin(), local.end(), 0.0);
    const Eigen::Index start = static_cast<Eigen::Index>(g) * group_size;
    const Eigen::Index len = std::min<Eigen::Index>(group_size, batch.rows() - start);
    SubsetFlow flow(model, group_masks[g]);
    total += flow.accumulate_gradient(batch.middleRows(start, len), local);
    for (std::size_t i = 0; i < local.size(); ++i) grad[i] += local[i];
  }
  return total;
}

double batch_gradient_parallel(const FansModel& model, const Eigen::MatrixXd& batch,
                               const std::vector<VarSet>& group_masks, int group_size,
                               std::span<double> grad) {
  check_groups(batch, group_masks, group_size);
  const auto groups = static_cast<std::ptrdiff_t>(group_masks.size());
  std::vector<std::vector<double>> local(group_masks.size());
  std::vector<double> sums(group_masks.size(), 0.0);
  detail::ExceptionSlot failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t g = 0; g < groups; ++g) {
    failure.run([&] {
      local[g].assign(model.parameter_count(), 0.0);
      const Eigen::Index start = static_cast<Eigen::Index>(g) * group_size;
      const Eigen::Index len = std::min<Eigen::Index>(group_size, batch.rows() - start);
      SubsetFlow flow(model, group_masks[g]);
      sums[g] = flow.accumulate_gradient(batch.middleRows(start, len), local[g]);
    });
  }
  failure.rethrow();
  double total = 0.0;
  for (std::size_t g = 0; g < group_masks.size(); ++g) {
    total += sums[g];
    for (std::size_t i = 0; i < local[g].size(); ++i) grad[i] += local[g][i];
  }
  return total;
}

}  // namespace fansmb
