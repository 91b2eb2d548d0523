#include "fansmb/ce_estimator.hpp"

#include <cmath>
#include <numeric>

#include "fansmb/error.hpp"
#include "fansmb/flow.hpp"

namespace fansmb {

std::string to_string(EntropyForm form) { return form == EntropyForm::LogDet ? "logdet" : "likelihood"; }

EntropyForm parse_entropy_form(const std::string& s) {
  if (s == "logdet") return EntropyForm::LogDet;
  if (s == "likelihood") return EntropyForm::Likelihood;
  throw UsageError("unknown entropy estimator '" + s + "' (expected logdet or likelihood)");
}

std::vector<int> draw_evaluation_indices(int n, int k, std::uint64_t seed) {
  if (n < 1 || k < 1) throw UsageError("evaluation sample needs n >= 1 and K >= 1");
  Rng rng = make_rng(seed, "mceval");
  std::vector<int> out;
  out.reserve(k);
  if (k <= n) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
      int j = std::uniform_int_distribution<int>(i, n - 1)(rng);
      std::swap(idx[i], idx[j]);
      out.push_back(idx[i]);
    }
  } else {
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int i = 0; i < k; ++i) out.push_back(pick(rng));
  }
  return out;
}

FansScorer::FansScorer(const FansModel& model, const Dataset& data, int k, std::uint64_t seed,
                       EntropyForm form)
    : model_(&model), form_(form) {
  if (data.dim() != model.dim()) throw UsageError("dataset dimension does not match the model");
  auto idx = draw_evaluation_indices(data.rows(), k, seed);
  samples_.resize(k, data.dim());
  for (int r = 0; r < k; ++r) samples_.row(r) = data.data.row(idx[r]);
}

std::size_t FansScorer::cache_size() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

Eigen::VectorXd FansScorer::subset_term(const VarSet& subset) const {
  constexpr std::size_t kCacheLimit = 1 << 16;
  std::vector<int> key(subset.begin(), subset.end());
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  SubsetFlow flow(*model_, subset);
  Eigen::VectorXd ld = form_ == EntropyForm::LogDet ? subset_log_det_parallel(flow, samples_)
                                                     : subset_log_density_parallel(flow, samples_);
  if (!ld.allFinite()) throw NumericalError("non-finite flow evaluation on the evaluation sample");
  std::lock_guard lock(mu_);
  if (cache_.size() < kCacheLimit) cache_.emplace(std::move(key), ld);
  return ld;
}

EntropyEstimate FansScorer::estimate(int target, const VarSet& cond) const {
  const int d = dim();
  if (target < 0 || target >= d) throw UsageError("target out of range");
  if (cond.contains(target)) throw UsageError("target must not be in the conditioning set");
  for (int v : cond)
    if (v < 0 || v >= d) throw UsageError("conditioning index out of range");
  if (model_->config().compact && static_cast<int>(cond.size()) + 1 > model_->config().max_subset)
    throw UsageError("|{T} u S| = " + std::to_string(cond.size() + 1) + " exceeds M=" +
                     std::to_string(model_->config().max_subset));

  VarSet ts = cond;
  ts.insert(target);
  Eigen::VectorXd diff = -subset_term(ts);
  if (!cond.empty()) diff += subset_term(cond);

  EntropyEstimate e;
  e.target = target;
  e.subset = cond;
  e.samples = static_cast<int>(diff.size());
  const double mean = diff.mean();
  e.value = form_ == EntropyForm::LogDet ? mean + kStdNormalEntropy : mean;
  if (e.samples > 1) {
    const double var = (diff.array() - mean).square().sum() / (e.samples - 1);
    e.std_error = std::sqrt(var / e.samples);
  }
  return e;
}

EntropyEstimate estimate_cond_entropy(const FansModel& model, const Dataset& data, int target,
                                      const VarSet& cond, int k, std::uint64_t seed, EntropyForm form) {
  return FansScorer(model, data, k, seed, form).estimate(target, cond);
}

std::map<int, EntropyEstimate> batch_candidate_scores(const FansModel& model, const Dataset& data,
                                                      int target, const VarSet& base,
                                                      const std::vector<int>& candidates, int k,
                                                      std::uint64_t seed, EntropyForm form) {
  std::map<int, EntropyEstimate> out;
  if (candidates.empty()) return out;
  FansScorer scorer(model, data, k, seed, form);
  for (int c : candidates) {
    if (c == target || base.contains(c))
      throw UsageError("candidate " + std::to_string(c) + " overlaps the target or base set");
    VarSet s = base;
    s.insert(c);
    out.emplace(c, scorer.estimate(target, s));
  }
  return out;
}

}  // namespace fansmb
