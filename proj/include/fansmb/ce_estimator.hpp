#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "fansmb/dataset.hpp"
#include "fansmb/fans_model.hpp"
#include "fansmb/scorer.hpp"

namespace fansmb {

struct EntropyEstimate {
  double value = 0.0;      // nats
  double std_error = 0.0;  // sample std of the per-sample terms / sqrt(K)
  int samples = 0;         // K
  VarSet subset;
  int target = -1;
};

// LogDet is the estimator above: only the log-determinants enter and one
// standard-normal entropy is added for T, which presumes the flow maps the
// data exactly onto N(0, I). Likelihood keeps the base density term,
// H(T | S) ~ mean_k [ log q_S(x_k) - log q_{T u S}(x_k) ], and does not rely
// on that assumption. Both agree for a perfectly trained flow.
enum class EntropyForm { LogDet, Likelihood };

std::string to_string(EntropyForm form);
EntropyForm parse_entropy_form(const std::string& s);

// K row indices into a dataset of n rows: without replacement when K <= n,
// with replacement otherwise. Drawn from the "mceval" stream of `seed`.
std::vector<int> draw_evaluation_indices(int n, int k, std::uint64_t seed);

// Monte-Carlo estimate of H(T | S) from a trained flow:
//   mean_k [ logdet_S(x_k) - logdet_{T u S}(x_k) ] + 0.5 (1 + log 2pi)
// where logdet_A sums log|df_A / dx_i| over i in A under the mask of A.
EntropyEstimate estimate_cond_entropy(const FansModel& model, const Dataset& data, int target,
                                      const VarSet& cond, int k, std::uint64_t seed,
                                      EntropyForm form = EntropyForm::LogDet);

// H(T | base u {c}) for every candidate, all on one shared evaluation sample.
std::map<int, EntropyEstimate> batch_candidate_scores(const FansModel& model, const Dataset& data,
                                                      int target, const VarSet& base,
                                                      const std::vector<int>& candidates, int k,
                                                      std::uint64_t seed,
                                                      EntropyForm form = EntropyForm::LogDet);

// Scorer backed by a trained flow. One evaluation sample is drawn at
// construction and reused for every query; per-subset log-determinants are
// cached, so repeated subsets across grow/shrink steps cost nothing.
class FansScorer : public Scorer {
 public:
  FansScorer(const FansModel& model, const Dataset& data, int k, std::uint64_t seed,
             EntropyForm form = EntropyForm::LogDet);

  int dim() const override { return model_->dim(); }
  std::string kind() const override { return "fans"; }
  int max_subset() const override { return model_->config().max_subset; }

  double entropy(int target, const VarSet& cond) const override { return estimate(target, cond).value; }
  EntropyEstimate estimate(int target, const VarSet& cond) const;

  const Eigen::MatrixXd& evaluation_sample() const { return samples_; }
  std::size_t cache_size() const;
  EntropyForm form() const { return form_; }

 private:
  // Per-sample log-determinant or log-density of the subset, by form.
  Eigen::VectorXd subset_term(const VarSet& subset) const;

  const FansModel* model_;
  EntropyForm form_;
  Eigen::MatrixXd samples_;  // K x d
  mutable std::mutex mu_;
  mutable std::map<std::vector<int>, Eigen::VectorXd> cache_;
};

}  // namespace fansmb
