#pragma once

#include <span>
#include <string>
#include <vector>

#include "fansmb/gauss_entropy.hpp"
#include "fansmb/graph.hpp"

namespace fansmb {

// Conditional entropy oracle H(target | set) in nats, used by the greedy
// search. Implementations must be deterministic and safe for concurrent
// const calls.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual int dim() const = 0;
  virtual std::string kind() const = 0;
  // Largest |{target} u S| the scorer accepts.
  virtual int max_subset() const { return dim(); }

  virtual double entropy(int target, const VarSet& cond) const = 0;

  // H(target | base u {c}) for every candidate c. Failures are rethrown
  // naming the offending candidate.
  virtual std::vector<double> candidate_entropies(int target, const VarSet& base,
                                                  std::span<const int> candidates) const;
};

// Closed-form linear-Gaussian scorer on a covariance matrix (sample or
// analytic).
class GaussianScorer : public Scorer {
 public:
  explicit GaussianScorer(CovMatrix cov) : cov_(std::move(cov)) {}

  int dim() const override { return cov_.dim(); }
  std::string kind() const override { return "gaussian"; }
  double entropy(int target, const VarSet& cond) const override {
    return gaussian_cond_entropy(cov_, target, cond);
  }
  const CovMatrix& covariance() const { return cov_; }

 private:
  CovMatrix cov_;
};

}  // namespace fansmb
