#pragma once

#include <Eigen/Dense>
#include <numbers>
#include <vector>

#include "fansmb/dataset.hpp"
#include "fansmb/graph.hpp"

namespace fansmb {

// Entropy of a standard normal, 0.5 * (1 + log 2pi) nats.
inline constexpr double kStdNormalEntropy = 0.5 * (1.0 + 1.8378770664093453);

// Symmetric covariance matrix.
class CovMatrix {
 public:
  explicit CovMatrix(Eigen::MatrixXd sigma);
  int dim() const { return static_cast<int>(sigma_.rows()); }
  const Eigen::MatrixXd& matrix() const { return sigma_; }
  double operator()(int i, int j) const { return sigma_(i, j); }

 private:
  Eigen::MatrixXd sigma_;
};

// Unbiased (1/(N-1)) estimator.
CovMatrix sample_covariance(const Dataset& ds);

Eigen::MatrixXd correlation_matrix(const CovMatrix& cov);

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& m, const std::vector<int>& idx);

// 2 * sum(log diag(chol(m))). One retry with 1e-10 * trace / n added to the
// diagonal; throws SingularMatrixError with the failing pivot otherwise.
double logdet_psd(const Eigen::MatrixXd& m);

// H(T | S) = 0.5 * (1 + log 2pi + logdet Sigma_{T u S} - logdet Sigma_S)
double gaussian_cond_entropy(const CovMatrix& cov, int target, const VarSet& cond);

}  // namespace fansmb
