#include "fansmb/gauss_entropy.hpp"

#include <cmath>
#include <optional>

#include "fansmb/error.hpp"

namespace fansmb {

CovMatrix::CovMatrix(Eigen::MatrixXd sigma) : sigma_(std::move(sigma)) {
  if (sigma_.rows() != sigma_.cols()) throw UsageError("covariance matrix must be square");
  const double scale = std::max(1.0, sigma_.cwiseAbs().maxCoeff());
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw UsageError("covariance matrix is not symmetric");
}

CovMatrix sample_covariance(const Dataset& ds) {
  const auto n = ds.data.rows();
  if (n < 2) throw UsageError("sample covariance needs N >= 2");
  Eigen::MatrixXd centered = ds.data.rowwise() - ds.data.colwise().mean();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  return CovMatrix(0.5 * (cov + cov.transpose()));
}

Eigen::MatrixXd correlation_matrix(const CovMatrix& cov) {
  Eigen::VectorXd sd = cov.matrix().diagonal().cwiseSqrt();
  for (Eigen::Index i = 0; i < sd.size(); ++i)
    if (!(sd(i) > 0.0)) throw NumericalError("zero-variance variable " + std::to_string(i));
  Eigen::VectorXd inv = sd.cwiseInverse();
  Eigen::MatrixXd c = inv.asDiagonal() * cov.matrix() * inv.asDiagonal();
  c.diagonal().setOnes();
  return 0.5 * (c + c.transpose());
}

Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = m(idx[a], idx[b]);
  return sub;
}

namespace {

// In-place lower Cholesky; returns the failing pivot or nullopt on success.
std::optional<int> cholesky_logdet(Eigen::MatrixXd a, double& logdet) {
  const Eigen::Index n = a.rows();
  logdet = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double diag = a(j, j) - a.row(j).head(j).squaredNorm();
    if (!(diag > 0.0) || !std::isfinite(diag)) return static_cast<int>(j);
    double ljj = std::sqrt(diag);
    a(j, j) = ljj;
    logdet += 2.0 * std::log(ljj);
    for (Eigen::Index i = j + 1; i < n; ++i)
      a(i, j) = (a(i, j) - a.row(i).head(j).dot(a.row(j).head(j))) / ljj;
  }
  return std::nullopt;
}

}  // namespace

double logdet_psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw UsageError("logdet of a non-square matrix");
  if (m.rows() == 0) return 0.0;
  double logdet = 0.0;
  auto pivot = cholesky_logdet(m, logdet);
  if (!pivot) return logdet;
  Eigen::MatrixXd jittered = m;
  jittered.diagonal().array() += 1e-10 * m.trace() / static_cast<double>(m.rows());
  pivot = cholesky_logdet(jittered, logdet);
  if (!pivot) return logdet;
  throw SingularMatrixError("matrix is not positive definite", *pivot);
}

double gaussian_cond_entropy(const CovMatrix& cov, int target, const VarSet& cond) {
  const int d = cov.dim();
  if (target < 0 || target >= d) throw UsageError("target out of range");
  if (cond.contains(target)) throw UsageError("target must not be in the conditioning set");
  std::vector<int> s(cond.begin(), cond.end());
  for (int i : s)
    if (i < 0 || i >= d) throw UsageError("conditioning index out of range");
  std::vector<int> ts;
  ts.reserve(s.size() + 1);
  ts.push_back(target);
  ts.insert(ts.end(), s.begin(), s.end());
  const double joint = logdet_psd(principal_submatrix(cov.matrix(), ts));
  const double marg = s.empty() ? 0.0 : logdet_psd(principal_submatrix(cov.matrix(), s));
  return kStdNormalEntropy + 0.5 * (joint - marg);
}

}  // namespace fansmb
