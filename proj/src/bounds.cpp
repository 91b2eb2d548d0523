#include "fansmb/bounds.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>

#include "fansmb/error.hpp"

namespace fansmb {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double smallest_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue decomposition failed");
  return es.eigenvalues()(0);
}

// Visits every size-k subset of 0..n-1 in lexicographic order.
template <class F>
void for_each_combination(int n, int k, F&& f) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

double delta_n(double n, double k, double k_prime, double gamma, double delta_e) {
  if (!(n > 0) || !(k > 0) || !(k_prime > 0) || !(gamma > 0) || !(delta_e > 0))
    throw UsageError("delta_n needs positive N, k, k', gamma and delta_e");
  if (!(delta_e < 1)) throw UsageError("delta_n needs delta_e < 1");
  const double log_n = std::log(n);
  const double denom = k * gamma * std::max(log_n, std::log(1.0 / delta_e));
  return log_n * (1.0 - std::exp(-k_prime / denom));
}

std::string to_string(EigenMode mode) { return mode == EigenMode::Exact ? "exact" : "interlacing"; }

EigenMode parse_eigen_mode(const std::string& s) {
  if (s == "exact") return EigenMode::Exact;
  if (s == "interlacing") return EigenMode::Interlacing;
  throw UsageError("unknown eigenvalue mode '" + s + "' (expected exact or interlacing)");
}

RatioBound gauss_ratio_bound(const Eigen::MatrixXd& corr, int k_prime, EigenMode mode) {
  const int d = static_cast<int>(corr.rows());
  if (corr.cols() != d || d == 0) throw UsageError("correlation matrix must be square and non-empty");
  if (k_prime < 1) throw UsageError("k' must be >= 1");
  if (2 * k_prime > d) throw UsageError("2k' exceeds the matrix dimension");

  RatioBound r;
  r.submatrix_size = 2 * k_prime;
  if (mode == EigenMode::Interlacing) {
    r.lambda_min = smallest_eigenvalue(corr);
  } else {
    const int s = r.submatrix_size;
    if (binomial(d, s) > kExactEnumerationCap)
      throw UsageError("exact mode would enumerate " + std::to_string(binomial(d, s)) +
                       " submatrices; use interlacing mode");
    double best = std::numeric_limits<double>::infinity();
    for_each_combination(d, s, [&](const std::vector<int>& idx) {
      best = std::min(best, smallest_eigenvalue(principal_submatrix(corr, idx)));
    });
    r.lambda_min = best;
  }
  if (!(r.lambda_min > 0)) throw NumericalError("correlation matrix is not positive definite");
  r.ratio_bound = 1.0 / (1.0 - std::exp(-r.lambda_min));
  return r;
}

BoundVerdict verify_bounds(const BoundReport& rep) {
  BoundVerdict v;
  auto fail = [&](const char* clause) {
    v.pass = false;
    v.failed.emplace_back(clause);
  };
  if (!(rep.gap >= -kBoundTolerance)) fail("lower bound");
  if (!(rep.gap <= rep.delta_e + rep.delta_n + kBoundTolerance)) fail("upper bound");
  if (rep.ratio) {
    if (!(*rep.ratio >= 1.0 - kBoundTolerance)) fail("ratio lower bound");
    if (rep.ratio_bound && !(*rep.ratio <= *rep.ratio_bound + kBoundTolerance)) fail("ratio upper bound");
  }
  return v;
}

BoundReport build_bound_report(const CovMatrix& cov, int target, const VarSet& true_mb,
                               const VarSet& grown, const BoundSettings& st) {
  const int d = cov.dim();
  BoundReport rep;
  rep.target = target;
  rep.k = static_cast<int>(true_mb.size());
  rep.k_prime = static_cast<int>(grown.size());
  rep.n = st.n;
  rep.gamma = st.gamma;
  rep.delta_e = st.delta_e;

  // Limits of the formula where k or k' vanish: k' = 0 gives 0, k = 0 with
  // k' > 0 drives the exponent to -infinity.
  if (rep.k_prime == 0)
    rep.delta_n = 0.0;
  else if (rep.k == 0)
    rep.delta_n = std::log(st.n);
  else
    rep.delta_n = delta_n(st.n, rep.k, rep.k_prime, st.gamma, st.delta_e);

  const double h_mb = gaussian_cond_entropy(cov, target, true_mb);
  const double h_plus = gaussian_cond_entropy(cov, target, grown);
  rep.gap = h_plus - h_mb;

  if (rep.k_prime == 0) return rep;
  const double full = 2.0 * std::numbers::pi * std::numbers::e * cov(target, target);
  const double a = full - std::exp(2.0 * h_mb);
  const double a_prime = full - std::exp(2.0 * h_plus);
  rep.a = a;
  rep.a_prime = a_prime;

  const double scale_tol = 1e-12 * full;
  if (std::abs(a_prime) <= scale_tol) {
    if (std::abs(a) > scale_tol) rep.ratio = std::numeric_limits<double>::infinity();
  } else {
    rep.ratio = a / a_prime;
  }

  // When 2k' exceeds d the only candidate is C itself, which is what the
  // interlacing mode returns.
  const Eigen::MatrixXd corr = correlation_matrix(cov);
  EigenMode mode = st.mode;
  int kp = rep.k_prime;
  if (2 * kp > d) {
    mode = EigenMode::Interlacing;
    kp = 1;
  } else if (mode == EigenMode::Exact && binomial(d, 2 * kp) > kExactEnumerationCap) {
    mode = EigenMode::Interlacing;
  }
  const RatioBound rb = gauss_ratio_bound(corr, kp, mode);
  rep.lambda_min = rb.lambda_min;
  rep.ratio_bound = rb.ratio_bound;
  return rep;
}

}  // namespace fansmb
