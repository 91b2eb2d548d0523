#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "fansmb/gauss_entropy.hpp"
#include "fansmb/graph.hpp"

namespace fansmb {

// log N * (1 - exp(-k' / (k * gamma * max(log N, log(1/delta_e))))), natural logs.
double delta_n(double n, double k, double k_prime, double gamma, double delta_e);

enum class EigenMode { Exact, Interlacing };

std::string to_string(EigenMode mode);
EigenMode parse_eigen_mode(const std::string& s);

// Exact mode refuses to enumerate more principal submatrices than this.
inline constexpr double kExactEnumerationCap = 1e5;

struct RatioBound {
  double lambda_min = 0.0;
  double ratio_bound = 0.0;  // 1 / (1 - exp(-lambda_min))
  int submatrix_size = 0;
};

// Smallest eigenvalue over all 2k' x 2k' principal submatrices of the
// correlation matrix C (exact), or lambda_min(C) itself (interlacing, a lower
// bound for every principal submatrix).
RatioBound gauss_ratio_bound(const Eigen::MatrixXd& corr, int k_prime, EigenMode mode);

struct BoundReport {
  int target = -1;
  int k = 0;        // |true MB|
  int k_prime = 0;  // |MB+|
  double n = 0.0;
  double gamma = 1.0;
  double delta_e = 0.01;
  double delta_n = 0.0;
  double gap = 0.0;  // H(T | MB+) - H(T | MB)
  // Linear-Gaussian extras; absent when undefined (empty MB+, or A = A' = 0).
  std::optional<double> a, a_prime, ratio, lambda_min, ratio_bound;
};

struct BoundVerdict {
  bool pass = true;
  std::vector<std::string> failed;  // "lower bound", "upper bound", "ratio lower bound", "ratio upper bound"
};

inline constexpr double kBoundTolerance = 1e-9;

BoundVerdict verify_bounds(const BoundReport& report);

struct BoundSettings {
  double n = 1000.0;
  double gamma = 1.0;
  double delta_e = 0.01;
  EigenMode mode = EigenMode::Exact;
};

// Fills a report from Gaussian entropies on `cov`. When exact mode would
// exceed the enumeration cap the report falls back to interlacing.
BoundReport build_bound_report(const CovMatrix& cov, int target, const VarSet& true_mb,
                               const VarSet& grown, const BoundSettings& settings);

}  // namespace fansmb
