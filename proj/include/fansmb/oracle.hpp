#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fansmb/gauss_entropy.hpp"
#include "fansmb/graph.hpp"
#include "fansmb/greedy_mb.hpp"

namespace fansmb {

// Largest d for which subset enumeration is allowed.
inline constexpr int kMaxOracleDim = 8;

// A random linear-Gaussian SEM with unit noise and its exact covariance.
struct GaussianSem {
  Dag dag;
  CovMatrix cov;
};

GaussianSem random_gaussian_sem(int d, double avg_degree, std::uint64_t seed);

// Smallest conditioning set attaining min_S H(target | S) over all subsets of
// the other variables, within `tol`. Ties in size go to the lexicographically
// first set.
VarSet brute_force_mb(const CovMatrix& cov, int target, double tol = 1e-9);

struct MinimizerCheck {
  double mb_entropy = 0.0;        // H(T | MB)
  double min_entropy = 0.0;       // min over all subsets
  double max_superset_dev = 0.0;  // max |H(T | S) - H(T | MB)| over S containing MB
  bool pass = false;              // MB attains the minimum and supersets match, both within tol
};

MinimizerCheck check_mb_minimizes(const CovMatrix& cov, int target, const VarSet& mb, double tol = 1e-9);

struct OracleCheckConfig {
  int d = 6;
  int trials = 50;
  double avg_degree = 2.0;
  std::uint64_t seed = 0;
  SearchConfig search;  // thresholds are tiny by default, see defaults()

  static OracleCheckConfig defaults();
};

struct OracleCheckResult {
  int instances = 0;           // trials * d
  int exact = 0;               // discovered MB == true MB
  int brute_force_agrees = 0;  // brute-force minimizer == true MB
  std::vector<std::string> mismatches;

  double recovery_rate() const { return instances ? static_cast<double>(exact) / instances : 1.0; }
};

// Runs discover_all with exact Gaussian scoring on `trials` random SEMs and
// compares against the true MBs and the enumeration oracle. Refuses d > 8.
OracleCheckResult run_oracle_check(const OracleCheckConfig& cfg, int workers = 1);

}  // namespace fansmb
