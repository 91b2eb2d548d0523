#include "fansmb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fansmb/error.hpp"
#include "fansmb/synth.hpp"

namespace fansmb {

namespace {

std::vector<int> others(int d, int target) {
  std::vector<int> v;
  for (int i = 0; i < d; ++i)
    if (i != target) v.push_back(i);
  return v;
}

VarSet subset_of(const std::vector<int>& pool, unsigned bits) {
  VarSet s;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (bits & (1u << i)) s.insert(pool[i]);
  return s;
}

void check_dim(int d) {
  if (d > kMaxOracleDim)
    throw UsageError("subset enumeration is limited to d <= " + std::to_string(kMaxOracleDim) + " (got d=" +
                     std::to_string(d) + "); 2^(d-1) subsets per target");
}

std::string describe(const VarSet& s) {
  std::ostringstream o;
  o << '{';
  bool first = true;
  for (int v : s) {
    o << (first ? "" : ",") << v;
    first = false;
  }
  o << '}';
  return o.str();
}

}  // namespace

GaussianSem random_gaussian_sem(int d, double avg_degree, std::uint64_t seed) {
  Dag dag = d >= 2 ? sample_er_dag(d, avg_degree, seed) : Dag(d);
  EdgeWeights w = sample_sem_weights(dag, seed);
  CovMatrix cov(analytic_covariance(dag, w, std::vector<double>(d, 1.0)));
  return {dag.with_weights(std::move(w)), std::move(cov)};
}

VarSet brute_force_mb(const CovMatrix& cov, int target, double tol) {
  const int d = cov.dim();
  check_dim(d);
  const auto pool = others(d, target);
  const unsigned count = 1u << pool.size();
  std::vector<double> h(count);
  double best = std::numeric_limits<double>::infinity();
  for (unsigned b = 0; b < count; ++b) {
    h[b] = gaussian_cond_entropy(cov, target, subset_of(pool, b));
    best = std::min(best, h[b]);
  }
  VarSet answer;
  bool found = false;
  for (unsigned b = 0; b < count; ++b) {
    if (h[b] > best + tol) continue;
    VarSet s = subset_of(pool, b);
    if (!found || s.size() < answer.size() || (s.size() == answer.size() && s < answer)) {
      answer = std::move(s);
      found = true;
    }
  }
  return answer;
}

MinimizerCheck check_mb_minimizes(const CovMatrix& cov, int target, const VarSet& mb, double tol) {
  const int d = cov.dim();
  check_dim(d);
  MinimizerCheck c;
  c.mb_entropy = gaussian_cond_entropy(cov, target, mb);
  c.min_entropy = std::numeric_limits<double>::infinity();
  const auto pool = others(d, target);
  for (unsigned b = 0; b < (1u << pool.size()); ++b) {
    const VarSet s = subset_of(pool, b);
    const double h = gaussian_cond_entropy(cov, target, s);
    c.min_entropy = std::min(c.min_entropy, h);
    if (std::includes(s.begin(), s.end(), mb.begin(), mb.end()))
      c.max_superset_dev = std::max(c.max_superset_dev, std::abs(h - c.mb_entropy));
  }
  c.pass = c.mb_entropy <= c.min_entropy + tol && c.max_superset_dev <= tol;
  return c;
}

OracleCheckConfig OracleCheckConfig::defaults() {
  OracleCheckConfig c;
  c.search.eps_grow = 1e-6;
  c.search.eps_shrink = 1e-6;
  return c;
}

OracleCheckResult run_oracle_check(const OracleCheckConfig& cfg, int workers) {
  check_dim(cfg.d);
  if (cfg.d < 1) throw UsageError("d must be >= 1");
  if (cfg.trials < 1) throw UsageError("trials must be >= 1");
  const double degree = std::min(cfg.avg_degree, static_cast<double>(std::max(1, cfg.d - 1)));

  OracleCheckResult r;
  for (int t = 0; t < cfg.trials; ++t) {
    const GaussianSem sem = random_gaussian_sem(cfg.d, degree, derive_seed(cfg.seed, "trial", t));
    const GaussianScorer scorer(sem.cov);
    const Discovery found = discover_all(scorer, cfg.search, workers);
    for (int v = 0; v < cfg.d; ++v) {
      ++r.instances;
      const VarSet truth = markov_boundary_of(sem.dag, v);
      const auto& list = found.mb.at(v);
      const VarSet got(list.begin(), list.end());
      const VarSet brute = brute_force_mb(sem.cov, v);
      if (brute == truth) ++r.brute_force_agrees;
      if (got == truth) {
        ++r.exact;
      } else {
        r.mismatches.push_back("trial " + std::to_string(t) + " target " + std::to_string(v) + ": found " +
                               describe(got) + ", true " + describe(truth) + ", enumeration " + describe(brute));
      }
    }
  }
  return r;
}

}  // namespace fansmb
