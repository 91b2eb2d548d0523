#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fansmb/dataset.hpp"
#include "fansmb/error.hpp"
#include "fansmb/gauss_entropy.hpp"
#include "fansmb/oracle.hpp"
#include "helpers.hpp"

using namespace fansmb;

namespace {

const double kHalfLog2PiE = 0.5 * (1.0 + std::log(2.0 * std::numbers::pi));

std::vector<VarSet> all_subsets_without(int d, int skip) {
  std::vector<VarSet> out;
  for (unsigned b = 0; b < (1u << d); ++b) {
    if (b & (1u << skip)) continue;
    VarSet s;
    for (int i = 0; i < d; ++i)
      if (b & (1u << i)) s.insert(i);
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("sample covariance examples") {
  Eigen::MatrixXd x(2, 2);
  x << 0, 0, 2, 2;
  const CovMatrix c = sample_covariance(make_dataset(x));
  CHECK(c.matrix() == (Eigen::MatrixXd(2, 2) << 2, 2, 2, 2).finished());

  Eigen::MatrixXd y(3, 2);
  y << 1, 5, 2, 5, 4, 5;
  const CovMatrix k = sample_covariance(make_dataset(y));
  CHECK(k(1, 1) == 0.0);
  CHECK(k(0, 1) == 0.0);
}

TEST_CASE("logdet examples and jitter policy") {
  CHECK(logdet_psd(Eigen::MatrixXd::Identity(7, 7)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(logdet_psd(Eigen::MatrixXd::Constant(1, 1, 4.0)) == doctest::Approx(std::log(4.0)).epsilon(1e-14));
  Eigen::MatrixXd m(2, 2);
  m << 1, 0.5, 0.5, 1;
  CHECK(logdet_psd(m) == doctest::Approx(std::log(0.75)).epsilon(1e-14));

  // Collinear but PSD: the single jitter retry rescues it.
  Eigen::MatrixXd ones = Eigen::MatrixXd::Constant(2, 2, 1.0);
  CHECK(std::isfinite(logdet_psd(ones)));
  Eigen::MatrixXd neg(2, 2);
  neg << 1, 2, 2, 1;
  CHECK_THROWS_AS(logdet_psd(neg), SingularMatrixError);
}

TEST_CASE("conditional entropy examples") {
  const CovMatrix id(Eigen::MatrixXd::Identity(4, 4));
  for (const VarSet& s : all_subsets_without(4, 2))
    CHECK(gaussian_cond_entropy(id, 2, s) == doctest::Approx(kHalfLog2PiE).epsilon(1e-14));
  CHECK(kStdNormalEntropy == doctest::Approx(1.41894).epsilon(1e-5));

  Eigen::MatrixXd s2(2, 2);
  s2 << 4, 0, 0, 1;
  CHECK(gaussian_cond_entropy(CovMatrix(s2), 0, {}) == doctest::Approx(2.11209).epsilon(1e-5));

  CHECK_THROWS_AS(gaussian_cond_entropy(id, 0, {0}), UsageError);
  CHECK_THROWS_AS(gaussian_cond_entropy(id, 4, {}), UsageError);
}

TEST_CASE("correlated pair against a Monte-Carlo differential entropy") {
  Eigen::MatrixXd s(2, 2);
  s << 1, 0.8, 0.8, 1;
  const double h = gaussian_cond_entropy(CovMatrix(s), 0, {1});
  CHECK(h == doctest::Approx(kHalfLog2PiE + 0.5 * std::log(0.36)).epsilon(1e-12));

  // -E[log p(x0 | x1)] estimated from 1e6 joint draws; the conditional density
  // is written out from the bivariate normal directly.
  Rng rng(42);
  std::normal_distribution<double> z;
  double acc = 0;
  const int n = 1000000;
  const double cond_var = 1 - 0.8 * 0.8;
  for (int i = 0; i < n; ++i) {
    const double x1 = z(rng);
    const double x0 = 0.8 * x1 + std::sqrt(cond_var) * z(rng);
    const double r = x0 - 0.8 * x1;
    acc += 0.5 * std::log(2 * std::numbers::pi * cond_var) + r * r / (2 * cond_var);
  }
  CHECK(std::abs(acc / n - h) < 1e-2);
  CHECK(h == doctest::Approx(0.90811).epsilon(1e-4));
}

TEST_CASE("property: information never hurts (exhaustive, d <= 6)") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 5);
    const GaussianSem sem = random_gaussian_sem(d, std::min(1.5, d - 1.0), rng());
    for (int t = 0; t < d; ++t) {
      const auto subsets = all_subsets_without(d, t);
      for (const VarSet& a : subsets)
        for (const VarSet& b : subsets)
          if (std::includes(b.begin(), b.end(), a.begin(), a.end()))
            CHECK(gaussian_cond_entropy(sem.cov, t, b) <= gaussian_cond_entropy(sem.cov, t, a) + 1e-9);
    }
  }
}

TEST_CASE("property: the true MB minimizes H(T|S) and supersets tie") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 5);
    const GaussianSem sem = random_gaussian_sem(d, std::min(2.0, d - 1.0), rng());
    for (int t = 0; t < d; ++t) {
      const VarSet mb = markov_boundary_of(sem.dag, t);
      const double h_mb = gaussian_cond_entropy(sem.cov, t, mb);
      for (const VarSet& s : all_subsets_without(d, t)) {
        const double h = gaussian_cond_entropy(sem.cov, t, s);
        CHECK(h >= h_mb - 1e-9);
        if (std::includes(s.begin(), s.end(), mb.begin(), mb.end())) CHECK(std::abs(h - h_mb) <= 1e-9);
      }
    }
  }
}

TEST_CASE("property: permutation equivariance") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 5;
    const GaussianSem sem = random_gaussian_sem(d, 2.0, rng());
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    // New variable perm[i] is old variable i.
    Eigen::MatrixXd p(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) p(perm[i], perm[j]) = sem.cov(i, j);
    const CovMatrix permuted(p);
    for (int t = 0; t < d; ++t) {
      const VarSet s = test::random_subset(d, rng, false);
      if (s.contains(t)) continue;
      VarSet ps;
      for (int v : s) ps.insert(perm[v]);
      CHECK(gaussian_cond_entropy(permuted, perm[t], ps) ==
            doctest::Approx(gaussian_cond_entropy(sem.cov, t, s)).epsilon(1e-10));
    }
  }
}

TEST_CASE("covariance matrices are symmetric and PSD") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const GaussianSem sem = random_gaussian_sem(6, 2.0, rng());
    const Eigen::MatrixXd& m = sem.cov.matrix();
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * m.cwiseAbs().maxCoeff());
    CHECK(std::isfinite(logdet_psd(m)));
    const Eigen::MatrixXd c = correlation_matrix(sem.cov);
    for (int i = 0; i < 6; ++i) CHECK(c(i, i) == doctest::Approx(1.0));
  }
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.5, 0.2, 1;
  CHECK_THROWS_AS(CovMatrix{asym}, UsageError);
}
