#include <cmath>
#include <set>

#include "fansmb/ce_estimator.hpp"
#include "fansmb/error.hpp"
#include "fansmb/flow.hpp"
#include "fansmb/gauss_entropy.hpp"
#include "fansmb/trainer.hpp"
#include "helpers.hpp"

using namespace fansmb;

namespace {

// Chain 0 -> 1 -> 2 plus an unrelated node 3, unit weights, Gaussian noise.
struct ChainFixture {
  Dag dag{4, {{0, 1}, {1, 2}}};
  EdgeWeights w{{{0, 1}, 1.0}, {{1, 2}, 1.0}};
  Dataset data;
  FansModel model;
  CovMatrix cov;

  explicit ChainFixture(std::uint64_t seed, int epochs = 300)
      : data(simulate_linear_sem(dag, w, 1000, NoiseSpec::standard(NoiseFamily::Gaussian), seed)),
        model(FansModel::initialized(FansConfig::defaults_for(4), seed)),
        cov(analytic_covariance(dag, w, {1, 1, 1, 1})) {
    TrainConfig tc = TrainConfig::defaults_for(4);
    tc.epochs = epochs;
    tc.early_stop = false;
    tc.learning_rate = 3e-3;
    tc.seed = seed;
    train(model, data, tc);
  }
};

double variance(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("evaluation indices") {
  const auto a = draw_evaluation_indices(100, 40, 3);
  CHECK(a == draw_evaluation_indices(100, 40, 3));
  CHECK(a != draw_evaluation_indices(100, 40, 4));
  CHECK(std::set<int>(a.begin(), a.end()).size() == 40);
  const auto all = draw_evaluation_indices(50, 50, 1);
  CHECK(std::set<int>(all.begin(), all.end()).size() == 50);
  const auto over = draw_evaluation_indices(10, 200, 1);
  CHECK(over.size() == 200);
  for (int i : over) CHECK((i >= 0 && i < 10));
  CHECK_THROWS_AS(draw_evaluation_indices(10, 0, 1), UsageError);
}

TEST_CASE("estimator contracts on an untrained model") {
  Rng rng(1);
  const FansConfig cfg = FansConfig::defaults_for(4);
  const FansModel m = FansModel::initialized(cfg, 2);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(300, 4);
  for (int i = 0; i < 300; ++i)
    for (int j = 0; j < 4; ++j) x(i, j) = nd(rng);
  const Dataset ds = make_dataset(x);

  SUBCASE("deterministic for K = N and a fixed seed") {
    const auto a = estimate_cond_entropy(m, ds, 0, {1, 2}, 300, 9);
    const auto b = estimate_cond_entropy(m, ds, 0, {1, 2}, 300, 9);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    CHECK(a.std_error >= 0.0);
    CHECK(a.samples == 300);
  }
  SUBCASE("batch scoring: empty list, single candidate, overlap") {
    CHECK(batch_candidate_scores(m, ds, 0, {1}, {}, 100, 5).empty());
    const auto one = batch_candidate_scores(m, ds, 0, {1}, {3}, 100, 5);
    REQUIRE(one.size() == 1);
    CHECK(one.at(3).value == estimate_cond_entropy(m, ds, 0, {1, 3}, 100, 5).value);
    CHECK_THROWS_AS(batch_candidate_scores(m, ds, 0, {1}, {1}, 100, 5), UsageError);
    CHECK_THROWS_AS(batch_candidate_scores(m, ds, 0, {1}, {0}, 100, 5), UsageError);
  }
  SUBCASE("per-sample difference equals the difference of the two means") {
    for (EntropyForm form : {EntropyForm::LogDet, EntropyForm::Likelihood}) {
      const FansScorer scorer(m, ds, 200, 4, form);
      const VarSet s{1, 3};
      const SubsetFlow fs(m, s), fts(m, VarSet{0, 1, 3});
      const Eigen::MatrixXd& xs = scorer.evaluation_sample();
      const bool ld = form == EntropyForm::LogDet;
      const double mean_s = ld ? fs.forward(xs).log_det.mean() : fs.log_likelihood(xs).mean();
      const double mean_ts = ld ? fts.forward(xs).log_det.mean() : fts.log_likelihood(xs).mean();
      const double two_means = mean_s - mean_ts + (ld ? kStdNormalEntropy : 0.0);
      CHECK(scorer.estimate(0, s).value == doctest::Approx(two_means).epsilon(1e-12));
    }
  }
  SUBCASE("scorer caching and validation") {
    const FansScorer scorer(m, ds, 64, 1);
    CHECK(scorer.kind() == "fans");
    CHECK(scorer.max_subset() == cfg.max_subset);
    const double first = scorer.entropy(2, {0});
    const std::size_t cached = scorer.cache_size();
    CHECK(scorer.entropy(2, {0}) == first);
    CHECK(scorer.cache_size() == cached);
    CHECK_THROWS_AS(scorer.entropy(2, {2}), UsageError);
    CHECK_THROWS_AS(scorer.entropy(4, {}), UsageError);
    CHECK_THROWS_AS(FansScorer(m, make_dataset(Eigen::MatrixXd::Zero(5, 3)), 5, 1), UsageError);
    CHECK(parse_entropy_form(to_string(EntropyForm::Likelihood)) == EntropyForm::Likelihood);
    CHECK_THROWS_AS(parse_entropy_form("bogus"), UsageError);
  }
  SUBCASE("compact models refuse subsets above M") {
    FansConfig c = FansConfig::defaults_for(6);
    c.compact = true;
    c.max_subset = 3;
    const FansModel cm = FansModel::initialized(c, 1);
    const Dataset d6 = make_dataset(Eigen::MatrixXd::Random(50, 6));
    const FansScorer scorer(cm, d6, 20, 1);
    CHECK(std::isfinite(scorer.entropy(0, {1, 2})));
    CHECK_THROWS_AS(scorer.entropy(0, {1, 2, 3}), UsageError);
  }
}

TEST_CASE("trained chain: true member beats the unrelated variable, estimates track the oracle") {
  double true_sum = 0, noise_sum = 0;
  double worst_gap = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ChainFixture fx(seed);
    const auto scores = batch_candidate_scores(fx.model, fx.data, 1, {}, {0, 3}, 1000, seed,
                                               EntropyForm::Likelihood);
    true_sum += scores.at(0).value;
    noise_sum += scores.at(3).value;
    for (int c : {0, 3})
      worst_gap = std::max(worst_gap, std::abs(scores.at(c).value - gaussian_cond_entropy(fx.cov, 1, {c})));
  }
  // Oracle ordering first, then the flow's.
  const ChainFixture probe(0, 0);
  REQUIRE(gaussian_cond_entropy(probe.cov, 1, {0}) < gaussian_cond_entropy(probe.cov, 1, {3}));
  CHECK(true_sum / 5 <= noise_sum / 5);
  CHECK(worst_gap < 0.1);
}

TEST_CASE("shared evaluation samples reduce the variance of score differences") {
  const ChainFixture fx(7, 150);
  std::vector<double> paired, independent;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto both = batch_candidate_scores(fx.model, fx.data, 2, {}, {1, 3}, 100, s);
    paired.push_back(both.at(1).value - both.at(3).value);
    const double a = estimate_cond_entropy(fx.model, fx.data, 2, {1}, 100, 1000 + s).value;
    const double b = estimate_cond_entropy(fx.model, fx.data, 2, {3}, 100, 2000 + s).value;
    independent.push_back(a - b);
  }
  CHECK(variance(paired) < variance(independent));
}
