#include <cmath>

#include "fansmb/dataset.hpp"
#include "fansmb/error.hpp"
#include "fansmb/gauss_entropy.hpp"
#include "fansmb/synth.hpp"
#include "helpers.hpp"

using namespace fansmb;

namespace {

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("ER DAG edge count concentrates on d(d-1)/2 * p") {
  double total = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) total += static_cast<double>(sample_er_dag(30, 1.0, s).edge_count());
  CHECK(std::abs(total / 1000 - 15.0) <= 1.5);
}

TEST_CASE("ER DAG: tiny degree is edgeless, same seed same DAG") {
  int edgeless = 0;
  for (std::uint64_t s = 0; s < 100; ++s) edgeless += sample_er_dag(10, 1e-9, s).edge_count() == 0;
  CHECK(edgeless == 100);
  CHECK(sample_er_dag(20, 2.0, 7).edges() == sample_er_dag(20, 2.0, 7).edges());
  CHECK(sample_er_dag(20, 2.0, 7).edges() != sample_er_dag(20, 2.0, 8).edges());
}

TEST_CASE("SEM weights: magnitude range and sign balance") {
  CHECK(sample_sem_weights(Dag(4), 1).empty());
  // A complete DAG on 142 nodes has 10011 edges.
  const Dag full = sample_er_dag(142, 141.0, 5);
  REQUIRE(full.edge_count() == 10011);
  const EdgeWeights w = sample_sem_weights(full, 5);
  int negative = 0;
  for (const auto& [e, v] : w) {
    CHECK(std::abs(v) >= 0.5);
    CHECK(std::abs(v) <= 2.0);
    negative += v < 0;
  }
  const double frac = static_cast<double>(negative) / static_cast<double>(w.size());
  CHECK(frac >= 0.47);
  CHECK(frac <= 0.53);
}

TEST_CASE("linear SEM examples") {
  const NoiseSpec gauss = NoiseSpec::standard(NoiseFamily::Gaussian);
  SUBCASE("edgeless gives iid standard normals") {
    const Dag dag(4);
    const Dataset ds = simulate_linear_sem(dag, {}, 10000, gauss, 1);
    CHECK(max_abs_diff(sample_covariance(ds).matrix(), Eigen::MatrixXd::Identity(4, 4)) < 0.1);
  }
  SUBCASE("single unit edge doubles the child's variance") {
    const Dag dag(2, {{0, 1}});
    const Dataset ds = simulate_linear_sem(dag, {{{0, 1}, 1.0}}, 10000, gauss, 2);
    CHECK(std::abs(sample_covariance(ds)(1, 1) - 2.0) < 0.1);
  }
  SUBCASE("bit-identical under the same seed") {
    const Dag dag = sample_er_dag(6, 2.0, 3);
    const EdgeWeights w = sample_sem_weights(dag, 3);
    CHECK(simulate_linear_sem(dag, w, 200, gauss, 9).data == simulate_linear_sem(dag, w, 200, gauss, 9).data);
  }
}

TEST_CASE("analytic covariance examples") {
  CHECK(max_abs_diff(analytic_covariance(Dag(3), {}, {1, 1, 1}), Eigen::MatrixXd::Identity(3, 3)) == 0.0);
  Eigen::MatrixXd expect(2, 2);
  expect << 1, 1, 1, 2;
  CHECK(max_abs_diff(analytic_covariance(Dag(2, {{0, 1}}), {{{0, 1}, 1.0}}, {1, 1}), expect) < 1e-12);
}

TEST_CASE("sample covariance converges to the analytic one") {
  const Dag dag = sample_er_dag(5, 2.0, 21);
  const EdgeWeights w = sample_sem_weights(dag, 21);
  const Eigen::MatrixXd truth = analytic_covariance(dag, w, std::vector<double>(5, 1.0));
  const NoiseSpec gauss = NoiseSpec::standard(NoiseFamily::Gaussian);
  const double small = max_abs_diff(sample_covariance(simulate_linear_sem(dag, w, 1000, gauss, 4)).matrix(), truth);
  const double large = max_abs_diff(sample_covariance(simulate_linear_sem(dag, w, 100000, gauss, 4)).matrix(), truth);
  CHECK(large < 0.05 * std::max(1.0, truth.cwiseAbs().maxCoeff()));
  CHECK(large < small);
}

TEST_CASE("noise families: parameters and moments") {
  for (NoiseFamily f : {NoiseFamily::Gaussian, NoiseFamily::Uniform, NoiseFamily::Laplace, NoiseFamily::Gumbel,
                        NoiseFamily::Exponential}) {
    CHECK(parse_noise_family(to_string(f)) == f);
    Rng rng(1);
    double sum = 0;
    for (int i = 0; i < 20000; ++i) {
      const double x = sample_noise(NoiseSpec::standard(f), rng);
      REQUIRE(std::isfinite(x));
      sum += x;
    }
    // Means: 0, 0, 0, Euler-Mascheroni, 1.
    const double mean = f == NoiseFamily::Gumbel ? 0.5772156649 : f == NoiseFamily::Exponential ? 1.0 : 0.0;
    CHECK(std::abs(sum / 20000 - mean) < 0.05);
  }
  CHECK_THROWS_AS(parse_noise_family("cauchy"), UsageError);
  Rng rng(2);
  CHECK_THROWS_AS(sample_noise({NoiseFamily::Gaussian, 0.0, 0.0}, rng), UsageError);
}

TEST_CASE("mixed noise draws from the five families with unit parameters") {
  const auto specs = mixed_noise_specs(400, 3);
  std::set<NoiseFamily> seen;
  for (const auto& s : specs) {
    seen.insert(s.family);
    CHECK(s.scale == 1.0);
  }
  CHECK(seen.size() == 5);
}

TEST_CASE("GP functions: consistency at repeated inputs and unit prior variance") {
  Rng rng(8);
  Eigen::MatrixXd in(6, 1);
  in << 0.3, -1.0, 0.3, 2.0, 5.0, -1.0;
  const Eigen::VectorXd f = sample_gp_function(in, rng);
  CHECK(std::abs(f(0) - f(2)) < 1e-5);
  CHECK(std::abs(f(1) - f(5)) < 1e-5);

  // Inputs spread over [-50, 50] give many nearly independent points per draw.
  double second_moment = 0;
  const int draws = 10, n = 2000;
  for (int k = 0; k < draws; ++k) {
    const Eigen::MatrixXd x = Eigen::VectorXd::LinSpaced(n, -50.0, 50.0);
    second_moment += sample_gp_function(x, rng).squaredNorm() / n;
  }
  second_moment /= draws;
  CHECK(second_moment >= 0.8);
  CHECK(second_moment <= 1.2);
}

TEST_CASE("GP SEM: roots are pure noise, output finite and deterministic") {
  const Dag dag(3, {{0, 2}, {1, 2}});
  std::vector<NoiseSpec> noise(3, NoiseSpec::standard(NoiseFamily::Gaussian));
  const Dataset a = simulate_gp_sem(dag, 1000, noise, 6);
  const Dataset b = simulate_gp_sem(dag, 1000, noise, 6);
  CHECK(a.data == b.data);
  CHECK(a.data.allFinite());
  for (int root : {0, 1}) {
    const Eigen::VectorXd c = a.data.col(root);
    const double mean = c.mean();
    const double var = (c.array() - mean).square().sum() / (c.size() - 1);
    CHECK(std::abs(mean) < 0.15);
    CHECK(std::abs(var - 1.0) < 0.15);
  }
  // The child carries the extra GP signal.
  const Eigen::VectorXd child = a.data.col(2);
  CHECK((child.array() - child.mean()).square().sum() / 999 > 1.2);
}

TEST_CASE("generated datasets are finite for every noise setting") {
  const Dag dag = sample_er_dag(6, 2.0, 1);
  const auto mixed = mixed_noise_specs(6, 1);
  CHECK(simulate_gp_sem(dag, 300, mixed, 1).data.allFinite());
  const EdgeWeights w = sample_sem_weights(dag, 1);
  for (NoiseFamily f : {NoiseFamily::Uniform, NoiseFamily::Laplace, NoiseFamily::Gumbel, NoiseFamily::Exponential})
    CHECK(simulate_linear_sem(dag, w, 300, NoiseSpec::standard(f), 1).data.allFinite());
}

TEST_CASE("standardize: zero mean, unit std, explicit only") {
  const Dag dag = sample_er_dag(4, 1.5, 2);
  const Dataset raw = simulate_linear_sem(dag, sample_sem_weights(dag, 2), 500,
                                          NoiseSpec::standard(NoiseFamily::Laplace), 2);
  CHECK_FALSE(raw.standardized);
  const Dataset z = standardize(raw);
  CHECK(z.standardized);
  for (int j = 0; j < z.dim(); ++j) {
    const Eigen::VectorXd c = z.data.col(j);
    CHECK(std::abs(c.mean()) < 1e-8);
    CHECK(std::abs(std::sqrt(c.squaredNorm() / (c.size() - 1)) - 1.0) < 1e-8);
  }
  for (int j = 0; j < z.dim(); ++j) CHECK(std::abs(sample_covariance(z)(j, j) - 1.0) < 1e-8);
}

TEST_CASE("dataset csv round trip is exact and byte-stable") {
  const auto dir = test::scratch("dataset_io");
  const Dag dag = sample_er_dag(5, 2.0, 4);
  Dataset ds = simulate_linear_sem(dag, sample_sem_weights(dag, 4), 50, NoiseSpec::standard(NoiseFamily::Gaussian), 4);
  write_dataset_csv(dir / "a.csv", ds);
  const Dataset back = read_dataset_csv(dir / "a.csv");
  CHECK(back.names == ds.names);
  CHECK(back.data == ds.data);
  write_dataset_csv(dir / "b.csv", back);
  CHECK(test::slurp(dir / "a.csv") == test::slurp(dir / "b.csv"));

  std::ofstream(dir / "ragged.csv") << "a,b\n1,2\n3\n";
  CHECK_THROWS_AS(read_dataset_csv(dir / "ragged.csv"), IoError);
}
