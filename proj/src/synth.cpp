#include "fansmb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "fansmb/error.hpp"

namespace fansmb {

std::string to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::Gaussian: return "gaussian";
    case NoiseFamily::Uniform: return "uniform";
    case NoiseFamily::Laplace: return "laplace";
    case NoiseFamily::Gumbel: return "gumbel";
    case NoiseFamily::Exponential: return "exponential";
  }
  return "unknown";
}

NoiseFamily parse_noise_family(const std::string& name) {
  for (auto f : {NoiseFamily::Gaussian, NoiseFamily::Uniform, NoiseFamily::Laplace,
                 NoiseFamily::Gumbel, NoiseFamily::Exponential})
    if (to_string(f) == name) return f;
  throw UsageError("unknown noise family '" + name + "'");
}

double sample_noise(const NoiseSpec& spec, Rng& rng) {
  if (!(spec.scale > 0.0)) throw UsageError("noise scale must be positive");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (spec.family) {
    case NoiseFamily::Gaussian:
      return std::normal_distribution<double>(spec.loc, spec.scale)(rng);
    case NoiseFamily::Uniform:
      return std::uniform_real_distribution<double>(spec.loc - spec.scale, spec.loc + spec.scale)(rng);
    case NoiseFamily::Laplace: {
      double u = unit(rng) - 0.5;
      double mag = -std::log1p(-2.0 * std::abs(u));
      return spec.loc + (u < 0 ? -1.0 : 1.0) * spec.scale * mag;
    }
    case NoiseFamily::Gumbel: {
      double u = unit(rng);
      while (u <= 0.0) u = unit(rng);
      return spec.loc - spec.scale * std::log(-std::log(u));
    }
    case NoiseFamily::Exponential:
      return spec.loc + std::exponential_distribution<double>(1.0 / spec.scale)(rng);
  }
  return 0.0;
}

std::vector<NoiseSpec> mixed_noise_specs(int d, std::uint64_t seed) {
  Rng rng = make_rng(seed, "noisefamily");
  std::uniform_int_distribution<int> pick(0, 4);
  std::vector<NoiseSpec> specs;
  specs.reserve(d);
  for (int i = 0; i < d; ++i) specs.push_back(NoiseSpec::standard(static_cast<NoiseFamily>(pick(rng))));
  return specs;
}

Dag sample_er_dag(int d, double avg_degree, std::uint64_t seed) {
  if (d < 2) throw UsageError("ER DAG needs d >= 2");
  if (!(avg_degree > 0.0) || avg_degree > d - 1)
    throw UsageError("average degree must lie in (0, d-1]");
  Rng rng = make_rng(seed, "dag");
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const double p = avg_degree / (d - 1);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b)
      if (coin(rng)) edges.push_back({perm[a], perm[b]});
  return Dag(d, edges);
}

EdgeWeights sample_sem_weights(const Dag& dag, std::uint64_t seed) {
  Rng rng = make_rng(seed, "weights");
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::bernoulli_distribution negative(0.5);
  EdgeWeights w;
  for (const Edge& e : dag.edges()) {
    double m = mag(rng);
    w[e] = negative(rng) ? -m : m;
  }
  return w;
}

Dataset simulate_linear_sem(const Dag& dag, const EdgeWeights& weights, int n,
                            const NoiseSpec& noise, std::uint64_t seed) {
  if (n < 1) throw UsageError("sample count must be >= 1");
  for (const Edge& e : dag.edges())
    if (!weights.contains(e))
      throw UsageError("missing weight for edge " + std::to_string(e.parent) + "->" +
                       std::to_string(e.child));
  const int d = dag.size();
  Eigen::MatrixXd x(n, d);
  Rng rng = make_rng(seed, "datagen");
  for (int v : dag.topological_order()) {
    for (int r = 0; r < n; ++r) x(r, v) = sample_noise(noise, rng);
    for (int p : dag.parents(v)) x.col(v) += weights.at({p, v}) * x.col(p);
  }
  return make_dataset(std::move(x));
}

Eigen::VectorXd sample_gp_function(const Eigen::MatrixXd& inputs, Rng& rng) {
  // Identical inputs must map to identical values, so the draw is made at the
  // distinct rows only (first-occurrence order) and scattered back.
  const Eigen::Index n = inputs.rows();
  std::map<std::vector<double>, Eigen::Index> seen;
  std::vector<Eigen::Index> slot(n);
  std::vector<Eigen::Index> uniq;
  for (Eigen::Index r = 0; r < n; ++r) {
    std::vector<double> key(static_cast<std::size_t>(inputs.cols()));
    for (Eigen::Index c = 0; c < inputs.cols(); ++c) key[c] = inputs(r, c);
    auto [it, fresh] = seen.emplace(std::move(key), static_cast<Eigen::Index>(uniq.size()));
    if (fresh) uniq.push_back(r);
    slot[r] = it->second;
  }
  const auto m = static_cast<Eigen::Index>(uniq.size());
  Eigen::MatrixXd gram(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    gram(a, a) = 1.0;
    for (Eigen::Index b = 0; b < a; ++b) {
      double k = std::exp(-0.5 * (inputs.row(uniq[a]) - inputs.row(uniq[b])).squaredNorm());
      gram(a, b) = k;
      gram(b, a) = k;
    }
  }
  Eigen::VectorXd z(m);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < m; ++i) z(i) = normal(rng);

  // Pivoted LDL^T tolerates the semidefinite Gram matrices produced by
  // near-repeated inputs; jitter only when pivots go clearly negative.
  for (double jitter : {0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4}) {
    Eigen::MatrixXd g = gram;
    g.diagonal().array() += jitter;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
    if (ldlt.info() != Eigen::Success) continue;
    Eigen::VectorXd dvec = ldlt.vectorD();
    if (dvec.minCoeff() < -1e-8 * std::max(1.0, dvec.maxCoeff())) continue;
    Eigen::VectorXd scaled = dvec.cwiseMax(0.0).cwiseSqrt().cwiseProduct(z);
    Eigen::VectorXd lz = ldlt.matrixL() * scaled;
    Eigen::VectorXd f_uniq = ldlt.transpositionsP().transpose() * lz;
    Eigen::VectorXd f(n);
    for (Eigen::Index r = 0; r < n; ++r) f(r) = f_uniq(slot[r]);
    return f;
  }
  throw NumericalError("GP Gram matrix not positive semidefinite after jitter 1e-4");
}

Dataset simulate_gp_sem(const Dag& dag, int n, const std::vector<NoiseSpec>& noise,
                        std::uint64_t seed) {
  if (n < 2) throw UsageError("GP SEM needs at least 2 samples");
  const int d = dag.size();
  if (static_cast<int>(noise.size()) != d) throw UsageError("need one noise spec per node");
  Eigen::MatrixXd x(n, d);
  for (int v : dag.topological_order()) {
    Rng noise_rng(derive_seed(seed, "datagen", static_cast<std::uint64_t>(v)));
    for (int r = 0; r < n; ++r) x(r, v) = sample_noise(noise[v], noise_rng);
    const auto& pa = dag.parents(v);
    if (pa.empty()) continue;
    Eigen::MatrixXd inputs(n, static_cast<Eigen::Index>(pa.size()));
    for (std::size_t k = 0; k < pa.size(); ++k) inputs.col(static_cast<Eigen::Index>(k)) = x.col(pa[k]);
    Rng gp_rng(derive_seed(seed, "gpfunc", static_cast<std::uint64_t>(v)));
    x.col(v) += sample_gp_function(inputs, gp_rng);
  }
  return make_dataset(std::move(x));
}

Eigen::MatrixXd analytic_covariance(const Dag& dag, const EdgeWeights& weights,
                                    const std::vector<double>& noise_vars) {
  const int d = dag.size();
  if (static_cast<int>(noise_vars.size()) != d) throw UsageError("need one noise variance per node");
  for (double v : noise_vars)
    if (!(v > 0.0)) throw UsageError("noise variances must be positive");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
  for (const Edge& e : dag.edges()) {
    auto it = weights.find(e);
    if (it == weights.end()) throw UsageError("missing weight for an edge");
    w(e.parent, e.child) = it->second;
  }
  Eigen::MatrixXd i_minus_w = Eigen::MatrixXd::Identity(d, d) - w;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(i_minus_w);
  if (!lu.isInvertible()) throw NumericalError("I - W is singular; weights do not describe a DAG");
  Eigen::MatrixXd inv = lu.inverse();
  Eigen::VectorXd dv = Eigen::Map<const Eigen::VectorXd>(noise_vars.data(), d);
  Eigen::MatrixXd sigma = inv.transpose() * dv.asDiagonal() * inv;
  return 0.5 * (sigma + sigma.transpose());
}

}  // namespace fansmb
