#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fansmb/dataset.hpp"
#include "fansmb/graph.hpp"
#include "fansmb/random.hpp"

namespace fansmb {

enum class NoiseFamily { Gaussian, Uniform, Laplace, Gumbel, Exponential };

// Additive noise distribution. `scale` is the std for Gaussian, the half-width
// for Uniform, b for Laplace, beta for Gumbel and 1/lambda for Exponential.
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::Gaussian;
  double loc = 0.0;
  double scale = 1.0;

  static NoiseSpec standard(NoiseFamily family) { return {family, 0.0, 1.0}; }
};

std::string to_string(NoiseFamily family);
NoiseFamily parse_noise_family(const std::string& name);

double sample_noise(const NoiseSpec& spec, Rng& rng);

// One family per node, uniformly over the five families, unit parameters.
std::vector<NoiseSpec> mixed_noise_specs(int d, std::uint64_t seed);

// Random topological permutation; each forward pair becomes an edge with
// probability avg_degree / (d - 1).
Dag sample_er_dag(int d, double avg_degree, std::uint64_t seed);

// |w| ~ U[0.5, 2] with a uniformly random sign.
EdgeWeights sample_sem_weights(const Dag& dag, std::uint64_t seed);

// x_i = sum_{p in Pa(i)} w_{p->i} x_p + eps_i
Dataset simulate_linear_sem(const Dag& dag, const EdgeWeights& weights, int n,
                            const NoiseSpec& noise, std::uint64_t seed);

// x_i = f_i(x_Pa(i)) + eps_i with f_i a joint GP prior draw (RBF, bandwidth 1)
// at the n observed parent configurations.
Dataset simulate_gp_sem(const Dag& dag, int n, const std::vector<NoiseSpec>& noise,
                        std::uint64_t seed);

// Joint draw of a zero-mean GP with kernel exp(-|a-b|^2 / 2) at the rows of
// `inputs`. Exposed for testing.
Eigen::VectorXd sample_gp_function(const Eigen::MatrixXd& inputs, Rng& rng);

// Sigma = (I - W)^{-T} diag(noise_vars) (I - W)^{-1}, W[p][c] = w_{p->c}.
Eigen::MatrixXd analytic_covariance(const Dag& dag, const EdgeWeights& weights,
                                    const std::vector<double>& noise_vars);

}  // namespace fansmb
