// Serial reference kernels against their OpenMP versions. Thread count follows
// OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "fansmb/flow.hpp"
#include "fansmb/greedy_mb.hpp"
#include "fansmb/masking.hpp"
#include "fansmb/oracle.hpp"
#include "fansmb/random.hpp"
#include "fansmb/scorer.hpp"

using namespace fansmb;

namespace {

Eigen::MatrixXd normal_matrix(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = nd(rng);
  return x;
}

struct FlowFixture {
  FansModel model;
  Eigen::MatrixXd x;
  VarSet subset;
  explicit FlowFixture(int d)
      : model(FansModel::initialized(FansConfig::defaults_for(d), 1)), x(normal_matrix(1000, d, 2)) {
    for (int i = 0; i < d; i += 2) subset.insert(i);
  }
};

template <auto Kernel>
void BM_log_det(benchmark::State& state) {
  const FlowFixture f(static_cast<int>(state.range(0)));
  const SubsetFlow flow(f.model, f.subset);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(flow, f.x));
  state.SetItemsProcessed(state.iterations() * f.x.rows());
}

template <auto Kernel>
void BM_log_density(benchmark::State& state) {
  const FlowFixture f(static_cast<int>(state.range(0)));
  const SubsetFlow flow(f.model, f.subset);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(flow, f.x));
  state.SetItemsProcessed(state.iterations() * f.x.rows());
}

template <auto Kernel>
void BM_batch_gradient(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const FansModel model = FansModel::initialized(FansConfig::defaults_for(d), 1);
  const Eigen::MatrixXd batch = normal_matrix(256, d, 3);
  std::vector<VarSet> masks;
  Rng rng(4);
  for (int g = 0; g < 32; ++g) masks.push_back(mask_to_set(sample_leaf_mask(d, model.config().max_subset, rng)));
  std::vector<double> grad(model.parameter_count());
  for (auto _ : state) {
    std::fill(grad.begin(), grad.end(), 0.0);
    benchmark::DoNotOptimize(Kernel(model, batch, masks, 8, grad));
  }
  state.SetItemsProcessed(state.iterations() * batch.rows());
}

void BM_discover_serial(benchmark::State& state) {
  const GaussianSem sem = random_gaussian_sem(static_cast<int>(state.range(0)), 2.0, 5);
  const GaussianScorer scorer(sem.cov);
  for (auto _ : state) benchmark::DoNotOptimize(discover_all_serial(scorer, SearchConfig::defaults()));
}

void BM_discover_parallel(benchmark::State& state) {
  const GaussianSem sem = random_gaussian_sem(static_cast<int>(state.range(0)), 2.0, 5);
  const GaussianScorer scorer(sem.cov);
  for (auto _ : state) benchmark::DoNotOptimize(discover_all(scorer, SearchConfig::defaults(), 0));
}

}  // namespace

BENCHMARK(BM_log_det<subset_log_det_serial>)->Name("log_det/serial")->Arg(10)->Arg(30);
BENCHMARK(BM_log_det<subset_log_det_parallel>)->Name("log_det/parallel")->Arg(10)->Arg(30)->UseRealTime();
BENCHMARK(BM_log_density<subset_log_density_serial>)->Name("log_density/serial")->Arg(10)->Arg(30);
BENCHMARK(BM_log_density<subset_log_density_parallel>)->Name("log_density/parallel")->Arg(10)->Arg(30)->UseRealTime();
BENCHMARK(BM_batch_gradient<batch_gradient_serial>)->Name("batch_gradient/serial")->Arg(10)->Arg(30);
BENCHMARK(BM_batch_gradient<batch_gradient_parallel>)->Name("batch_gradient/parallel")->Arg(10)->Arg(30)->UseRealTime();
BENCHMARK(BM_discover_serial)->Name("discover/serial")->Arg(30)->Arg(60);
BENCHMARK(BM_discover_parallel)->Name("discover/parallel")->Arg(30)->Arg(60)->UseRealTime();

BENCHMARK_MAIN();
