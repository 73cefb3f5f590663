#include "synergy/bounds.hpp"
#include "synergy/coupling.hpp"
#include "synergy/maxent.hpp"
#include "synergy/performance.hpp"
#include "synergy/pid.hpp"
#include "synergy/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace synergy;

namespace {

MarginalDistribution random_distribution(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> v(static_cast<size_t>(n));
  double sum = 0.0;
  for (double& x : v) {
    x = expo(rng);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return MarginalDistribution(std::move(v));
}

void BM_EntropyBits(benchmark::State& state) {
  DiscreteJoint j = sample_joint({4, 4, 4}, 1, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(entropy_bits(j));
  }
}
BENCHMARK(BM_EntropyBits);

void BM_SolveQStarCanonical(benchmark::State& state) {
  PairwiseMarginals m = pairwise_marginals(canonical("and_gate"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_q_star(m.m1, m.m2));
  }
}
BENCHMARK(BM_SolveQStarCanonical);

void BM_SolveQStarSampled(benchmark::State& state) {
  int ny = static_cast<int>(state.range(0));
  std::uint64_t idx = 0;
  for (auto _ : state) {
    state.PauseTiming();
    PairwiseMarginals m = pairwise_marginals(sample_joint({2, 2, ny}, 42, idx++));
    state.ResumeTiming();
    benchmark::DoNotOptimize(solve_q_star(m.m1, m.m2));
  }
}
BENCHMARK(BM_SolveQStarSampled)->Arg(2)->Arg(3)->Arg(4);

void BM_PidFull(benchmark::State& state) {
  DiscreteJoint j = canonical("disagreement_xor");
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_pid_full(j));
  }
}
BENCHMARK(BM_PidFull);

void BM_BoundsSummary(benchmark::State& state) {
  std::uint64_t idx = 0;
  for (auto _ : state) {
    state.PauseTiming();
    PairwiseMarginals m = pairwise_marginals(sample_joint({2, 2, 2}, 43, idx++));
    state.ResumeTiming();
    benchmark::DoNotOptimize(bounds_summary(m));
  }
}
BENCHMARK(BM_BoundsSummary);

void BM_GreedyCoupling(benchmark::State& state) {
  std::mt19937_64 rng(7);
  int n = static_cast<int>(state.range(0));
  MarginalDistribution p = random_distribution(rng, n);
  MarginalDistribution q = random_distribution(rng, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(greedy_coupling(p, q));
  }
}
BENCHMARK(BM_GreedyCoupling)->Arg(4)->Arg(16)->Arg(64);

void BM_ExactBayesAccuracy(benchmark::State& state) {
  DiscreteJoint j = sample_joint({8, 8, 8}, 3, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_bayes_accuracy(j));
  }
}
BENCHMARK(BM_ExactBayesAccuracy);

}  // namespace

BENCHMARK_MAIN();
