#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "kcut/graph.hpp"
#include "kcut/pipeline.hpp"
#include "kcut/rank1.hpp"
#include "kcut/rankr.hpp"
#include "kcut/rng.hpp"
#include "kcut/spectra.hpp"

using namespace kcut;

namespace {

Eigen::VectorXcd random_target(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXcd q(n);
  for (int i = 0; i < n; ++i) q(i) = Cplx(rng.normal(), rng.normal());
  return q;
}

void BM_Rank1Maximize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::VectorXcd q = random_target(n, 1);
  std::int64_t candidates = 0;
  for (auto _ : state) {
    const Rank1Result res = maximize_rank1(q, 3);
    benchmark::DoNotOptimize(res.factor_objective);
    candidates += res.candidates;
  }
  state.SetItemsProcessed(candidates);
}
BENCHMARK(BM_Rank1Maximize)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_RankRMaximize(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const WeightedGraph g = generate_er(n, 0.15, 7);
  const Eigen::MatrixXcd V = top_r_factor(Laplacian(g), 2).scaled_factor();
  std::int64_t candidates = 0;
  for (auto _ : state) {
    const RankRResult res = maximize_rankr(V, 3);
    benchmark::DoNotOptimize(res.factor_objective);
    candidates += res.candidates;
  }
  state.SetItemsProcessed(candidates); // candidates raced per second
}
BENCHMARK(BM_RankRMaximize)->Arg(20)->Arg(40)->Arg(80)
    ->Unit(benchmark::kMillisecond);

void BM_VertexEnumeration(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const WeightedGraph g = generate_er(n, 0.15, 7);
  const Eigen::MatrixXcd V = top_r_factor(Laplacian(g), 2).scaled_factor();
  const AugmentedSystem sys = build_augmented(V, 3);
  std::int64_t vertices = 0;
  for (auto _ : state) {
    IndexSetStream stream = stream_valid_index_sets(sys);
    std::vector<int> I;
    while (stream.next(I)) {
      const auto c = vertex_nullvector(sys, I);
      if (c) {
        benchmark::DoNotOptimize(c->sum());
        ++vertices;
      }
    }
  }
  state.SetItemsProcessed(vertices);
}
BENCHMARK(BM_VertexEnumeration)->Arg(20)->Arg(40)
    ->Unit(benchmark::kMillisecond);

void BM_TopFactorDense(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const WeightedGraph g = generate_er(n, 0.1, 3);
  const Laplacian L(g);
  for (auto _ : state) {
    const SpectralFactor f = top_r_factor(L, 2);
    benchmark::DoNotOptimize(f.values(0));
  }
}
BENCHMARK(BM_TopFactorDense)->Arg(256)->Arg(1024)
    ->Unit(benchmark::kMillisecond);

void BM_TopFactorIterative(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const WeightedGraph g = generate_regular(n, 5, 3);
  const Laplacian L(g);
  FactorOptions opts;
  opts.force_iterative = true;
  for (auto _ : state) {
    const SpectralFactor f = top_r_factor(L, 2, opts);
    benchmark::DoNotOptimize(f.values(0));
  }
}
BENCHMARK(BM_TopFactorIterative)->Arg(2048)->Arg(8192)
    ->Unit(benchmark::kMillisecond);

void BM_SparseQuadraticForm(benchmark::State& state) {
  const WeightedGraph g = generate_torus(200, 200); // n = 40000
  const Laplacian L(g);
  Rng rng(5);
  std::vector<int> labels(g.n);
  for (int& l : labels) l = static_cast<int>(rng.below(3));
  const Assignment a(labels, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(L.quadratic_form_of(a));
  }
}
BENCHMARK(BM_SparseQuadraticForm);

void BM_Oracle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(11);
  Eigen::MatrixXcd B(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) B(i, j) = Cplx(rng.normal(), rng.normal());
  }
  Eigen::MatrixXcd Q = B * B.adjoint();
  Q = (Q + Q.adjoint()) / 2.0;
  const HermitianOperand op(std::move(Q), 1e-9, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(brute_force_oracle(op, 3).objective);
  }
}
BENCHMARK(BM_Oracle)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
