#include <benchmark/benchmark.h>

#include "robustmean/corruption.hpp"
#include "robustmean/datagen.hpp"
#include "robustmean/metrics.hpp"
#include "robustmean/recovery.hpp"

using namespace robustmean;

namespace {

StructureMatrix dense(Index n, Index r, std::uint64_t seed) {
  StructureSpec s;
  s.kind = StructureKind::dense_random;
  s.n = n;
  s.r = r;
  s.blocks.clear();
  s.seed = seed;
  return gen_structure(s);
}

DiscreteDistribution random_distribution(Index atoms, Index dim, Rng& rng) {
  std::uniform_int_distribution<int> coord(0, 9);
  Matrix support(atoms, dim);
  for (Index i = 0; i < atoms; ++i) {
    support(i, 0) = static_cast<double>(i);  // keeps atoms distinct
    for (Index j = 1; j < dim; ++j) support(i, j) = coord(rng);
  }
  return DiscreteDistribution::uniform(support);
}

void BM_Transport(benchmark::State& state) {
  Rng rng(1);
  const Index atoms = state.range(0);
  const auto p = random_distribution(atoms, 4, rng);
  const auto q = random_distribution(atoms, 4, rng);
  for (auto _ : state) benchmark::DoNotOptimize(d_entry_1(p, q).value);
  state.SetComplexityN(atoms);
}
BENCHMARK(BM_Transport)->RangeMultiplier(2)->Range(4, 64)->Complexity();

void BM_EntryInf(benchmark::State& state) {
  Rng rng(2);
  const auto p = random_distribution(state.range(0), 3, rng);
  const auto q = random_distribution(state.range(0), 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(d_entry_inf(p, q));
}
BENCHMARK(BM_EntryInf)->Arg(4)->Arg(8)->Arg(16);

void BM_Disc(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng(3);
  std::normal_distribution<double> g;
  Matrix b(n, 3);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < 3; ++j) b(i, j) = g(rng);
  }
  const Matrix m = b * b.transpose() + Matrix::Identity(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(disc(m));
  state.SetComplexityN(Index{1} << n);
}
BENCHMARK(BM_Disc)->DenseRange(8, 18, 2)->Complexity(benchmark::oN);

void BM_ImputeKnownStructure(benchmark::State& state) {
  const StructureMatrix a = dense(16, 8, 4);
  Rng rng(5);
  LatentSpec l;
  l.r = 8;
  const Dataset clean = gen_dataset(a, gen_latents(l, 1000, rng));
  const Dataset hidden = apply_plan(clean, plan_A2_tail_hiding(clean, 0.1));
  for (auto _ : state) {
    for (Index i = 0; i < hidden.N(); ++i) {
      benchmark::DoNotOptimize(impute_known_structure(hidden.sample(i), hidden.sample_mask(i), a));
    }
  }
  state.SetItemsProcessed(state.iterations() * hidden.N());
}
BENCHMARK(BM_ImputeKnownStructure)->Unit(benchmark::kMillisecond);

void BM_Ithsvd(benchmark::State& state) {
  StructureSpec s;
  s.seed = 7;
  const StructureMatrix a = gen_structure(s);
  Rng rng(6);
  LatentSpec l;
  l.r = 8;
  const Dataset clean = gen_dataset(a, gen_latents(l, state.range(0), rng));
  const Dataset hidden = apply_plan(clean, plan_A2_tail_hiding(clean, 0.05));
  IthsvdOptions o;
  o.target_rank = 8;
  for (auto _ : state) benchmark::DoNotOptimize(ithsvd_complete(hidden, o).iterations);
}
BENCHMARK(BM_Ithsvd)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ReplacementRandomized(benchmark::State& state) {
  const StructureMatrix a = dense(16, state.range(0), 8);
  Rng rng(9);
  Vector x = a.entries() * Vector::Random(a.r());
  x(3) += 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(recover_replacement_randomized(a, x, 2.0, rng).residual_hamming);
}
BENCHMARK(BM_ReplacementRandomized)->Arg(2)->Arg(4)->Arg(6);

void BM_ReplacementBruteforce(benchmark::State& state) {
  const StructureMatrix a = dense(16, state.range(0), 10);
  Vector x = a.entries() * Vector::Ones(a.r());
  x(3) += 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(recover_replacement_bruteforce(a, x).residual_hamming);
}
BENCHMARK(BM_ReplacementBruteforce)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SparseOmp(benchmark::State& state) {
  const StructureMatrix a = dense(16, 4, 11);
  Rng rng(12);
  Vector x = a.entries() * Vector::Random(4);
  x(5) += 7.0;
  for (auto _ : state) benchmark::DoNotOptimize(recover_via_sparse(a, x, 1, 12, rng).residual_hamming);
}
BENCHMARK(BM_SparseOmp);

}  // namespace
BENCHMARK_MAIN();
