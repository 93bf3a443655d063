#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "carmichael/construction.hpp"
#include "carmichael/group_solver.hpp"
#include "carmichael/korselt.hpp"
#include "carmichael/smooth_sieve.hpp"

using namespace carmichael;

static void BM_Enumerate(benchmark::State& state) {
  const auto limit = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_carmichael(limit));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * limit));
}
BENCHMARK(BM_Enumerate)->Arg(100'000)->Arg(1'000'000)->Arg(10'000'000)->Unit(benchmark::kMillisecond);

static void BM_BuildQ(benchmark::State& state) {
  const SmoothPrimeQuery q{static_cast<std::uint64_t>(state.range(0)), {3, 2}, 1};
  for (auto _ : state) benchmark::DoNotOptimize(build_q(q));
}
BENCHMARK(BM_BuildQ)->Arg(50)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_Factorize(benchmark::State& state) {
  const Nat n = Nat(1000000007) * Nat(998244353) * Nat(4294967311ULL);
  for (auto _ : state) benchmark::DoNotOptimize(factorize(n));
}
BENCHMARK(BM_Factorize)->Unit(benchmark::kMicrosecond);

namespace {

std::vector<std::uint64_t> unit_pool(std::size_t n, std::uint64_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> pool;
  while (pool.size() < n) {
    const std::uint64_t v = 1 + rng() % 1'000'000;
    if (std::gcd(v, m) == 1) pool.push_back(v);
  }
  return pool;
}

}  // namespace

// Worst case for the solver: an unreachable target forces a full search.
static void BM_SolverMitm(benchmark::State& state) {
  const std::uint64_t m = 4999;
  const auto pool = unit_pool(static_cast<std::size_t>(state.range(0)), m, 1);
  for (auto _ : state) benchmark::DoNotOptimize(subset_product_find(pool, m, 1, 3));
}
BENCHMARK(BM_SolverMitm)->Arg(16)->Arg(24)->Arg(32)->Unit(benchmark::kMicrosecond);

static void BM_SolverDp(benchmark::State& state) {
  const std::uint64_t m = 1260;
  const auto pool = unit_pool(static_cast<std::size_t>(state.range(0)), m, 2);
  for (auto _ : state) benchmark::DoNotOptimize(subset_product_find(pool, m, 631, 3));
}
BENCHMARK(BM_SolverDp)->Arg(64)->Arg(256)->Arg(1000)->Unit(benchmark::kMicrosecond);

static void BM_ConstructErdos(benchmark::State& state) {
  ConstructionParams p;
  p.M = 4;
  p.a = 3;
  p.lambda = Nat(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(construct(p));
}
BENCHMARK(BM_ConstructErdos)->Arg(630)->Arg(90090)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
