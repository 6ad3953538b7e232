#include <benchmark/benchmark.h>

#include <random>

#include "varietal/asc.hpp"

using namespace varietal;

namespace {

Matrix linear_samples(int dim, int n, std::size_t per, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<LinearSubspace> members;
  for (int i = 0; i < n; ++i) members.push_back(random_linear_subspace(dim, dim - 1 - i % (dim - 1), rng));
  const std::vector<std::size_t> counts(static_cast<std::size_t>(n), per);
  return sample_matrix(sample_union(UnionOfLinear(std::move(members)), counts, seed));
}

void BM_FitVanishingBasis(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const Matrix x = linear_samples(dim, n, 2 * monomial_basis_size(n, dim), 1);
  for (auto _ : state) benchmark::DoNotOptimize(fit_vanishing_basis(x, n));
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_FitVanishingBasis)->Args({3, 2})->Args({4, 3})->Args({5, 3})->Args({6, 4});

void BM_ClusterAffine(benchmark::State& state) {
  const auto per = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  const UnionOfAffine u({random_affine_subspace(4, 2, true, rng), random_affine_subspace(4, 1, true, rng)});
  const std::vector<std::size_t> counts{per, per};
  const Matrix x = sample_matrix(sample_union(u, counts, 3));
  ClusterConfig config;
  config.n_subspaces = 2;
  config.affine = true;
  for (auto _ : state) benchmark::DoNotOptimize(cluster_affine(x, config));
  state.SetItemsProcessed(state.iterations() * x.cols());
}
BENCHMARK(BM_ClusterAffine)->Arg(60)->Arg(240)->Arg(960);

}  // namespace

BENCHMARK_MAIN();
