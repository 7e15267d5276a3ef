#include <benchmark/benchmark.h>

#include <random>

#include "multipun/divfilter.h"

namespace {

using multipun::divfilter::EmbeddingMatrix;

EmbeddingMatrix random_embeddings(std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(n);
  std::normal_distribution<double> normal;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows(n, std::vector<double>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("c" + std::to_string(i));
    for (auto& x : rows[i]) x = normal(rng);
  }
  return EmbeddingMatrix(std::move(ids), std::move(rows));
}

void BM_CosineDistanceMatrix(benchmark::State& state) {
  auto e = random_embeddings(static_cast<std::size_t>(state.range(0)), 256);
  for (auto _ : state) {
    benchmark::DoNotOptimize(multipun::divfilter::cosine_distance_matrix(e, 1));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CosineDistanceMatrix)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

// Prunes half of the candidates, the regime of per-type de-duplication.
void BM_DiversityFilter(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto e = random_embeddings(n, 64);
  auto d = multipun::divfilter::cosine_distance_matrix(e, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(multipun::divfilter::diversity_filter(d, e.ids(), n / 2));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DiversityFilter)->RangeMultiplier(2)->Range(64, 2048)->Complexity();

}  // namespace
