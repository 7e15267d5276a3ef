#include <benchmark/benchmark.h>

#include <random>

#include "multipun/evalharness.h"

namespace {

void BM_ParseResponse(benchmark::State& state) {
  const std::string text =
      "Let me reason about the caption first. The picture shows a fan {a device}.\n"
      "```json\n{\n  \"is_pun\": true,\n  \"type\": \"Homographic\",\n  \"explanation\": "
      "\"The cooling fan is cheering, so it is also a \\\"fan\\\" of the team.\",\n  \"tuple\": {\n"
      "    \"wp\": \"fan\",\n    \"wa\": \"fan\",\n    \"Sp\": \"a device for moving air\",\n"
      "    \"Sa\": \"an ardent admirer\"\n  }\n}\n```\n";
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        multipun::evalharness::parse_response(text, multipun::prompts::Task::kExplanation));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseResponse);

void BM_CohensKappa(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::vector<bool> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng() & 1;
    b[i] = rng() & 1;
  }
  for (auto _ : state) benchmark::DoNotOptimize(multipun::evalharness::cohens_kappa(a, b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CohensKappa)->Arg(445)->Arg(100000);

}  // namespace
BENCHMARK_MAIN();
