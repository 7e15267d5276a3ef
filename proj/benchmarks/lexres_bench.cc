#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "multipun/lexres.h"

namespace {

// A layered hypernym forest rendered as WordNet text with exact offsets.
struct Forest {
  std::string index, data;
  std::vector<std::uint32_t> offsets;
};

Forest make_forest(int nodes) {
  std::mt19937_64 rng(7);
  std::vector<int> parent(nodes, -1);
  for (int i = 1; i < nodes; ++i) parent[i] = i < 8 ? -1 : static_cast<int>(rng() % static_cast<unsigned>(i));
  auto line = [&](int i, const std::vector<std::uint32_t>& off) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%08u 03 n 01 n%06d 0 ", off.empty() ? 0u : off[i], i);
    std::string s = buf;
    if (parent[i] < 0) {
      s += "000";
    } else {
      std::snprintf(buf, sizeof buf, "001 @ %08u n 0000", off.empty() ? 0u : off[parent[i]]);
      s += buf;
    }
    return s + " | node\n";
  };
  Forest f;
  std::uint32_t pos = 0;
  for (int i = 0; i < nodes; ++i) {
    f.offsets.push_back(pos);
    pos += static_cast<std::uint32_t>(line(i, {}).size());
  }
  for (int i = 0; i < nodes; ++i) {
    f.data += line(i, f.offsets);
    char buf[64];
    std::snprintf(buf, sizeof buf, "n%06d n 1 0 1 0 %08u\n", i, f.offsets[i]);
    f.index += buf;
  }
  return f;
}

void BM_WordNetParse(benchmark::State& state) {
  auto f = make_forest(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(multipun::lexres::WordNetDb::parse(f.index, f.data));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(f.data.size() + f.index.size()));
}
BENCHMARK(BM_WordNetParse)->Arg(1000)->Arg(10000);

void BM_PathSimilarity(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto f = make_forest(n);
  auto db = multipun::lexres::WordNetDb::parse(f.index, f.data);
  std::mt19937_64 rng(3);
  for (auto _ : state) {
    multipun::lexres::SynsetId a{f.offsets[rng() % n], 'n'}, b{f.offsets[rng() % n], 'n'};
    benchmark::DoNotOptimize(multipun::lexres::path_similarity(db, a, b));
  }
}
BENCHMARK(BM_PathSimilarity)->Arg(1000)->Arg(10000);

}  // namespace
