#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "docspot/hashing.h"
#include "docspot/index.h"
#include "docspot/search.h"

namespace docspot {
namespace {

constexpr std::size_t kDims = 1024;

std::vector<float> random_rows(std::size_t rows, std::size_t dims) {
  std::mt19937 rng(1);
  std::normal_distribution<float> g;
  std::vector<float> out(rows * dims);
  for (auto& v : out) v = g(rng);
  return out;
}

void BM_EuclideanScan(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto store = random_rows(rows, kDims);
  const auto query = random_rows(1, kDims);
  std::vector<float> out(rows);
  for (auto _ : state) {
    euclidean_scan(store, kDims, query, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * rows);
  state.SetBytesProcessed(state.iterations() * rows * kDims * sizeof(float));
}
BENCHMARK(BM_EuclideanScan)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_HammingScan(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const std::size_t words = words_for_bits(kDims);
  std::mt19937_64 rng(2);
  std::vector<std::uint64_t> store(rows * words), query(words);
  for (auto& w : store) w = rng();
  for (auto& w : query) w = rng();
  std::vector<std::uint32_t> out(rows);
  for (auto _ : state) {
    hamming_scan(store, words, query, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * rows);
  state.SetBytesProcessed(state.iterations() * rows * words * sizeof(std::uint64_t));
}
BENCHMARK(BM_HammingScan)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

const SearchIndex& shared_index() {
  static const SearchIndex index = [] {
    constexpr std::size_t kRows = 100000;
    std::vector<IndexEntry> entries(kRows);
    for (std::size_t i = 0; i < kRows; ++i) entries[i] = {i, "p", {0, 0, 1, 1}, 0, 0};
    return SearchIndex::assemble({"vgg19-block4-5", kDims, ExtractorKind::kExternal}, true,
                                 {{"p", "", 1, 1}}, std::move(entries), random_rows(kRows, kDims));
  }();
  return index;
}

// Scan plus top-n selection, as a query runs it.
void BM_Query(benchmark::State& state) {
  const auto& index = shared_index();
  const auto mode = state.range(0) ? DistanceMode::kHamming : DistanceMode::kEuclidean;
  const FeatureVector q{random_rows(1, kDims)};
  for (auto _ : state) benchmark::DoNotOptimize(query(index, q, mode, 1000));
  state.SetLabel(to_string(mode));
}
BENCHMARK(BM_Query)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace docspot
