#include "benchmark/benchmark.h"
#include "docspot/features.h"
#include "docspot/proposals.h"
#include "docspot/segmentation.h"
#include "docspot/synth.h"

namespace docspot {
namespace {

const SynthCorpus& corpus() {
  static const SynthCorpus c = [] {
    SynthSpec spec;
    spec.page_count = 1;
    return generate(spec);
  }();
  return c;
}

void BM_Segment(benchmark::State& state) {
  const Image& page = corpus().pages[0].image;
  for (auto _ : state) benchmark::DoNotOptimize(felzenszwalb_segment(page, SegmentParams{}));
}
BENCHMARK(BM_Segment)->Unit(benchmark::kMillisecond);

void BM_Propose(benchmark::State& state) {
  const Image& page = corpus().pages[0].image;
  for (auto _ : state) benchmark::DoNotOptimize(propose(page, SegmentParams{}, FilterParams{}));
}
BENCHMARK(BM_Propose)->Unit(benchmark::kMillisecond);

void BM_ExtractBaseline(benchmark::State& state) {
  const Image& crop = corpus().queries[0].crop;
  for (auto _ : state) benchmark::DoNotOptimize(extract_baseline(crop));
}
BENCHMARK(BM_ExtractBaseline)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace docspot
