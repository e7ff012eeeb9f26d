// Compares the spatial-hash edge builder (serial and OpenMP) against the
// all-pairs reference, plus the two recurring full-tree scans.

#include <benchmark/benchmark.h>

#include <string>

#include "moran/metric.hpp"
#include "moran/rearrange.hpp"
#include "moran/spec.hpp"
#include "moran/tree.hpp"

using namespace moran;

namespace {

MoranSpec spec_named(const std::string& name) {
  return parse_spec_file(std::string(MORAN_SPEC_DIR) + "/" + name + ".json");
}

AugTree build(const MoranSpec& spec, int depth, bool hash, bool parallel) {
  BuildOptions o;
  o.max_level = depth;
  o.use_spatial_hash = hash;
  o.parallel = parallel;
  o.validate = false;  // validation cost is not what is being compared
  return build_tree(spec, o);
}

void BM_EdgesBrute(benchmark::State& state) {
  MoranSpec spec = spec_named("dyadic-chain");
  int depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build(spec, depth, false, false));
  state.SetComplexityN(1 << depth);
}

void BM_EdgesHashSerial(benchmark::State& state) {
  MoranSpec spec = spec_named("dyadic-chain");
  int depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build(spec, depth, true, false));
  state.SetComplexityN(1 << depth);
}

void BM_EdgesHashParallel(benchmark::State& state) {
  MoranSpec spec = spec_named("dyadic-chain");
  int depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build(spec, depth, true, true));
  state.SetComplexityN(1 << depth);
}

void BM_EdgesBrutePlanar(benchmark::State& state) {
  MoranSpec spec = spec_named("seeded-c");
  int depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build(spec, depth, false, false));
}

void BM_EdgesHashPlanar(benchmark::State& state) {
  MoranSpec spec = spec_named("seeded-c");
  int depth = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build(spec, depth, true, true));
}

void BM_SeparationScan(benchmark::State& state) {
  MoranSpec spec = spec_named("ends-packed");
  int depth = static_cast<int>(state.range(0));
  AugTree t = build(spec, depth, true, true);
  for (auto _ : state) benchmark::DoNotOptimize(condition_h_estimate(t, depth));
}

void BM_DeviationAudit(benchmark::State& state) {
  MoranSpec spec = spec_named("ends-packed");
  int depth = static_cast<int>(state.range(0));
  AugTree t = build(spec, depth, true, true);
  RearrangeVerdict v = is_rearrangeable(t, depth);
  SigmaMap s = build_sigma(t, v, depth);
  for (auto _ : state) benchmark::DoNotOptimize(near_isometry_deviation(t, s, depth, 1));
}

}  // namespace

BENCHMARK(BM_EdgesBrute)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_EdgesHashSerial)->DenseRange(6, 14, 2)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_EdgesHashParallel)->DenseRange(6, 14, 2)->Unit(benchmark::kMillisecond)->Complexity();
BENCHMARK(BM_EdgesBrutePlanar)->DenseRange(3, 5, 1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EdgesHashPlanar)->DenseRange(3, 6, 1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeparationScan)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DeviationAudit)->DenseRange(3, 5, 1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
