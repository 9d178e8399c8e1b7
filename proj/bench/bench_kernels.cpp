#include "isodeform/invariants.hpp"
#include "isodeform/verify.hpp"

#include <benchmark/benchmark.h>

using namespace isodeform;

namespace {

const JMap& seed_map() {
  static const JMap j = deformable_generic_jmap(5, 2, 42).j;
  return j;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void BM_CurvatureScan(benchmark::State& state) {
  ScanOptions options;
  options.points = 64;
  options.planes = 32;
  options.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(curvature_scan(seed_map(), {1.0, 0.5}, Surface::sphere, options));
}

void BM_ScalarSamples(benchmark::State& state) {
  SamplingOptions options;
  options.samples = 2048;
  options.exec = exec_of(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(sphere_integrand_samples(seed_map(), SphereIntegrand::scalar, options));
  state.SetItemsProcessed(state.iterations() * options.samples);
}

void BM_VolumeSamples(benchmark::State& state) {
  SamplingOptions options;
  options.samples = 1 << 15;
  options.exec = exec_of(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(sphere_integrand_samples(seed_map(), SphereIntegrand::volume, options));
  state.SetItemsProcessed(state.iterations() * options.samples);
}

void BM_HypothesisSuite(benchmark::State& state) {
  static const IsospectralFamily fam = [] {
    FamilyOptions options;
    options.seed = 42;
    options.certify_restarts = 2;
    return build_family(seed_map(), 2, 5e-3, options);
  }();
  SuiteConfig config;
  config.samples = 50;
  config.exec = exec_of(state);
  const auto directions = default_directions(2);
  for (auto _ : state) benchmark::DoNotOptimize(run_hypothesis_suite(fam.members, directions, config));
}

}  // namespace

// Argument 0 runs the serial reference, 1 the OpenMP kernel.
BENCHMARK(BM_CurvatureScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScalarSamples)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VolumeSamples)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HypothesisSuite)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
