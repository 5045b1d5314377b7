#include <benchmark/benchmark.h>

#include "queuechan/capacity.hpp"
#include "queuechan/coding.hpp"
#include "queuechan/sim.hpp"

using namespace queuechan;

namespace {

NoiseModel reference_noise() {
  return NoiseModel(Alphabet{2}, ThresholdedNoise{0, binary_flip(0.1), binary_flip(0.4)});
}

SimConfig reference_channel(std::int64_t horizon, std::uint64_t seed) {
  return SimConfig{ArrivalMode::InterarrivalTimes,
                   Geometric{0.3},
                   Geometric{0.6},
                   reference_noise(),
                   horizon,
                   -1,
                   seed,
                   false};
}

void BM_SolveSigma(benchmark::State& state) {
  ParametricDist arrival = SumOfGeometric{{0.5, 0.5}};
  for (auto _ : state) benchmark::DoNotOptimize(solve_sigma(arrival, 0.7));
}
BENCHMARK(BM_SolveSigma);

void BM_KCoefficients(benchmark::State& state) {
  ParametricDist service = Geometric{0.5};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        k_coefficients_geo_g1(0.3, service, state.range(0), 1e-12).k.size());
}
BENCHMARK(BM_KCoefficients)->Arg(100)->Arg(400);

void BM_StationaryRecursion(benchmark::State& state) {
  KCoefficients k = k_coefficients_geo_g1(0.3, Geometric{0.5}, 400, 1e-12);
  for (auto _ : state)
    benchmark::DoNotOptimize(stationary_from_k(k, 0.3, 0.5, state.range(0)).masses.size());
}
BENCHMARK(BM_StationaryRecursion)->Arg(100)->Arg(400);

void BM_AnalyticCapacity(benchmark::State& state) {
  NoiseModel nm = reference_noise();
  for (auto _ : state) {
    StationaryDist pi = stationary_g_geo1(Geometric{0.3}, 0.6, 200);
    benchmark::DoNotOptimize(capacity(0.3, pi, nm).capacity_bits_per_slot);
  }
}
BENCHMARK(BM_AnalyticCapacity);

void BM_Simulate(benchmark::State& state) {
  SimConfig cfg = reference_channel(state.range(0), 1);
  for (auto _ : state) {
    ++cfg.seed;  // fresh realization each iteration
    SimulationTrace t = simulate(cfg);
    benchmark::DoNotOptimize(t.last_slot);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(10000)->Arg(100000);

void BM_MlDecodeExperiment(benchmark::State& state) {
  SimConfig cfg = reference_channel(1, 9);
  Codebook cb = Codebook::random(32, state.range(0), 2, 17);
  for (auto _ : state) {
    ++cfg.seed;
    ExperimentResult r = run_experiment(cb, cfg, DecoderKind::WithTimestamps, 5);
    benchmark::DoNotOptimize(r.block_errors);
  }
  state.SetItemsProcessed(state.iterations() * 5 * state.range(0) * 32);
}
BENCHMARK(BM_MlDecodeExperiment)->Arg(64)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
