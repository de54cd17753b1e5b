#include <benchmark/benchmark.h>

#include "hmm/emission.hpp"
#include "hmm/farfield.hpp"

namespace {

void BM_HalfSpaceResponse(benchmark::State& state) {
  const auto rs = hmm::resolve(hmm::preset_stack("au-zns"), 900);
  double s = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hmm::half_space_response(rs, hmm::kPresetHostLayer, hmm::Side::up, s));
    s = s > 50.0 ? 0.1 : s * 1.01;
  }
}
BENCHMARK(BM_HalfSpaceResponse);

void BM_Kernels(benchmark::State& state) {
  const hmm::EmissionGeometry geom(hmm::resolve(hmm::preset_stack("au-zns"), 900), hmm::kPresetHostLayer, 25.0);
  double s = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(geom.kernels(s));
    s = s > 50.0 ? 0.1 : s * 1.01;
  }
}
BENCHMARK(BM_Kernels);

void BM_Purcell(benchmark::State& state) {
  const auto stack = hmm::preset_stack("au-zns");
  const hmm::DipoleSource d{static_cast<double>(state.range(0)), hmm::kPresetHostLayer, 25.0, 45.0};
  for (auto _ : state) benchmark::DoNotOptimize(hmm::purcell(stack, d));
}
BENCHMARK(BM_Purcell)->Arg(650)->Arg(900)->Unit(benchmark::kMillisecond);

void BM_Collection(benchmark::State& state) {
  const auto stack = hmm::preset_stack("au-zns");
  const hmm::DipoleSource d{900, hmm::kPresetHostLayer, 25.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(hmm::collection(stack, d, 0.95));
}
BENCHMARK(BM_Collection)->Unit(benchmark::kMillisecond);

void BM_CprSpectrum(benchmark::State& state) {
  const auto stack = hmm::preset_stack("au-zns");
  const hmm::DipoleSource d{0.0, hmm::kPresetHostLayer, 25.0, 0.0};
  const auto threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(hmm::cpr_spectrum(stack, d, 650, 1000, 176, 0.95, hmm::Side::up, {}, threads));
}
BENCHMARK(BM_CprSpectrum)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
