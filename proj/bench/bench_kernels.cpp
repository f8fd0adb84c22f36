// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include "modesift/dmd.hpp"
#include "modesift/dmdsp.hpp"
#include "modesift/features.hpp"
#include "modesift/seqio.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace {

using namespace modesift;

FrameSequence noisy_video(std::size_t rows, std::size_t cols, std::size_t frames) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(rows * cols * frames);
  for (auto& x : v) x = u(rng);
  return FrameSequence(rows, cols, std::move(v), 200.0);
}

// Smooth moving pattern plus noise, so the sweep sees a realistic spectrum.
dmd::DmdDecomposition clip_decomposition() {
  const std::size_t rows = 48, cols = 40, frames = 72;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 0.01);
  std::vector<double> v(rows * cols * frames);
  std::size_t i = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const double s = 0.5 + 0.2 * std::sin(0.3 * c + 0.2 * r + 0.35 * t) +
                         0.1 * std::cos(0.15 * r - 0.9 * t);
        v[i++] = std::clamp(s + g(rng), 0.0, 1.0);
      }
    }
  }
  return dmd::decompose(to_snapshots(FrameSequence(rows, cols, std::move(v), 200.0)));
}

const FrameSequence& lbp_input() {
  static const FrameSequence s = noisy_video(128, 128, 60);
  return s;
}

const dmd::DmdDecomposition& sweep_input() {
  static const dmd::DmdDecomposition d = clip_decomposition();
  return d;
}

void BM_LbptopSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(features::serial::lbptop(lbp_input()));
}

void BM_LbptopParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(features::lbptop(lbp_input()));
}

void BM_GammaSweepSerial(benchmark::State& state) {
  const auto grid = dmdsp::log_grid(dmdsp::kDefaultGammaMin, dmdsp::kDefaultGammaMax,
                                    static_cast<int>(state.range(0)));
  dmdsp::SweepOptions opt;
  opt.gamma_scale = dmdsp::kEightBitGammaScale;
  for (auto _ : state) benchmark::DoNotOptimize(dmdsp::serial::gamma_sweep(sweep_input(), grid, opt));
}

void BM_GammaSweepParallel(benchmark::State& state) {
  const auto grid = dmdsp::log_grid(dmdsp::kDefaultGammaMin, dmdsp::kDefaultGammaMax,
                                    static_cast<int>(state.range(0)));
  dmdsp::SweepOptions opt;
  opt.gamma_scale = dmdsp::kEightBitGammaScale;
  for (auto _ : state) benchmark::DoNotOptimize(dmdsp::gamma_sweep(sweep_input(), grid, opt));
}

}  // namespace

BENCHMARK(BM_LbptopSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LbptopParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GammaSweepSerial)->Arg(40)->Arg(400)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GammaSweepParallel)->Arg(40)->Arg(400)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
