#include <benchmark/benchmark.h>

#include "breath/autoencoder.hpp"
#include "breath/dsp.hpp"
#include "breath/monitor.hpp"
#include "breath/rng.hpp"
#include "breath/rnn.hpp"
#include "breath/synthgen.hpp"

using namespace breath;

namespace {

TimeFrame random_frame(std::uint64_t seed) {
  Rng rng(seed);
  TimeFrame f;
  for (double& s : f.samples) s = rng.uniform(-1.0, 1.0);
  return f;
}

void BM_Dfft(benchmark::State& state) {
  const TimeFrame f = random_frame(1);
  for (auto _ : state) benchmark::DoNotOptimize(dfft_magnitude(f));
}
BENCHMARK(BM_Dfft);

void BM_Encode(benchmark::State& state) {
  const AEParams ae = init_ae(1);
  const SpectralFrame s = spectral_frame(random_frame(2));
  for (auto _ : state) benchmark::DoNotOptimize(encode(ae, s));
}
BENCHMARK(BM_Encode);

void BM_AeBackward(benchmark::State& state) {
  const AEParams ae = init_ae(1);
  const SpectralFrame s = spectral_frame(random_frame(3));
  for (auto _ : state) benchmark::DoNotOptimize(ae_backward(ae, s));
}
BENCHMARK(BM_AeBackward);

void BM_RnnForward(benchmark::State& state) {
  const RNNParams rnn = init_rnn(1);
  Rng rng(4);
  WindowCodes codes;
  for (Eigen::Index i = 0; i < codes.size(); ++i) codes.data()[i] = rng.uniform(-1.0, 1.0);
  const Window w(codes, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rnn_forward(rnn, w));
}
BENCHMARK(BM_RnnForward);

void BM_RnnBackward(benchmark::State& state) {
  const RNNParams rnn = init_rnn(1);
  Rng rng(5);
  WindowCodes codes;
  for (Eigen::Index i = 0; i < codes.size(); ++i) codes.data()[i] = rng.uniform(-1.0, 1.0);
  const Window w(codes, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rnn_backward(rnn, w, Label::exhale));
}
BENCHMARK(BM_RnnBackward);

// One hop of live monitoring: 1/8 s of audio through the whole pipeline.
void BM_MonitorPush(benchmark::State& state) {
  const AEParams ae = init_ae(1);
  const RNNParams rnn = init_rnn(1);
  ScenarioSpec spec;
  spec.duration = 30.0;
  const Scenario sc = gen_scenario(spec);
  const FramedSignal frames = frame_signal(sc.audio);
  Monitor monitor(ae, rnn);
  std::size_t i = 0;
  std::int64_t index = 0;
  for (auto _ : state) {
    TimeFrame f = frames.frames[i];
    f.index = index++;
    benchmark::DoNotOptimize(monitor.push(f));
    i = (i + 1) % frames.frames.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MonitorPush);

}  // namespace

BENCHMARK_MAIN();
