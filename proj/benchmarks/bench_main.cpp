#include <benchmark/benchmark.h>

#include <vector>

#include "vlcsim/channel.hpp"
#include "vlcsim/link.hpp"
#include "vlcsim/params.hpp"
#include "vlcsim/thresholder.hpp"

namespace {

constexpr std::size_t kBlock = 4096;

std::vector<double> square_lux(double on_lux, std::size_t spb) {
  std::vector<double> lux(kBlock);
  for (std::size_t i = 0; i < kBlock; ++i) lux[i] = (i / spb) % 2 ? on_lux : 0.0;
  return lux;
}

void BM_Thresholder(benchmark::State& state) {
  const double rate = 100e3;
  auto cfg = vlcsim::default_params().high_gain.thresholder.for_bitrate(rate);
  vlcsim::Thresholder th(cfg, rate * 16);
  std::vector<double> analog(kBlock);
  for (std::size_t i = 0; i < kBlock; ++i) analog[i] = (i / 16) % 2 ? 1.2 : 0.1;
  std::vector<vlcsim::Bit> out(kBlock);
  for (auto _ : state) {
    th.process(analog, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * kBlock);
}
BENCHMARK(BM_Thresholder);

void BM_ReceiverChain(benchmark::State& state) {
  const auto kind = static_cast<vlcsim::ReceiverKind>(state.range(0));
  const double rate = kind == vlcsim::ReceiverKind::UltraLowPower ? 10e3 : 100e3;
  const auto params = vlcsim::default_params();
  vlcsim::ReceiverChain chain(params.receiver(kind), rate, rate * 16, 7);
  const auto lux = square_lux(50.0, 16);
  std::vector<vlcsim::Bit> out(kBlock);
  for (auto _ : state) {
    chain.process(lux, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * kBlock);
  state.SetLabel(std::string(vlcsim::to_string(kind)));
}
BENCHMARK(BM_ReceiverChain)->DenseRange(0, 2);

// One round of 50 x 256-byte packets through a fixed receiver.
void BM_LinkRound(benchmark::State& state) {
  vlcsim::LinkSetup setup;
  setup.tx.bitrate_bps = 100e3;
  setup.tx.on_lux = 50.0;
  setup.receiver = vlcsim::ReceiverKind::HighGain;
  setup.rounds = 1;
  setup.summary_only = true;
  for (auto _ : state) benchmark::DoNotOptimize(vlcsim::run_link(setup).ber);
  state.SetItemsProcessed(state.iterations() * 50 * 256 * 8);
}
BENCHMARK(BM_LinkRound)->Unit(benchmark::kMillisecond);

void BM_SwitchedSquareTrace(benchmark::State& state) {
  vlcsim::LinkSetup setup;
  setup.tx.bitrate_bps = 100e3;
  setup.tx.on_lux = 1500.0;
  setup.channel.attenuation = vlcsim::make_square_trace(3.0 / 1500.0, 1.0, 4, 1.0);
  setup.receiver.reset();
  setup.duration_s = 1.0;
  setup.summary_only = true;
  for (auto _ : state) benchmark::DoNotOptimize(vlcsim::run_link(setup).ber);
}
BENCHMARK(BM_SwitchedSquareTrace)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
