#include <benchmark/benchmark.h>

#include "simcap/adsim.hpp"
#include "simcap/channel.hpp"
#include "simcap/filter.hpp"
#include "simcap/random.hpp"

using namespace simcap;

namespace {

states::EveEnsemble ensemble_07() {
  return states::eve_conditionals(
      states::purification_from_bell_diagonal(states::BellDiagonal::canonical({0.7, 0.1, 0.1, 0.1})));
}

void BM_HermEig4(benchmark::State& st) {
  Rng rng(1);
  const qlin::CMatrix rho = random::ginibre_state(rng, 4, 4);
  for (auto _ : st) benchmark::DoNotOptimize(qlin::herm_eig(rho));
}
BENCHMARK(BM_HermEig4);

void BM_BellDiagonalize(benchmark::State& st) {
  Rng rng(2);
  const states::TwoQubitState s(random::ginibre_state(rng, 4, 4));
  for (auto _ : st) benchmark::DoNotOptimize(filter::bell_diagonalize(s));
}
BENCHMARK(BM_BellDiagonalize);

void BM_EveBoundExact(benchmark::State& st) {
  const auto ens = ensemble_07();
  const auto usd = adsim::povm_usd(ens);
  const int n = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(adsim::eve_bound_exact(ens, usd, n));
}
BENCHMARK(BM_EveBoundExact)->Arg(16)->Arg(64)->Arg(256);

void BM_Simulate(benchmark::State& st) {
  adsim::AdConfig cfg;
  cfg.n = static_cast<int>(st.range(0));
  cfg.trials = 10000;
  cfg.lambdas = states::BellDiagonal::canonical({0.7, 0.1, 0.1, 0.1});
  for (auto _ : st) benchmark::DoNotOptimize(adsim::simulate(cfg));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * cfg.trials));
}
BENCHMARK(BM_Simulate)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_BestProbe(benchmark::State& st) {
  Rng rng(3);
  const auto ch = channel::random_channel(rng, 2);
  for (auto _ : st) benchmark::DoNotOptimize(channel::best_probe(ch, 1e-9));
}
BENCHMARK(BM_BestProbe);

}  // namespace

BENCHMARK_MAIN();
