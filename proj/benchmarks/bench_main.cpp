#include <benchmark/benchmark.h>

#include "dioph/counter.hpp"
#include "dioph/expsum.hpp"
#include "dioph/metric.hpp"

namespace {

using namespace dioph;

void BM_CountExact(benchmark::State& state) {
  const auto map = presets::paraboloid(2);
  const auto q = state.range(0);
  const auto psi = PsiValue::from_rational(Rational(1, static_cast<long>(state.range(1))));
  CountOptions o;
  o.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_at(map, psi, Shift::zero(2, 1), q, CountMethod::exact, o).A);
  }
  state.SetItemsProcessed(state.iterations() * (q + 1) * (q + 1));
}
BENCHMARK(BM_CountExact)->ArgsProduct({{100, 300, 1000}, {10, 1000}})->Unit(benchmark::kMillisecond);

void BM_CountPruned(benchmark::State& state) {
  const auto map = presets::paraboloid(2);
  const auto q = state.range(0);
  const auto psi = PsiValue::from_rational(Rational(1, static_cast<long>(state.range(1))));
  CountOptions o;
  o.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_at(map, psi, Shift::zero(2, 1), q, CountMethod::pruned, o).A);
  }
  state.SetItemsProcessed(state.iterations() * (q + 1) * (q + 1));
}
BENCHMARK(BM_CountPruned)->ArgsProduct({{100, 300, 1000}, {10, 1000}})->Unit(benchmark::kMillisecond);

void BM_CountParabolaLargeQ(benchmark::State& state) {
  const auto map = presets::parabola();
  const auto psi = PsiValue::from_rational(Rational(1, 1000));
  const auto method = state.range(0) == 0 ? CountMethod::exact : CountMethod::pruned;
  CountOptions o;
  o.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_at(map, psi, Shift::zero(1, 1), 2'000'000, method, o).A);
  }
  state.SetLabel(state.range(0) == 0 ? "exact" : "pruned");
}
BENCHMARK(BM_CountParabolaLargeQ)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CountParabolaRational(benchmark::State& state) {
  const auto map = presets::parabola();
  const auto psi = PsiValue::from_rational(Rational(1, 10));
  CountOptions o;
  o.threads = 1;
  o.arithmetic = state.range(0) == 0 ? Arithmetic::hybrid : Arithmetic::rational;
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_at(map, psi, Shift::zero(1, 1), 10000, CountMethod::exact, o).A);
  }
  state.SetLabel(state.range(0) == 0 ? "hybrid" : "rational");
}
BENCHMARK(BM_CountParabolaRational)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BStarBlock(benchmark::State& state) {
  const auto map = presets::paraboloid(2);
  const auto params = block_params(state.range(0), 0.125, 8.8);
  const Shift theta = parse_shift("1/3,2/5,1/7", 2, 1);
  const std::vector<std::int64_t> u{1, 2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_B_star_u(map, theta, params, u).value);
  }
  state.counters["r"] = static_cast<double>(params.r);
  state.counters["H"] = static_cast<double>(params.H);
}
BENCHMARK(BM_BStarBlock)->Arg(256)->Arg(1024)->Arg(4096);

void BM_Chain(benchmark::State& state) {
  const auto map = presets::parabola();
  ChainOptions o;
  o.window = FejerWindow::half;
  o.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run_chain(map, PsiValue::from_rational(Rational(1, 8)), Shift::zero(1, 1), state.range(0), 2.2, o).A);
  }
}
BENCHMARK(BM_Chain)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_SeriesPartialSum(benchmark::State& state) {
  SeriesSpec spec;
  spec.psi = parse_psi("powlog:1/3:2/3");
  spec.Q_max = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(series_partial_sum(spec, 1).partial_sum);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SeriesPartialSum)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  const auto map = presets::paraboloid(2);
  const auto samples = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(doubly_metric_mc(map, 0.2, 7, samples, 11, 1).estimate);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_Cover(benchmark::State& state) {
  const auto map = presets::parabola();
  CoverOptions o;
  o.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        build_cover(map, PsiValue::from_rational(Rational(1, 10)), Shift::zero(1, 1), state.range(0), Rational(1), o)
            .count);
  }
}
BENCHMARK(BM_Cover)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
