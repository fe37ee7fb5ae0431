#include <benchmark/benchmark.h>

#include <random>

#include "nds/dynamics.hpp"
#include "nds/kernels.hpp"

using namespace nds;

namespace {

Exec mode(const benchmark::State& s) { return s.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void label(benchmark::State& s) { s.SetLabel(s.range(0) == 0 ? "serial" : "openmp"); }

void BM_IntervalDivergence(benchmark::State& state) {
  const PLMap tent = PLMap::tent();
  const PLMap bumped = bump_perturbation(tent, Rational(19, 20), Rational(1, 40), Rational(1, 100));
  std::vector<Rational> samples;
  for (int j = 0; j <= 256; ++j) samples.emplace_back(j, 256);
  for (auto _ : state) {
    auto r = kernels::interval_divergence({bumped}, true, tent, samples, 1, 64, std::nullopt, mode(state));
    benchmark::DoNotOptimize(r);
  }
  label(state);
}

void BM_CantorDivergence(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::vector<std::uint64_t> words(256);
  for (auto& w : words) w = rng() & 0xffffffffULL;
  for (auto _ : state) {
    auto r = kernels::cantor_divergence(words, 32, 6, true, 1, 4096, mode(state));
    benchmark::DoNotOptimize(r);
  }
  label(state);
}

void BM_FirstHits(benchmark::State& state) {
  const Rational eps(1, 512);
  const auto net = epsilon_net(Space::Circle, eps);
  std::vector<Point> entries;
  const Rational step(5, 13);
  for (int n = 1; n <= 400; ++n) entries.emplace_back(CirclePoint(step * n));
  for (auto _ : state) {
    auto r = kernels::first_hits(net, entries, eps, mode(state));
    benchmark::DoNotOptimize(r);
  }
  label(state);
}

void BM_Transitivity(benchmark::State& state) {
  const PLMap tent = PLMap::tent();
  for (auto _ : state) {
    auto r = test_transitivity(tent, Rational(1, 32), 16, mode(state));
    benchmark::DoNotOptimize(r);
  }
  label(state);
}

}  // namespace

BENCHMARK(BM_IntervalDivergence)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CantorDivergence)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FirstHits)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Transitivity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
