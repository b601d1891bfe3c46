// Microbenchmarks for the hot kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "heis/analysis.hpp"
#include "heis/group.hpp"
#include "heis/limsup.hpp"
#include "heis/net.hpp"
#include "heis/random.hpp"
#include "heis/rectangles.hpp"
#include "heis/svf.hpp"

namespace {

using namespace heis;

std::vector<double> random_coords(int n, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> c(count * (2 * n + 1));
  for (double& v : c) v = rng.uniform(-1.0, 1.0);
  return c;
}

void BM_GroupMul(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::size_t m = 2 * n + 1;
  const auto c = random_coords(n, 1024, 1);
  std::vector<double> out(m);
  std::size_t i = 0;
  for (auto _ : state) {
    const std::span<const double> p(c.data() + (i % 1023) * m, m), q(c.data() + (i % 1023 + 1) * m, m);
    coords::mul(p, q, out);
    benchmark::DoNotOptimize(out.data());
    ++i;
  }
}
BENCHMARK(BM_GroupMul)->Arg(1)->Arg(3);

void BM_Distance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const std::size_t m = 2 * n + 1;
  const auto c = random_coords(n, 1024, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    const std::span<const double> p(c.data() + (i % 1023) * m, m), q(c.data() + (i % 1023 + 1) * m, m);
    benchmark::DoNotOptimize(coords::distance(p, q));
    ++i;
  }
}
BENCHMARK(BM_Distance)->Arg(1)->Arg(3);

void BM_Contains(benchmark::State& state) {
  const Rectangle R(Kind::Type1, random_isotropic_frame(2, 1, 3), HPoint(2), 1.0, 0.5);
  const auto c = random_coords(2, 1024, 3);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(R.contains_coords(std::span<const double>(c.data() + (i % 1024) * 5, 5)));
    ++i;
  }
}
BENCHMARK(BM_Contains);

void BM_SvfEval(benchmark::State& state) {
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(svf_eval({Kind::Type1, 2, 1, t, 0.3, 0.1}));
    t = t < 5.9 ? t + 0.1 : 0.0;
  }
}
BENCHMARK(BM_SvfEval);

void BM_GreedyNet(benchmark::State& state) {
  const PointCloud cloud = sample_interior(Rectangle::canonical(Kind::Type1, 1, 1, 1.0, 1.0), 100000, 4);
  const double eps = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    GreedyNet net(1, eps);
    for (std::size_t i = 0; i < cloud.size(); ++i) net.offer(cloud[i]);
    benchmark::DoNotOptimize(net.size());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cloud.size()));
}
BENCHMARK(BM_GreedyNet)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SampleInterior(benchmark::State& state) {
  const Rectangle R = Rectangle::canonical(Kind::Type1, 1, 1, 1.0, 1.0 / static_cast<double>(state.range(0)));
  std::uint64_t seed = 5;
  for (auto _ : state) benchmark::DoNotOptimize(sample_interior(R, 100000, seed++).size());
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_SampleInterior)->Arg(1)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_EnergyMc(benchmark::State& state) {
  const Rectangle R = Rectangle::canonical(Kind::Type2, 1, 1, 1.0, 0.25);
  std::uint64_t seed = 6;
  for (auto _ : state) benchmark::DoNotOptimize(energy_mc(R, 2.5, 200000, seed++).value);
  state.SetItemsProcessed(state.iterations() * 200000);
}
BENCHMARK(BM_EnergyMc)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  SimConfig cfg;
  cfg.family = {Kind::Type1, 1, 1, 0.5, 1.0};
  cfg.stage_end = 1023;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg).estimated_dimension);
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
