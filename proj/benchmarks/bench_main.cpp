#include <benchmark/benchmark.h>

#include <vector>

#include "spde/noise.hpp"
#include "spde/nonlinear.hpp"
#include "spde/rng.hpp"
#include "spde/scheme.hpp"
#include "spde/spectral.hpp"
#include "spde/transform.hpp"

using namespace spde;

namespace {

SpectralField field(std::size_t n) {
  PhiloxStream r(1, n);
  std::vector<double> a(n);
  for (std::size_t j = 0; j < n; ++j) a[j] = r.normal() / double(j + 1);
  return SpectralField(std::move(a));
}

void BM_Dst1(benchmark::State& st) {
  const std::size_t N = st.range(0);
  std::vector<double> in(N, 0.5), out(N);
  for (auto _ : st) {
    dst1(in, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_Dst1)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_BurgersFast(benchmark::State& st) {
  auto v = field(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(burgers_apply_fast(v, -0.5, v.size()));
}
BENCHMARK(BM_BurgersFast)->RangeMultiplier(4)->Range(16, 1024);

void BM_BurgersExact(benchmark::State& st) {
  auto v = field(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(burgers_apply_exact(v, -0.5, v.size()));
}
BENCHMARK(BM_BurgersExact)->RangeMultiplier(4)->Range(16, 1024);

void BM_AllenCahnFast(benchmark::State& st) {
  auto v = field(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(allen_cahn_apply(v, 1.0, 1.0, v.size()));
}
BENCHMARK(BM_AllenCahnFast)->RangeMultiplier(4)->Range(16, 1024);

void BM_SupNorm(benchmark::State& st) {
  auto v = field(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(sup_norm(v));
}
BENCHMARK(BM_SupNorm)->RangeMultiplier(4)->Range(16, 1024);

void BM_Step(benchmark::State& st) {
  const std::size_t n = st.range(0);
  SchemeConfig cfg{burgers_preset(), n, GridSpec(1.0, 256), field(n)};
  auto x = field(n), o = SpectralField::zeros(n), xi = field(n);
  x *= 1e-3;
  for (auto _ : st) benchmark::DoNotOptimize(step(x, o, o, xi, cfg));
}
BENCHMARK(BM_Step)->RangeMultiplier(4)->Range(16, 1024);

void BM_ConvolutionPath(benchmark::State& st) {
  const std::size_t n = st.range(0);
  NoiseLadder ladder(7, 256, n, 1.0, 1.0);
  std::uint64_t s = 0;
  for (auto _ : st) benchmark::DoNotOptimize(convolution_path(ladder, s++, n, GridSpec(1.0, 256)));
  st.SetItemsProcessed(st.iterations() * 256 * n);
}
BENCHMARK(BM_ConvolutionPath)->RangeMultiplier(4)->Range(16, 256);

void BM_GaussianPair(benchmark::State& st) {
  std::uint32_t k = 0;
  for (auto _ : st) benchmark::DoNotOptimize(gaussian_pair(1, 2, 3, k++));
  st.SetItemsProcessed(st.iterations() * 2);
}
BENCHMARK(BM_GaussianPair);

void BM_Run(benchmark::State& st) {
  const std::size_t n = st.range(0);
  NoiseLadder ladder(42, 256, n, 1.0, 0.0);
  SchemeConfig cfg{burgers_preset(), n, GridSpec(1.0, 256), SpectralField({0.5, 0.25})};
  std::uint64_t s = 0;
  for (auto _ : st) benchmark::DoNotOptimize(run(cfg, ladder, s++));
}
BENCHMARK(BM_Run)->Arg(16)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
