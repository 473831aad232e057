// Serial reference kernels vs the OpenMP/GEMM kernels at the shapes the
// default model runs (batch 64, base width 256).

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tsgan/kernels.hpp"

using namespace tsgan::kernels;

namespace {

std::vector<float> filled(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

ConvGeom layer(std::int64_t idx) {
  // Critic trunk layers: 96 -> 48 -> 24 -> 12 -> 6 samples.
  static const std::size_t chans[] = {1, 32, 64, 128, 256};
  ConvGeom g;
  g.batch = 64;
  g.in_ch = chans[idx];
  g.out_ch = chans[idx + 1];
  g.in_len = 96 >> idx;
  g.kernel = 4;
  g.stride = 2;
  g.pad = 1;
  g.out_len = conv_out_len(g.in_len, g.kernel, g.stride, g.pad);
  return g;
}

template <bool Parallel>
void BM_gemm(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto a = filled(n * n, 1), b = filled(n * n, 2);
  std::vector<float> c(n * n);
  for (auto _ : st) {
    if constexpr (Parallel) {
      parallel::gemm(false, false, n, n, n, a.data(), b.data(), c.data());
    } else {
      serial::gemm(false, false, n, n, n, a.data(), b.data(), c.data());
    }
    benchmark::DoNotOptimize(c.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}

template <bool Parallel>
void BM_conv_forward(benchmark::State& st) {
  const ConvGeom g = layer(st.range(0));
  const auto x = filled(g.batch * g.in_ch * g.in_len, 3);
  const auto w = filled(g.out_ch * g.in_ch * g.kernel, 4);
  std::vector<float> y(g.batch * g.out_ch * g.out_len);
  for (auto _ : st) {
    if constexpr (Parallel) {
      parallel::conv1d_forward(g, x.data(), w.data(), y.data());
    } else {
      serial::conv1d_forward(g, x.data(), w.data(), y.data());
    }
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Parallel>
void BM_conv_adjoint(benchmark::State& st) {
  const ConvGeom g = layer(st.range(0));
  const auto gy = filled(g.batch * g.out_ch * g.out_len, 5);
  const auto w = filled(g.out_ch * g.in_ch * g.kernel, 6);
  std::vector<float> gx(g.batch * g.in_ch * g.in_len);
  for (auto _ : st) {
    if constexpr (Parallel) {
      parallel::conv1d_adjoint(g, gy.data(), w.data(), gx.data());
    } else {
      serial::conv1d_adjoint(g, gy.data(), w.data(), gx.data());
    }
    benchmark::DoNotOptimize(gx.data());
  }
}

template <bool Parallel>
void BM_conv_weight_grad(benchmark::State& st) {
  const ConvGeom g = layer(st.range(0));
  const auto x = filled(g.batch * g.in_ch * g.in_len, 7);
  const auto gy = filled(g.batch * g.out_ch * g.out_len, 8);
  std::vector<float> gw(g.out_ch * g.in_ch * g.kernel);
  for (auto _ : st) {
    if constexpr (Parallel) {
      parallel::conv1d_weight_grad(g, x.data(), gy.data(), gw.data());
    } else {
      serial::conv1d_weight_grad(g, x.data(), gy.data(), gw.data());
    }
    benchmark::DoNotOptimize(gw.data());
  }
}

}  // namespace

BENCHMARK(BM_gemm<false>)->Name("gemm/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_gemm<true>)->Name("gemm/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_conv_forward<false>)->Name("conv_forward/serial")->DenseRange(0, 3);
BENCHMARK(BM_conv_forward<true>)->Name("conv_forward/parallel")->DenseRange(0, 3);
BENCHMARK(BM_conv_adjoint<false>)->Name("conv_adjoint/serial")->DenseRange(0, 3);
BENCHMARK(BM_conv_adjoint<true>)->Name("conv_adjoint/parallel")->DenseRange(0, 3);
BENCHMARK(BM_conv_weight_grad<false>)->Name("conv_weight_grad/serial")->DenseRange(0, 3);
BENCHMARK(BM_conv_weight_grad<true>)->Name("conv_weight_grad/parallel")->DenseRange(0, 3);

BENCHMARK_MAIN();
