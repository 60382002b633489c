// Serial vs OpenMP timings of the sign-enumeration and Monte Carlo kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "radmaxlab/kernels.hpp"
#include "radmaxlab/kato.hpp"

using namespace radmaxlab;

namespace {

std::vector<CVec> terms(int K, int d) {
  const CMat g = ops::gaussian_field(d, K, RandomSource{7, 0});
  std::vector<CVec> xs;
  for (int k = 0; k < K; ++k) xs.push_back(g.col(k));
  return xs;
}

const banach::NormFn& lq_norm() {
  static const banach::NormFn f = banach::norm_fn(banach::SpaceDescriptor::lebesgue(1.5, 16));
  return f;
}

void BM_sign_moment_serial(benchmark::State& st) {
  const auto xs = terms(static_cast<int>(st.range(0)), 16);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::sign_moment_serial(lq_norm(), xs, 1.0));
  st.SetItemsProcessed(st.iterations() * (std::int64_t{1} << (st.range(0) - 1)));
}

void BM_sign_moment_parallel(benchmark::State& st) {
  const auto xs = terms(static_cast<int>(st.range(0)), 16);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::sign_moment_parallel(lq_norm(), xs, 1.0));
  st.SetItemsProcessed(st.iterations() * (std::int64_t{1} << (st.range(0) - 1)));
}

void BM_mc_moment_serial(benchmark::State& st) {
  const auto xs = terms(20, 16);
  for (auto _ : st)
    benchmark::DoNotOptimize(
        kernels::mc_moment_serial(lq_norm(), xs, 1.0, RandomSource{1, 0}, st.range(0), kernels::Coefficients::gaussian));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_mc_moment_parallel(benchmark::State& st) {
  const auto xs = terms(20, 16);
  for (auto _ : st)
    benchmark::DoNotOptimize(
        kernels::mc_moment_parallel(lq_norm(), xs, 1.0, RandomSource{1, 0}, st.range(0), kernels::Coefficients::gaussian));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_sign_moment_serial)->Arg(10)->Arg(14);
BENCHMARK(BM_sign_moment_parallel)->Arg(10)->Arg(14);
BENCHMARK(BM_mc_moment_serial)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK(BM_mc_moment_parallel)->Arg(1 << 12)->Arg(1 << 15);

BENCHMARK_MAIN();
