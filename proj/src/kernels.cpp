#include "radmaxlab/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include "radmaxlab/parallel.hpp"

namespace radmaxlab::kernels {

namespace {

double power(double v, double p) { return p == 1.0 ? v : std::pow(v, p); }

// Gray-code walks are restarted from scratch every kBlock patterns; the
// partial sums are combined in block order so the result does not depend
// on the thread count.
constexpr std::int64_t kBlock = 256;

double block_sum(const banach::NormFn& norm, std::span<const CVec> xs, double p,
                 std::int64_t first, std::int64_t count) {
  const int free_terms = static_cast<int>(xs.size()) - 1;
  auto gray = [](std::int64_t i) { return i ^ (i >> 1); };

  CVec s = xs[0];
  const std::int64_t g0 = gray(first);
  for (int j = 0; j < free_terms; ++j) {
    if ((g0 >> j) & 1) s -= xs[j + 1];
    else s += xs[j + 1];
  }
  double acc = power(norm(std::span<const cplx>(s.data(), s.size())), p);
  for (std::int64_t i = first + 1; i < first + count; ++i) {
    const int bit = std::countr_zero(static_cast<std::uint64_t>(i));
    if ((gray(i) >> bit) & 1) s -= 2.0 * xs[bit + 1];
    else s += 2.0 * xs[bit + 1];
    acc += power(norm(std::span<const cplx>(s.data(), s.size())), p);
  }
  return acc;
}

void draw_sum(CVec& s, std::span<const CVec> xs, CounterRng& g, Coefficients coeffs) {
  s.setZero();
  for (const auto& x : xs) {
    const double c = coeffs == Coefficients::rademacher ? g.sign() : g.normal();
    s += c * x;
  }
}

}  // namespace

double sign_moment_serial(const banach::NormFn& norm, std::span<const CVec> xs, double p) {
  if (xs.empty()) return 0.0;
  const int free_terms = static_cast<int>(xs.size()) - 1;
  const std::int64_t patterns = std::int64_t{1} << free_terms;
  double acc = 0.0;
  CVec s(xs[0].size());
  for (std::int64_t pattern = 0; pattern < patterns; ++pattern) {
    s = xs[0];
    for (int j = 0; j < free_terms; ++j) {
      if ((pattern >> j) & 1) s -= xs[j + 1];
      else s += xs[j + 1];
    }
    acc += power(norm(std::span<const cplx>(s.data(), s.size())), p);
  }
  return acc / static_cast<double>(patterns);
}

double sign_moment_parallel(const banach::NormFn& norm, std::span<const CVec> xs, double p) {
  if (xs.empty()) return 0.0;
  const int free_terms = static_cast<int>(xs.size()) - 1;
  const std::int64_t patterns = std::int64_t{1} << free_terms;
  const std::int64_t block = std::min(patterns, kBlock);
  const std::int64_t blocks = patterns / block;
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
  parallel_for(blocks, [&](std::int64_t b) {
    partial[static_cast<std::size_t>(b)] = block_sum(norm, xs, p, b * block, block);
  });
  double acc = 0.0;
  for (double v : partial) acc += v;
  return acc / static_cast<double>(patterns);
}

McMoment mc_moment_serial(const banach::NormFn& norm, std::span<const CVec> xs, double p,
                          const RandomSource& rng, std::int64_t samples,
                          Coefficients coeffs) {
  McMoment out;
  if (xs.empty() || samples < 1) return out;
  CVec s(xs[0].size());
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    CounterRng g = rng.engine(static_cast<std::uint64_t>(i));
    draw_sum(s, xs, g, coeffs);
    const double v = power(norm(std::span<const cplx>(s.data(), s.size())), p);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(samples);
  out.mean = sum / n;
  out.variance = samples > 1 ? std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1.0)) : 0.0;
  return out;
}

McMoment mc_moment_parallel(const banach::NormFn& norm, std::span<const CVec> xs, double p,
                            const RandomSource& rng, std::int64_t samples,
                            Coefficients coeffs) {
  McMoment out;
  if (xs.empty() || samples < 1) return out;
  const std::int64_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<double> sums(static_cast<std::size_t>(blocks)), sq(static_cast<std::size_t>(blocks));
  parallel_for(blocks, [&](std::int64_t b) {
    CVec s(xs[0].size());
    double a = 0.0, a2 = 0.0;
    const std::int64_t end = std::min(samples, (b + 1) * kBlock);
    for (std::int64_t i = b * kBlock; i < end; ++i) {
      CounterRng g = rng.engine(static_cast<std::uint64_t>(i));
      draw_sum(s, xs, g, coeffs);
      const double v = power(norm(std::span<const cplx>(s.data(), s.size())), p);
      a += v;
      a2 += v * v;
    }
    sums[static_cast<std::size_t>(b)] = a;
    sq[static_cast<std::size_t>(b)] = a2;
  });
  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t b = 0; b < blocks; ++b) {
    sum += sums[static_cast<std::size_t>(b)];
    sum_sq += sq[static_cast<std::size_t>(b)];
  }
  const double n = static_cast<double>(samples);
  out.mean = sum / n;
  out.variance = samples > 1 ? std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1.0)) : 0.0;
  return out;
}

}  // namespace radmaxlab::kernels
