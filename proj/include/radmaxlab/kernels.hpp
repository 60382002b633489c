#pragma once

// Inner loops of the randomized-norm machinery. Each kernel has a plain
// serial reference and an OpenMP version; the library calls the parallel
// one, the tests check it against the reference, and bench/ times both.

#include <cstdint>
#include <span>

#include "radmaxlab/banach_space.hpp"

namespace radmaxlab::kernels {

/// Mean of ||sum_k eps_k x_k||^p over all sign patterns. eps_0 is pinned to
/// +1 (the norm is even), so 2^{K-1} patterns are visited.
double sign_moment_serial(const banach::NormFn& norm, std::span<const CVec> xs, double p);
double sign_moment_parallel(const banach::NormFn& norm, std::span<const CVec> xs, double p);

enum class Coefficients { rademacher, gaussian };

struct McMoment {
  double mean = 0.0;      // sample mean of ||S||^p
  double variance = 0.0;  // unbiased sample variance of ||S||^p
};

/// Monte Carlo estimate of E||sum_k c_k x_k||^p; sample s draws its
/// coefficients from rng.engine(s).
McMoment mc_moment_serial(const banach::NormFn& norm, std::span<const CVec> xs, double p,
                          const RandomSource& rng, std::int64_t samples,
                          Coefficients coeffs);
McMoment mc_moment_parallel(const banach::NormFn& norm, std::span<const CVec> xs, double p,
                            const RandomSource& rng, std::int64_t samples,
                            Coefficients coeffs);

}  // namespace radmaxlab::kernels
