#pragma once

#include "radmaxlab/operator.hpp"

namespace radmaxlab::ops {

struct EllipticNormalization {
  double M = 0.0;
  double delta = 0.0;
  std::vector<CMat> K;       // A = M (I + K) cellwise
  double max_deviation = 0.0;  // max_x ||M I - A(x)||, must be <= M - delta
  double K_inf = 0.0;          // max_x ||K(x)||, must be < 1
};

/// Checks lambda |xi|^2 <= Re<A xi, xi> and ||A|| <= Lambda at every cell,
/// then sets M = Lambda^2 / lambda, delta = lambda / 2, K = A / M - I.
/// Throws InvalidInput naming the first offending cell.
EllipticNormalization ellipticity_normalize(const std::vector<CMat>& A, double lambda, double Lambda);

/// The same normalization applied to A^{-1}, which is elliptic with
/// constants (lambda / Lambda^2, 1 / lambda); gives A^{-1} = M (I + K).
EllipticNormalization inverse_normalize(const std::vector<CMat>& A, double lambda, double Lambda);

/// Largest ||K(x)|| over cells (spectral norm).
double sup_norm(const std::vector<CMat>& K);

/// (I + P_t K)^{-1} u by the Neumann series sum_k (-P_t K)^k u, n = 1,
/// truncated once ||K||^k / (1 - ||K||) < tol. terms, when given, receives
/// the number of terms summed.
CMat neumann_resolvent(const Shape& s, double t, const std::vector<CMat>& K, const CMat& u, double tol,
                       int* terms = nullptr);

}  // namespace radmaxlab::ops
