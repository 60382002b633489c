#pragma once

#include <functional>
#include <string>

#include "radmaxlab/hodge.hpp"

namespace radmaxlab::ops {

using ScalarFn = std::function<cplx(cplx)>;

/// f(Pi) u frequency by frequency through the odd/even split:
/// f_o(zeta) Pi/zeta + [f_e(zeta) - f(0)] Pi^2/zeta^2 + f(0) I, zeta = 2 pi |xi|.
/// u has N = 1 + n components.
CMat functional_calculus_pi(const Shape& s, const ScalarFn& f, const CMat& u);

struct ContourSpec {
  double omega = kPi / 4;
  int nodes_per_decade = 40;
  double r_min = 1e-10;
  double r_max = 1e10;
  /// Always factor the dense matrix, even for Fourier multipliers.
  bool force_dense = false;
  double truncation_tol = 1e-8;
};

struct ContourResult {
  CMat value;
  int nodes = 0;
  /// Size of the log-radius integrand at the truncation radii, relative to ||u||.
  double truncation_estimate = 0.0;
  std::string warning;
};

/// psi(A) u = (1 / 2 pi i) int over the boundary of the bisector S_omega of
/// psi(lambda) (lambda - A)^{-1} u, boundary oriented anticlockwise around
/// each sector; trapezoid rule in log r on each of the four rays.
ContourResult contour_calculus(const OperatorHandle& A, const ScalarFn& psi, const ContourSpec& spec,
                               const CMat& u);

}  // namespace radmaxlab::ops
