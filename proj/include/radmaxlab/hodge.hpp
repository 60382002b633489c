#pragma once

#include "radmaxlab/operator.hpp"

namespace radmaxlab::ops {

/// D = grad, D* = -div, so n1 = 1 and n2 = n; fields have N = 1 + n
/// components. A1 is 1 x 1 and A2 is n x n per cell.
struct HodgeDiracConfig {
  Shape shape;
  std::vector<CMat> A1;
  std::vector<CMat> A2;

  int n1() const { return 1; }
  int n2() const { return shape.n; }
  int N() const { return 1 + shape.n; }

  /// A1 = A2 = I.
  static HodgeDiracConfig unperturbed(const Shape& s);
  /// A1 = I, A2 = A: the configuration behind L = -div A grad.
  static HodgeDiracConfig elliptic(const Shape& s, std::vector<CMat> A);
  /// Checks shapes and that A_i, A_i^{-1} are finite at every cell; returns
  /// max_x ||A_i(x)|| + ||A_i(x)^{-1}||.
  double validate() const;
};

struct HodgeDirac {
  OperatorHandle Gamma, GammaStar, B1, B2;
  OperatorHandle Pi;        // Gamma + Gamma*
  OperatorHandle PiB;       // Gamma + B1 Gamma* B2
  OperatorHandle PiBStar;   // Gamma* + B2 Gamma B1
};

HodgeDirac hodge_dirac(const HodgeDiracConfig& cfg);

/// Largest per-frequency deviation ||D D* D + Delta D||.
double dd_star_defect(const Shape& s);

struct ResolventSet {
  OperatorHandle R, Rminus, P, Q;
};

/// Independently factored R_t, R_{-t}, P_t and Q_t for the given operator.
/// For a perturbed operator the unperturbed resolvent of Pi (same style and
/// t) is used as preconditioner when the iterative path is taken.
ResolventSet resolvents(const OperatorHandle& op, double t, SolveOptions opts = {},
                        const OperatorHandle& unperturbed = {});

/// The canonical family P_t = (I - t^2 Delta)^{-1}, Q_t = t grad P_t,
/// Q_t* = -t P_t div.
struct PoissonFamily {
  OperatorHandle P, Q, Qstar;
};
PoissonFamily poisson_family(const Shape& s, double t);

/// Three-way split of u: the kernel part u0 = lim P_t^B u (taken at a large
/// t through (R_t + R_{-t}) / 2), the range(Gamma) part (second block of
/// u - u0) and the range(B1 Gamma* B2) part (first block).
struct HodgeSplit {
  CMat kernel, gamma_part, gamma_star_part;
};
HodgeSplit hodge_split(const HodgeDirac& h, const CMat& u, double t_large = 1e4);

}  // namespace radmaxlab::ops
