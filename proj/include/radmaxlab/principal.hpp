#pragma once

#include <vector>

#include "radmaxlab/banach_space.hpp"
#include "radmaxlab/hodge.hpp"

namespace radmaxlab::ops {

/// Dyadic averaging A_{2^k} on fields with comps components.
OperatorHandle averaging(const Shape& s, int comps, int k);

/// The L^p(X^N) norm of a field (rows comp * cells + cell, columns X
/// coordinates), as a norm on its column-major flattening.
banach::NormFn field_norm_fn(const Shape& s, int comps, const banach::SpaceDescriptor& X, double p);
double field_norm(const CMat& field, const Shape& s, int comps, const banach::SpaceDescriptor& X, double p);

/// gamma_{2^k}(x) w = sum over cubes Q of level k within `radius` cubes
/// (Chebyshev, periodic) of the cube of x of T(w 1_Q)(x). radius < 0 sums
/// over every cube, giving T applied to the constant w.
std::vector<CMat> principal_part(const OperatorHandle& T, int k, int radius = 8);

/// gamma applied as a pointwise operator after A_{2^k}.
OperatorHandle principal_term(const Shape& s, const std::vector<CMat>& gamma, int k);

struct OffDiagonalRow {
  double rho = 0.0;
  double ratio = 0.0;        // max over samples of ||1_E T 1_F u||_p / ||1_F u||_p
  double operator_norm = 0.0;  // ||1_E T 1_F||_{2 -> 2}, exact via SVD
  std::int64_t far_cells = 0;
};

/// F is the cube of level k at the origin, t = 2^k, E the cells whose
/// distance to F is at least rho t. Rows with E empty are dropped.
std::vector<OffDiagonalRow> off_diagonal_profile(const OperatorHandle& T, int k, const std::vector<double>& rho,
                                                 double p, const RandomSource& rng, int samples = 16);

/// Q^B_{2^k}, k = -J..0, for the perturbed operator (dense resolvents).
std::vector<OperatorHandle> quadratic_family(const HodgeDirac& h, int J, SolveOptions opts = {});

/// E||sum_k eps_k T_k u||_{L^p(X^N)}; exact enumeration over up to k_exact scales.
banach::NormEstimate quadratic_estimate(const std::vector<OperatorHandle>& family, const CMat& u,
                                        const banach::SpaceDescriptor& X, double p,
                                        const RandomSource& rng, const banach::AveragingOptions& opts = {});

}  // namespace radmaxlab::ops
