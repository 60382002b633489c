#pragma once

#include <string>

#include "radmaxlab/hodge.hpp"

namespace radmaxlab::ops {

/// L = -div A grad on scalar fields.
struct KatoOperator {
  Shape shape;
  std::vector<CMat> A;
  OperatorHandle grad, L;
  double lambda = 0.0;  // min over cells of the smallest eigenvalue of Re A
  double Lambda = 0.0;  // max over cells of ||A||
};

KatoOperator kato_operator(const Shape& s, std::vector<CMat> A);
/// Scalar coefficient a(x) (n = 1) or a(x) I (n = 2).
KatoOperator kato_operator_scalar(const Shape& s, const RVec& a);

enum class SqrtMethod { dense_schur, resolvent_quadrature, sign_of_PiB };
std::string to_string(SqrtMethod m);
SqrtMethod parse_sqrt_method(const std::string& s);

struct SqrtOptions {
  int nodes_per_decade = 40;
  /// Quadrature covers t sqrt(l) in [10^-margin, 10^margin] over the spectral range of L.
  double margin_decades = 3.0;
  double solver_tol = 1e-11;
  std::int64_t dense_limit = 4096;
  double truncation_tol = 1e-6;
};

struct SqrtResult {
  CMat value;
  SqrtMethod method = SqrtMethod::dense_schur;
  int nodes = 0;
  double truncation_estimate = 0.0;
  std::string warning;
};

/// sqrt(L) u for a scalar field u (cells x batch).
SqrtResult sqrt_L(const KatoOperator& k, const CMat& u, SqrtMethod method, const SqrtOptions& opts = {});

/// a(x) i.i.d. uniform in [lambda, Lambda], one value per cell.
RVec random_coefficient(const Shape& s, double lambda, double Lambda, const RandomSource& rng);

/// Real symmetric matrices U diag(a, b) U^T with a random rotation U and
/// a, b uniform in [lambda, Lambda]; for n = 1 the same as random_coefficient.
std::vector<CMat> random_matrix_field(const Shape& s, double lambda, double Lambda, const RandomSource& rng);

/// Both A1 and A2 rough: A1 = a1(x), A2 = random_matrix_field.
HodgeDiracConfig rough_config(const Shape& s, double lambda, double Lambda, const RandomSource& rng);

/// rows x cols matrix of standard complex Gaussians; entry (r, c) comes from engine(c * rows + r).
CMat gaussian_field(std::int64_t rows, std::int64_t cols, const RandomSource& rng);

/// (int |f(x)|^p dx)^{1/p} over the unit torus with |.| Euclidean over
/// components and columns; rows are comp * cells + cell.
double field_lp_norm(const CMat& field, std::int64_t cells, double p);

}  // namespace radmaxlab::ops
