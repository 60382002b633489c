#include "radmaxlab/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "radmaxlab/hodge.hpp"

namespace radmaxlab::ops {

namespace {

double spectral_norm(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()[0];
}

}  // namespace

double sup_norm(const std::vector<CMat>& K) {
  double s = 0.0;
  for (const auto& k : K) s = std::max(s, spectral_norm(k));
  return s;
}

EllipticNormalization ellipticity_normalize(const std::vector<CMat>& A, double lambda, double Lambda) {
  if (!(lambda > 0.0) || !(Lambda >= lambda)) throw InvalidInput("need 0 < lambda <= Lambda");
  if (A.empty()) throw InvalidInput("empty coefficient field");
  EllipticNormalization r;
  r.M = Lambda * Lambda / lambda;
  r.delta = lambda / 2.0;
  const double slack = 1e-12 * Lambda;
  r.K.reserve(A.size());
  for (std::size_t c = 0; c < A.size(); ++c) {
    const CMat& a = A[c];
    if (a.rows() != a.cols()) throw InvalidInput("coefficients must be square");
    const CMat herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(herm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < lambda - slack)
      throw InvalidInput("ellipticity lower bound fails at cell " + std::to_string(c));
    if (spectral_norm(a) > Lambda + slack)
      throw InvalidInput("ellipticity upper bound fails at cell " + std::to_string(c));
    const CMat I = CMat::Identity(a.rows(), a.cols());
    r.max_deviation = std::max(r.max_deviation, spectral_norm(r.M * I - a));
    r.K.push_back(a / r.M - I);
  }
  r.K_inf = sup_norm(r.K);
  if (r.max_deviation > r.M - r.delta + slack || !(r.K_inf < 1.0))
    throw InvalidInput("normalization failed: ||M I - A|| exceeds M - delta");
  return r;
}

EllipticNormalization inverse_normalize(const std::vector<CMat>& A, double lambda, double Lambda) {
  std::vector<CMat> inv;
  inv.reserve(A.size());
  for (const auto& a : A) inv.push_back(a.inverse());
  return ellipticity_normalize(inv, lambda / (Lambda * Lambda), 1.0 / lambda);
}

CMat neumann_resolvent(const Shape& s, double t, const std::vector<CMat>& K, const CMat& u, double tol, int* terms) {
  if (s.n != 1) throw InvalidInput("the Neumann series resolvent is implemented for n = 1");
  if (!(tol > 0.0)) throw InvalidInput("tolerance must be positive");
  const double k = sup_norm(K);
  if (!(k < 1.0)) throw DivergenceError("Neumann series needs ||K|| < 1");
  const OperatorHandle P = poisson_family(s, t).P;
  const OperatorHandle PK = compose({P, pointwise(s, K)});
  CMat term = u, sum = u;
  int count = 1;
  double bound = 1.0;
  while (k > 0.0 && bound * k / (1.0 - k) >= tol) {
    term = -PK.apply(term);
    sum += term;
    bound *= k;
    ++count;
  }
  if (terms) *terms = count;
  return sum;
}

}  // namespace radmaxlab::ops
