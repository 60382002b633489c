#include "radmaxlab/kato.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace radmaxlab::ops {

namespace {

struct Grid1D {
  std::vector<double> t, w;
  double t_lo = 0.0, t_hi = 0.0;
  /// Relative error of the two analytic tails, mode by mode.
  double tail = 0.0;
};

// Trapezoid nodes in log t covering the spectral window of L.
Grid1D log_grid(double l_min, double l_max, const SqrtOptions& o) {
  if (o.nodes_per_decade < 4) throw InvalidInput("need at least 4 nodes per decade");
  const double m = std::pow(10.0, o.margin_decades);
  Grid1D g;
  g.t_lo = 1.0 / (m * std::sqrt(l_max));
  g.t_hi = m / std::sqrt(l_min);
  g.tail = 1.0 / (3.0 * m * m * m);
  const double decades = std::log10(g.t_hi / g.t_lo);
  const int count = std::max(2, static_cast<int>(std::ceil(decades * o.nodes_per_decade)) + 1);
  const double ds = std::log(g.t_hi / g.t_lo) / (count - 1);
  for (int j = 0; j < count; ++j) {
    g.t.push_back(g.t_lo * std::exp(j * ds));
    g.w.push_back((j == 0 || j == count - 1 ? 0.5 : 1.0) * ds);
  }
  return g;
}

CMat remove_mean(const CMat& u) {
  CMat out = u;
  for (Eigen::Index c = 0; c < u.cols(); ++c) out.col(c).array() -= u.col(c).mean();
  return out;
}

std::pair<double, double> spectral_window(const KatoOperator& k) {
  const Shape& s = k.shape;
  const double zmin = 2.0 * kPi;
  double zmax = 0.0;
  for (std::int64_t b = 0; b < s.cells(); ++b) zmax = std::max(zmax, spectral::zeta(s, b));
  zmax = std::max(zmax, zmin);
  return {k.lambda * zmin * zmin, k.Lambda * zmax * zmax};
}

CMat sqrt_dense(const KatoOperator& k, const CMat& u, const SqrtOptions& o) {
  const std::int64_t cells = k.shape.cells();
  if (cells > o.dense_limit) throw ResourceError("dense square root needs cells <= " + std::to_string(o.dense_limit));
  const CMat L = k.L.dense();
  const double scale = std::max(L.norm(), 1.0);
  if ((L - L.adjoint()).norm() <= 1e-12 * scale) {
    if (L.imag().norm() <= 1e-12 * scale) {
      const Eigen::MatrixXd Lr = 0.5 * (L.real() + L.real().transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Lr);
      const RVec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
      const Eigen::MatrixXd& V = es.eigenvectors();
      const CMat Vc = V.cast<cplx>();
      return Vc * (ev.cast<cplx>().asDiagonal() * (Vc.adjoint() * u));
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (L + L.adjoint()));
    const RVec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const CMat& V = es.eigenvectors();
    return V * (ev.cast<cplx>().asDiagonal() * (V.adjoint() * u));
  }
  const CMat root = L.sqrt();
  if (!root.allFinite()) throw ResolventFailure("matrix square root failed");
  return root * u;
}

SqrtResult sqrt_quadrature(const KatoOperator& k, const CMat& u, const SqrtOptions& o) {
  const auto [l_min, l_max] = spectral_window(k);
  const Grid1D g = log_grid(l_min, l_max, o);
  const Shape& s = k.shape;
  const double c = std::sqrt(k.lambda * k.Lambda);
  const OperatorHandle base = scaled(-c, multiplier(s, spectral::laplacian_symbol(s)));
  const bool dense = s.cells() <= 256;
  CMat acc = CMat::Zero(u.rows(), u.cols());
  for (std::size_t j = 0; j < g.t.size(); ++j) {
    const double t = g.t[j];
    CMat v;
    if (dense) {
      SolveOptions so;
      so.method = SolveMethod::dense;
      v = resolvent(k.L, t * t, ResolventStyle::shift, so).apply(u);
    } else {
      // left preconditioned by the constant-coefficient resolvent
      const OperatorHandle M = resolvent(base, t * t, ResolventStyle::shift);
      const auto A = [&](const CMat& x) -> CMat { return M.apply(x + t * t * k.L.apply(x)); };
      const auto id = [](const CMat& x) -> CMat { return x; };
      v = gmres(A, id, M.apply(u), o.solver_tol, 60, 3000);
    }
    acc += g.w[j] * (t * k.L.apply(v));
  }
  acc += g.t_lo * k.L.apply(u) + remove_mean(u) / g.t_hi;
  SqrtResult r;
  r.value = (2.0 / kPi) * acc;
  r.method = SqrtMethod::resolvent_quadrature;
  r.nodes = static_cast<int>(g.t.size());
  r.truncation_estimate = g.tail;
  return r;
}

SqrtResult sqrt_sign(const KatoOperator& k, const CMat& u, const SqrtOptions& o) {
  const Shape& s = k.shape;
  const std::int64_t cells = s.cells();
  const HodgeDirac h = hodge_dirac(HodgeDiracConfig::elliptic(s, k.A));
  if ((1 + s.n) * cells > o.dense_limit) throw ResourceError("sign_of_PiB uses dense resolvents");
  CMat x = CMat::Zero((1 + s.n) * cells, u.cols());
  x.bottomRows(s.n * cells) = k.grad.apply(u);
  const auto [l_min, l_max] = spectral_window(k);
  const Grid1D g = log_grid(l_min, l_max, o);
  CMat acc = CMat::Zero(x.rows(), x.cols());
  SolveOptions so;
  so.method = SolveMethod::dense;
  for (std::size_t j = 0; j < g.t.size(); ++j) {
    acc += g.w[j] * resolvent(h.PiB, g.t[j], ResolventStyle::Q, so).apply(x);
  }
  // tails: Q_t ~ t Pi_B near 0 and ~ (t Pi_B)^{-1} at infinity, Pi_B^{-1} x = (u - mean, 0)
  acc += g.t_lo * h.PiB.apply(x);
  acc.topRows(cells) += remove_mean(u) / g.t_hi;
  SqrtResult r;
  r.value = (2.0 / kPi) * acc.topRows(cells);
  r.method = SqrtMethod::sign_of_PiB;
  r.nodes = static_cast<int>(g.t.size());
  r.truncation_estimate = g.tail;
  return r;
}

}  // namespace

KatoOperator kato_operator(const Shape& s, std::vector<CMat> A) {
  if (static_cast<std::int64_t>(A.size()) != s.cells()) throw InvalidInput("coefficient field size does not match grid");
  KatoOperator k;
  k.shape = s;
  k.lambda = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < A.size(); ++c) {
    if (A[c].rows() != s.n || A[c].cols() != s.n)
      throw InvalidInput("coefficient matrix shape mismatch at cell " + std::to_string(c));
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (A[c] + A[c].adjoint()), Eigen::EigenvaluesOnly);
    k.lambda = std::min(k.lambda, es.eigenvalues().minCoeff());
    Eigen::JacobiSVD<CMat> svd(A[c]);
    k.Lambda = std::max(k.Lambda, svd.singularValues()[0]);
  }
  if (!(k.lambda > 0.0)) throw InvalidInput("coefficients are not accretive");
  k.A = std::move(A);
  k.grad = multiplier(s, spectral::gradient_symbol(s));
  const OperatorHandle div = multiplier(s, spectral::divergence_symbol(s));
  k.L = scaled(-1.0, compose({div, pointwise(s, k.A), k.grad}));
  return k;
}

KatoOperator kato_operator_scalar(const Shape& s, const RVec& a) {
  if (a.size() != s.cells()) throw InvalidInput("coefficient field size does not match grid");
  std::vector<CMat> A(static_cast<std::size_t>(a.size()));
  for (Eigen::Index c = 0; c < a.size(); ++c) A[static_cast<std::size_t>(c)] = a[c] * CMat::Identity(s.n, s.n);
  return kato_operator(s, std::move(A));
}

std::string to_string(SqrtMethod m) {
  switch (m) {
    case SqrtMethod::dense_schur: return "dense_schur";
    case SqrtMethod::resolvent_quadrature: return "resolvent_quadrature";
    case SqrtMethod::sign_of_PiB: return "sign_of_PiB";
  }
  return "?";
}

SqrtMethod parse_sqrt_method(const std::string& s) {
  if (s == "dense_schur") return SqrtMethod::dense_schur;
  if (s == "resolvent_quadrature") return SqrtMethod::resolvent_quadrature;
  if (s == "sign_of_PiB") return SqrtMethod::sign_of_PiB;
  throw InvalidInput("unknown square root method: " + s);
}

SqrtResult sqrt_L(const KatoOperator& k, const CMat& u, SqrtMethod method, const SqrtOptions& opts) {
  if (u.rows() != k.shape.cells()) throw InvalidInput("sqrt_L expects a scalar field");
  SqrtResult r;
  switch (method) {
    case SqrtMethod::dense_schur:
      r.value = sqrt_dense(k, u, opts);
      r.method = method;
      return r;
    case SqrtMethod::resolvent_quadrature: r = sqrt_quadrature(k, u, opts); break;
    case SqrtMethod::sign_of_PiB: r = sqrt_sign(k, u, opts); break;
  }
  if (r.truncation_estimate > opts.truncation_tol)
    r.warning = "quadrature truncation estimate " + std::to_string(r.truncation_estimate) + " exceeds tolerance";
  return r;
}

RVec random_coefficient(const Shape& s, double lambda, double Lambda, const RandomSource& rng) {
  if (!(lambda > 0.0) || !(Lambda >= lambda)) throw InvalidInput("need 0 < lambda <= Lambda");
  RVec a(s.cells());
  for (Eigen::Index c = 0; c < a.size(); ++c) a[c] = lambda + (Lambda - lambda) * rng.engine(static_cast<std::uint64_t>(c)).uniform();
  return a;
}

std::vector<CMat> random_matrix_field(const Shape& s, double lambda, double Lambda, const RandomSource& rng) {
  if (!(lambda > 0.0) || !(Lambda >= lambda)) throw InvalidInput("need 0 < lambda <= Lambda");
  std::vector<CMat> A(static_cast<std::size_t>(s.cells()));
  for (std::size_t c = 0; c < A.size(); ++c) {
    CounterRng e = rng.engine(c);
    const double a = lambda + (Lambda - lambda) * e.uniform();
    if (s.n == 1) {
      A[c] = CMat::Constant(1, 1, a);
      continue;
    }
    const double b = lambda + (Lambda - lambda) * e.uniform();
    const double th = 2.0 * kPi * e.uniform();
    Eigen::Matrix2d U;
    U << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const Eigen::Matrix2d M = U * Eigen::Vector2d(a, b).asDiagonal() * U.transpose();
    A[c] = M.cast<cplx>();
  }
  return A;
}

HodgeDiracConfig rough_config(const Shape& s, double lambda, double Lambda, const RandomSource& rng) {
  HodgeDiracConfig cfg;
  cfg.shape = s;
  const RVec a1 = random_coefficient(s, lambda, Lambda, rng.substream(1));
  cfg.A1.resize(static_cast<std::size_t>(s.cells()));
  for (std::size_t c = 0; c < cfg.A1.size(); ++c) cfg.A1[c] = CMat::Constant(1, 1, a1[static_cast<Eigen::Index>(c)]);
  cfg.A2 = random_matrix_field(s, lambda, Lambda, rng.substream(2));
  return cfg;
}

CMat gaussian_field(std::int64_t rows, std::int64_t cols, const RandomSource& rng) {
  CMat u(rows, cols);
  for (std::int64_t c = 0; c < cols; ++c)
    for (std::int64_t r = 0; r < rows; ++r) {
      CounterRng e = rng.engine(static_cast<std::uint64_t>(c * rows + r));
      u(r, c) = cplx(e.normal(), e.normal()) / std::sqrt(2.0);
    }
  return u;
}

double field_lp_norm(const CMat& field, std::int64_t cells, double p) {
  if (!(p >= 1.0)) throw InvalidInput("p must be at least 1");
  if (cells <= 0 || field.rows() % cells != 0) throw InvalidInput("field rows are not a multiple of cells");
  RVec pt = RVec::Zero(cells);
  for (Eigen::Index r = 0; r < field.rows(); ++r) pt[r % cells] += field.row(r).squaredNorm();
  pt = pt.cwiseSqrt();
  if (std::isinf(p)) return pt.maxCoeff();
  const double m = pt.maxCoeff();
  if (m == 0.0) return 0.0;
  return m * std::pow((pt / m).array().pow(p).sum() / static_cast<double>(cells), 1.0 / p);
}

}  // namespace radmaxlab::ops
