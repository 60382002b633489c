#include "radmaxlab/hodge.hpp"

#include <algorithm>
#include <cmath>

namespace radmaxlab::ops {

HodgeDiracConfig HodgeDiracConfig::unperturbed(const Shape& s) {
  HodgeDiracConfig c;
  c.shape = s;
  c.A1.assign(static_cast<std::size_t>(s.cells()), CMat::Identity(1, 1));
  c.A2.assign(static_cast<std::size_t>(s.cells()), CMat::Identity(s.n, s.n));
  return c;
}

HodgeDiracConfig HodgeDiracConfig::elliptic(const Shape& s, std::vector<CMat> A) {
  HodgeDiracConfig c;
  c.shape = s;
  c.A1.assign(static_cast<std::size_t>(s.cells()), CMat::Identity(1, 1));
  c.A2 = std::move(A);
  return c;
}

double HodgeDiracConfig::validate() const {
  const auto cells = static_cast<std::size_t>(shape.cells());
  if (A1.size() != cells || A2.size() != cells) throw InvalidInput("coefficient field size does not match grid");
  double worst = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    if (A1[c].rows() != n1() || A1[c].cols() != n1() || A2[c].rows() != n2() || A2[c].cols() != n2())
      throw InvalidInput("coefficient matrix shape mismatch at cell " + std::to_string(c));
    for (const CMat* a : {&A1[c], &A2[c]}) {
      Eigen::JacobiSVD<CMat> svd(*a);
      const RVec& s = svd.singularValues();
      const double smin = s[s.size() - 1];
      if (!(smin > 0.0) || !std::isfinite(s[0]))
        throw InvalidInput("coefficient is not invertible at cell " + std::to_string(c));
      worst = std::max(worst, s[0] + 1.0 / smin);
    }
  }
  return worst;
}

HodgeDirac hodge_dirac(const HodgeDiracConfig& cfg) {
  cfg.validate();
  const Shape& s = cfg.shape;
  const int n1 = cfg.n1(), n2 = cfg.n2();
  const auto cells = static_cast<std::size_t>(s.cells());
  const OperatorHandle grad = multiplier(s, spectral::gradient_symbol(s));
  const OperatorHandle mdiv = scaled(-1.0, multiplier(s, spectral::divergence_symbol(s)));
  HodgeDirac h;
  h.Gamma = block({n1, n2}, {n1, n2}, {{OperatorHandle(), OperatorHandle()}, {grad, OperatorHandle()}});
  h.GammaStar = block({n1, n2}, {n1, n2}, {{OperatorHandle(), mdiv}, {OperatorHandle(), OperatorHandle()}});
  std::vector<CMat> b1(cells), b2(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    b1[c] = CMat::Zero(n1 + n2, n1 + n2);
    b1[c].topLeftCorner(n1, n1) = cfg.A1[c];
    b2[c] = CMat::Zero(n1 + n2, n1 + n2);
    b2[c].bottomRightCorner(n2, n2) = cfg.A2[c];
  }
  h.B1 = pointwise(s, std::move(b1));
  h.B2 = pointwise(s, std::move(b2));
  h.Pi = add({h.Gamma, h.GammaStar});
  h.PiB = add({h.Gamma, compose({h.B1, h.GammaStar, h.B2})});
  h.PiBStar = add({h.GammaStar, compose({h.B2, h.Gamma, h.B1})});
  return h;
}

double dd_star_defect(const Shape& s) {
  const auto D = spectral::gradient_symbol(s);
  const auto lap = spectral::laplacian_symbol(s);
  double worst = 0.0;
  for (std::size_t b = 0; b < D.size(); ++b) {
    const CMat& d = D[b];
    const CMat lhs = d * d.adjoint() * d;
    const CMat rhs = -lap[b](0, 0) * d;
    worst = std::max(worst, (lhs - rhs).norm() / std::max(1.0, rhs.norm()));
  }
  return worst;
}

ResolventSet resolvents(const OperatorHandle& op, double t, SolveOptions opts, const OperatorHandle& unperturbed) {
  auto with_pc = [&](double tt, ResolventStyle style) {
    SolveOptions o = opts;
    if (unperturbed && !o.preconditioner) o.preconditioner =
          resolvent(unperturbed, tt, style == ResolventStyle::Q ? ResolventStyle::P : style);
    return resolvent(op, tt, style, o);
  };
  ResolventSet r;
  r.R = with_pc(t, ResolventStyle::R);
  r.Rminus = with_pc(-t, ResolventStyle::R);
  r.P = with_pc(t, ResolventStyle::P);
  r.Q = with_pc(t, ResolventStyle::Q);
  return r;
}

PoissonFamily poisson_family(const Shape& s, double t) {
  PoissonFamily f;
  f.P = multiplier(s, spectral::make_symbol(s, [t](const std::array<double, 2>& x) {
    CMat m(1, 1);
    m(0, 0) = 1.0 / (1.0 + t * t * (x[0] * x[0] + x[1] * x[1]));
    return m;
  }));
  f.Q = multiplier(s, spectral::make_symbol(s, [t, n = s.n](const std::array<double, 2>& x) {
    const double p = 1.0 / (1.0 + t * t * (x[0] * x[0] + x[1] * x[1]));
    CMat m(n, 1);
    for (int d = 0; d < n; ++d) m(d, 0) = cplx(0.0, t * x[d] * p);
    return m;
  }));
  f.Qstar = multiplier(s, spectral::make_symbol(s, [t, n = s.n](const std::array<double, 2>& x) {
    const double p = 1.0 / (1.0 + t * t * (x[0] * x[0] + x[1] * x[1]));
    CMat m(1, n);
    for (int d = 0; d < n; ++d) m(0, d) = cplx(0.0, -t * x[d] * p);
    return m;
  }));
  return f;
}

HodgeSplit hodge_split(const HodgeDirac& h, const CMat& u, double t_large) {
  const Shape& s = h.PiB.shape();
  const std::int64_t cells = s.cells();
  const OperatorHandle Rp = resolvent(h.PiB, t_large, ResolventStyle::R);
  const OperatorHandle Rm = resolvent(h.PiB, -t_large, ResolventStyle::R);
  HodgeSplit out;
  out.kernel = 0.5 * (Rp.apply(u) + Rm.apply(u));
  const CMat rest = u - out.kernel;
  out.gamma_part = CMat::Zero(u.rows(), u.cols());
  out.gamma_star_part = CMat::Zero(u.rows(), u.cols());
  out.gamma_star_part.topRows(cells) = rest.topRows(cells);
  out.gamma_part.bottomRows(rest.rows() - cells) = rest.bottomRows(rest.rows() - cells);
  return out;
}

}  // namespace radmaxlab::ops
