#include "radmaxlab/calculus.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>

namespace radmaxlab::ops {

namespace {

cplx checked(const ScalarFn& f, cplx z) {
  const cplx v = f(z);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    std::ostringstream os;
    os << "function is not finite at " << z;
    throw InvalidInput(os.str());
  }
  return v;
}

}  // namespace

CMat functional_calculus_pi(const Shape& s, const ScalarFn& f, const CMat& u) {
  const int N = 1 + s.n;
  const std::int64_t cells = s.cells();
  if (u.rows() != N * cells) throw InvalidInput("field does not have 1 + n components");
  const HodgeDirac h = hodge_dirac(HodgeDiracConfig::unperturbed(s));
  const Symbol pi = *h.Pi.symbol();
  const cplx f0 = checked(f, 0.0);
  Symbol out(pi.size());
  for (std::size_t b = 0; b < pi.size(); ++b) {
    const double z = spectral::zeta(s, static_cast<std::int64_t>(b));
    const CMat I = CMat::Identity(N, N);
    if (z == 0.0) {
      out[b] = f0 * I;
      continue;
    }
    const cplx fp = checked(f, z), fm = checked(f, -z);
    const cplx fo = 0.5 * (fp - fm), fe = 0.5 * (fp + fm);
    const CMat& p = pi[b];
    out[b] = fo * p / z + (fe - f0) * (p * p) / (z * z) + f0 * I;
  }
  return apply_symbol(out, N, N, s, u);
}

ContourResult contour_calculus(const OperatorHandle& A, const ScalarFn& psi, const ContourSpec& spec,
                               const CMat& u) {
  if (!(spec.omega > 0.0 && spec.omega < kPi / 2)) throw InvalidInput("contour angle must lie in (0, pi/2)");
  if (!(spec.r_min > 0.0) || !(spec.r_max > spec.r_min)) throw InvalidInput("invalid contour radii");
  if (spec.nodes_per_decade < 4) throw InvalidInput("need at least 4 nodes per decade");
  if (A.in_comps() != A.out_comps()) throw InvalidInput("contour calculus needs a square operator");
  const int N = A.in_comps();
  const Shape& s = A.shape();
  const std::int64_t cells = s.cells();

  std::optional<Symbol> sym;
  if (!spec.force_dense) sym = A.symbol();
  CMat dense_A;
  CMat u_hat;
  if (sym) {
    u_hat = u;
    spectral::fft(u_hat, s, false);
  } else {
    dense_A = A.dense();
  }

  const double decades = std::log10(spec.r_max / spec.r_min);
  const int m = std::max(2, static_cast<int>(std::ceil(decades * spec.nodes_per_decade)) + 1);
  const double ds = std::log(spec.r_max / spec.r_min) / (m - 1);
  const double angles[4] = {-spec.omega, kPi - spec.omega, spec.omega, kPi + spec.omega};
  const double orient[4] = {1.0, 1.0, -1.0, -1.0};

  CMat acc = CMat::Zero(u.rows(), u.cols());
  const double unorm = std::max(u.norm(), 1e-300);
  double tail = 0.0;
  for (int ray = 0; ray < 4; ++ray) {
    const cplx dir = std::polar(1.0, angles[ray]);
    for (int j = 0; j < m; ++j) {
      const double r = spec.r_min * std::exp(j * ds);
      const cplx lambda = r * dir;
      const cplx w = (j == 0 || j == m - 1 ? 0.5 : 1.0) * ds * orient[ray] * psi(lambda) * dir * r;
      if (w == 0.0) continue;
      CMat res;
      if (sym) {
        CMat r_hat = CMat::Zero(u.rows(), u.cols());
        for (std::int64_t b = 0; b < cells; ++b) {
          const CMat sysm = lambda * CMat::Identity(N, N) - (*sym)[static_cast<std::size_t>(b)];
          Eigen::PartialPivLU<CMat> lu(sysm);
          CMat rhs(N, u.cols());
          for (int k = 0; k < N; ++k) rhs.row(k) = u_hat.row(k * cells + b);
          const CMat x = lu.solve(rhs);
          if (!x.allFinite()) {
            std::ostringstream os;
            os << "resolvent failure at lambda = " << lambda;
            throw ResolventFailure(os.str());
          }
          for (int k = 0; k < N; ++k) r_hat.row(k * cells + b) = x.row(k);
        }
        res = std::move(r_hat);
      } else {
        Eigen::PartialPivLU<CMat> lu(lambda * CMat::Identity(dense_A.rows(), dense_A.cols()) - dense_A);
        if (!(lu.rcond() > 1e-15)) {
          std::ostringstream os;
          os << "resolvent failure at lambda = " << lambda;
          throw ResolventFailure(os.str());
        }
        res = lu.solve(u);
      }
      if (j == 0 || j == m - 1) tail = std::max(tail, std::abs(psi(lambda)) * r * res.norm() / unorm);
      acc += w * res;
    }
  }
  if (sym) spectral::fft(acc, s, true);
  ContourResult out;
  out.value = acc / cplx(0.0, 2.0 * kPi);
  out.nodes = 4 * m;
  out.truncation_estimate = tail;
  if (tail > spec.truncation_tol) {
    std::ostringstream os;
    os << "contour truncation estimate " << tail << " exceeds " << spec.truncation_tol;
    out.warning = os.str();
  }
  return out;
}

}  // namespace radmaxlab::ops
