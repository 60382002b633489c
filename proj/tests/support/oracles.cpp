#include "oracles.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace oracle {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool in_cube(int n, int J, int level, const std::array<int, 2>& index, std::int64_t cell) {
  const int side = 1 << J;
  const int cps = 1 << (level + J);
  const int i0 = static_cast<int>(cell % side), i1 = static_cast<int>(cell / side);
  return i0 / cps == index[0] && (n == 1 || i1 / cps == index[1]);
}

}  // namespace

double lq_norm(const CVec& x, double q) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), q);
  return std::pow(s, 1.0 / q);
}

double schatten_norm(const CVec& x, int m, double q) {
  const CMat X = Eigen::Map<const CMat>(x.data(), m, m);
  Eigen::SelfAdjointEigenSolver<CMat> es(X.adjoint() * X, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) s += std::pow(std::sqrt(std::max(0.0, es.eigenvalues()[i])), q);
  return std::pow(s, 1.0 / q);
}

double rademacher_enum(const Norm& norm, const std::vector<CVec>& xs, double p) {
  if (xs.empty()) return 0.0;
  const std::size_t K = xs.size();
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << K); ++mask) {
    CVec s = CVec::Zero(xs[0].size());
    for (std::size_t k = 0; k < K; ++k) s += ((mask >> k) & 1 ? -1.0 : 1.0) * xs[k];
    total += std::pow(norm(s), p);
  }
  return std::pow(total / static_cast<double>(std::uint64_t{1} << K), 1.0 / p);
}

RVec dyadic_maximal(const radmaxlab::dyadic::GridFunction& u) {
  const auto& g = u.grid();
  const int n = g.n(), J = g.J(), side = g.side();
  RVec out = RVec::Zero(g.cells());
  for (std::int64_t c = 0; c < g.cells(); ++c) {
    const int i0 = static_cast<int>(c % side), i1 = static_cast<int>(c / side);
    for (int k = -J; k <= 0; ++k) {
      const int cps = 1 << (k + J);
      const std::array<int, 2> idx{i0 / cps, n == 2 ? i1 / cps : 0};
      cplx sum = 0.0;
      std::int64_t count = 0;
      for (std::int64_t d = 0; d < g.cells(); ++d)
        if (in_cube(n, J, k, idx, d)) {
          sum += u(d, 0, 0);
          ++count;
        }
      out[c] = std::max(out[c], std::abs(sum) / static_cast<double>(count));
    }
  }
  return out;
}

CMat derivative_matrix(int J) {
  const int N = 1 << J;
  CVec col(N);
  for (int j = 0; j < N; ++j) {
    cplx s = 0.0;
    for (int xi = -N / 2; xi < N / 2; ++xi)
      s += cplx(0.0, 2.0 * kPi * xi) * std::exp(cplx(0.0, 2.0 * kPi * xi * j / N));
    col[j] = s / static_cast<double>(N);
  }
  CMat D(N, N);
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c) D(r, c) = col[((r - c) % N + N) % N];
  return D;
}

CMat kato_matrix(int J, const RVec& a) {
  const CMat D = derivative_matrix(J);
  return -D * a.cast<cplx>().asDiagonal() * D;
}

CMat hermitian_sqrt(const CMat& L) {
  const CMat H = 0.5 * (L + L.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  const RVec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

CMat pi_b_matrix(int J, const RVec& a1, const RVec& a2) {
  const int N = 1 << J;
  const CMat D = derivative_matrix(J);
  CMat P = CMat::Zero(2 * N, 2 * N);
  P.topRightCorner(N, N) = -(a1.cast<cplx>().asDiagonal() * D * a2.cast<cplx>().asDiagonal());
  P.bottomLeftCorner(N, N) = D;
  return P;
}

CMat poisson_matrix(int J, double t) {
  const CMat D = derivative_matrix(J);
  const CMat I = CMat::Identity(D.rows(), D.cols());
  return (I - t * t * D * D).inverse();
}

double carleson_embed(const radmaxlab::carleson::CarlesonFamily& b, const radmaxlab::dyadic::GridFunction& u,
                      double p, const Norm& norm) {
  const int n = b.n(), J = b.J();
  const std::int64_t cells = b.cells();
  const int dim = u.grid().coords();
  std::vector<radmaxlab::dyadic::DyadicCube> cubes;
  std::vector<CVec> vals, avgs;
  for (const auto& [key, v] : b.terms()) {
    const auto q = b.cube(key);
    CVec avg = CVec::Zero(dim);
    std::int64_t count = 0;
    for (std::int64_t c = 0; c < cells; ++c)
      if (in_cube(n, J, q.level, q.index, c)) {
        for (int j = 0; j < dim; ++j) avg[j] += u(c, 0, j);
        ++count;
      }
    cubes.push_back(q);
    vals.push_back(v);
    avgs.push_back(avg / static_cast<double>(count));
  }
  const std::size_t K = cubes.size();
  double total = 0.0;
  for (std::int64_t c = 0; c < cells; ++c) {
    double e = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << K); ++mask) {
      CVec s = CVec::Zero(dim);
      for (std::size_t r = 0; r < K; ++r)
        s += ((mask >> r) & 1 ? -1.0 : 1.0) * vals[r][c] * avgs[r];
      e += std::pow(norm(s), p);
    }
    total += e / static_cast<double>(std::uint64_t{1} << K);
  }
  return std::pow(total / static_cast<double>(cells), 1.0 / p);
}

double chain_bound(int m) {
  double s = 0.0;
  for (int i = 1; i <= m; ++i) s += (1.0 / (i + 1)) * (1.0 - std::pow(2.0, 1.0 - std::pow(2.0, i - 1)));
  return s;
}

double multiplier_bound(int J) {
  const int N = 1 << J;
  double best = 0.0;
  for (int xi = -N / 2; xi < N / 2; ++xi) {
    const double z = 2.0 * kPi * std::abs(xi);
    double s = 0.0;
    for (int k = -J; k <= 0; ++k) {
      const double y = std::ldexp(z, k);
      s += std::pow(y / (1.0 + y * y), 2);
    }
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

double lp(const CVec& u, double p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) s += std::pow(std::abs(u[i]), p);
  return std::pow(s / static_cast<double>(u.size()), 1.0 / p);
}

}  // namespace oracle
