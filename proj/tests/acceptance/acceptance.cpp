// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "radmaxlab/calculus.hpp"
#include "radmaxlab/carleson.hpp"
#include "radmaxlab/elliptic.hpp"
#include "radmaxlab/kato.hpp"
#include "radmaxlab/principal.hpp"
#include "radmaxlab/test_functions.hpp"

using namespace radmaxlab;
using banach::SpaceDescriptor;
using carleson::CarlesonFamily;
using dyadic::DyadicCube;
using dyadic::Grid;
using dyadic::GridFunction;
using ops::Shape;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double rel(const CMat& a, const CMat& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

ops::SolveOptions dense_solve() {
  ops::SolveOptions o;
  o.method = ops::SolveMethod::dense;
  return o;
}

CVec random_vec(int d, const RandomSource& rng) { return ops::gaussian_field(d, 1, rng).col(0); }

Outcome scalar_identity() {
  const RandomSource rng{101, 0};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const GridFunction u = radmax::random_function(Grid::scalar(1, 6), rng.substream(i));
    const RVec mr = radmax::rademacher_maximal(u, rng.substream(1000 + i));
    worst = std::max(worst, (mr - oracle::dyadic_maximal(u)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10, fmt("max |M_R u - M u| = %.3e over 100 functions", worst)};
}

Outcome l1_counterexample() {
  bool ok = radmax::counterexample_l1(1).value == 0.5;
  double prev = 0.0, margin = 1e300;
  std::string values;
  for (int m = 1; m <= 4; ++m) {
    const auto c = radmax::counterexample_l1(m);
    ok = ok && c.value > prev && c.value > oracle::chain_bound(m);
    margin = std::min(margin, c.value - oracle::chain_bound(m));
    prev = c.value;
    values += fmt("%.6f ", c.value);
  }
  return {ok, "values " + values + fmt("min margin over chain %.4f", margin)};
}

Outcome khintchine_band() {
  const RandomSource rng{103, 0};
  double lo = 1e300, hi = 0.0;
  int count = 0;
  for (int K = 1; K <= 10; ++K)
    for (int d = 1; d <= 8; ++d)
      for (int r = 0; r < 5; ++r) {
        const auto X = SpaceDescriptor::lebesgue(2.0, d);
        std::vector<CVec> xs;
        for (int k = 0; k < K; ++k) xs.push_back(random_vec(d, rng.substream((K * 16 + d) * 64 + r * 12 + k)));
        const auto avg = banach::rademacher_avg(X, xs, 1.0, rng);
        if (avg.method != banach::Method::exact_enum) return {false, "instance not enumerated"};
        const double ratio = avg.value / banach::square_function_norm(X, xs);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        ++count;
      }
  return {lo >= 1.0 / std::sqrt(2.0) - 1e-9 && hi <= 1.0 + 1e-9,
          fmt("ratios in [%.6f, %.6f] over %.0f instances", lo, hi, count)};
}

Outcome contraction() {
  const RandomSource rng{104, 0};
  int violations = 0, total = 0;
  for (int kind = 0; kind < 3; ++kind)
    for (int i = 0; i < 1000; ++i) {
      const RandomSource r = rng.substream(kind * 10000 + i);
      auto e = r.engine(0);
      const double qs[] = {1.0, 1.5, 3.0};
      const double q = qs[i % 3];
      const SpaceDescriptor X = kind == 0   ? SpaceDescriptor::lebesgue(q, 2 + i % 3)
                                : kind == 1 ? SpaceDescriptor::hilbert(2 + i % 3)
                                            : SpaceDescriptor::schatten(q, 2);
      const int K = 1 + static_cast<int>(e.uniform() * 8);
      std::vector<CVec> xs;
      std::vector<cplx> lam;
      for (int k = 0; k < K; ++k) {
        xs.push_back(random_vec(X.coords(), r.substream(1 + k)));
        lam.push_back(std::polar(e.uniform(), 2.0 * kPi * e.uniform()));
      }
      const auto c = banach::contraction_check(X, xs, lam, r);
      if (c.method != banach::Method::exact_enum || !c.pass || c.lhs > c.rhs) ++violations;
      ++total;
    }
  return {violations == 0, fmt("%.0f violations in %.0f instances", violations, total)};
}

Outcome resolvent_algebra() {
  const RandomSource rng{105, 0};
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const RandomSource r = rng.substream(i);
    const Shape s{1, 2 + i % 5};
    const auto h = ops::hodge_dirac(ops::rough_config(s, 1.0, 10.0, r));
    const CMat u = ops::gaussian_field(2 * s.cells(), 1, r.substream(1));
    const double t = std::pow(2.0, -s.J - 1 + (s.J + 3) * r.engine(2).uniform());
    const auto R = ops::resolvents(h.PiB, t, dense_solve());
    const CMat Ru = R.R.apply(u), Rmu = R.Rminus.apply(u), Pu = R.P.apply(u), Qu = R.Q.apply(u);
    worst = std::max({worst, rel(0.5 * (Ru + Rmu), Pu), rel(R.R.apply(Rmu), Pu),
                      rel(cplx(0.0, 0.5) * (Ru - Rmu), Qu), rel(t * h.PiB.apply(Pu), Qu)});
  }
  return {worst <= 1e-9, fmt("max relative defect %.3e over 100 cases", worst)};
}

Outcome contour_vs_fc() {
  const Shape s{1, 6};
  const auto h = ops::hodge_dirac(ops::HodgeDiracConfig::unperturbed(s));
  const CMat u = ops::gaussian_field(2 * s.cells(), 4, RandomSource{106, 0});
  const ops::ScalarFn psi = [](cplx z) { return z / (1.0 + z * z); };
  ops::ContourSpec spec;
  spec.nodes_per_decade = 40;
  const auto c = ops::contour_calculus(h.Pi, psi, spec, u);
  const double err = rel(c.value, ops::functional_calculus_pi(s, psi, u));
  return {err <= 1e-6, fmt("relative difference %.3e with %.0f nodes", err, c.nodes)};
}

Outcome neumann_vs_dense() {
  const RandomSource rng{107, 0};
  const Shape s{1, 8};
  std::vector<CMat> K(static_cast<std::size_t>(s.cells()));
  for (std::size_t c = 0; c < K.size(); ++c)
    K[c] = CMat::Constant(1, 1, c == 7 ? 0.9 : 1.8 * rng.engine(c).uniform() - 0.9);
  RVec kd(s.cells());
  for (Eigen::Index c = 0; c < kd.size(); ++c) kd[c] = K[static_cast<std::size_t>(c)](0, 0).real();
  const CMat u = ops::gaussian_field(s.cells(), 20, rng.substream(1));
  double worst = 0.0;
  for (int j = -6; j <= 0; ++j) {
    const double t = std::ldexp(1.0, j);
    const CMat series = ops::neumann_resolvent(s, t, K, u, 1e-10);
    const CMat sys = CMat::Identity(s.cells(), s.cells()) + oracle::poisson_matrix(s.J, t) * kd.cast<cplx>().asDiagonal();
    worst = std::max(worst, (series - sys.partialPivLu().solve(u)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-8 && ops::sup_norm(K) == 0.9, fmt("max difference %.3e, ||K|| = %.2f", worst, ops::sup_norm(K))};
}

Outcome kato_identity() {
  const RandomSource rng{108, 0};
  double worst = 0.0;
  for (int n = 1; n <= 2; ++n) {
    const Shape s{n, n == 1 ? 6 : 4};
    const auto k = ops::kato_operator_scalar(s, RVec::Ones(s.cells()));
    const CMat u = ops::gaussian_field(s.cells(), 50, rng.substream(n));
    const CMat root = ops::sqrt_L(k, u, ops::SqrtMethod::dense_schur).value;
    const CMat grad = k.grad.apply(u);
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      const double a = ops::field_lp_norm(root.col(c), s.cells(), 2.0);
      const double b = ops::field_lp_norm(grad.col(c), s.cells(), 2.0);
      worst = std::max(worst, std::abs(a - b) / b);
    }
  }
  return {worst <= 1e-10, fmt("max relative gap %.3e over 100 functions", worst)};
}

Outcome kato_rough() {
  const RandomSource rng{109, 0};
  const Shape s{1, 10};
  double worst = 0.0, lo = 1e300, hi = 0.0;
  for (int i = 0; i < 50; ++i) {
    const RandomSource r = rng.substream(i);
    const RVec a = ops::random_coefficient(s, 1.0, 10.0, r);
    const auto k = ops::kato_operator_scalar(s, a);
    const CMat u = ops::gaussian_field(s.cells(), 1, r.substream(1));
    const CMat ref = oracle::hermitian_sqrt(oracle::kato_matrix(s.J, a)) * u;
    const CMat quad = ops::sqrt_L(k, u, ops::SqrtMethod::resolvent_quadrature).value;
    worst = std::max(worst, rel(quad, ref));
    const CMat grad = k.grad.apply(u);
    for (double p : {1.5, 2.0, 3.0}) {
      const double ratio = ops::field_lp_norm(ref, s.cells(), p) / ops::field_lp_norm(grad, s.cells(), p);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  return {worst <= 1e-4 && lo >= 0.01 && hi <= 100.0,
          fmt("quadrature vs oracle %.3e; ratios in [%.4f, %.4f]", worst, lo, hi)};
}

CarlesonFamily random_small_family(int n, int J, int max_terms, const RandomSource& rng) {
  CarlesonFamily b(n, J);
  const Grid g = Grid::scalar(n, J);
  std::int64_t draw = 0;
  for (int k = 0; k >= -J && static_cast<int>(b.size()) < max_terms; --k)
    for (std::int64_t q = 0; q < g.cubes(k) && static_cast<int>(b.size()) < max_terms; ++q) {
      if (rng.engine(draw++).uniform() < 0.5) continue;
      const auto cube = DyadicCube::from_linear(n, k, q);
      CVec v = CVec::Zero(g.cells());
      for (std::int64_t c = 0; c < g.cells(); ++c)
        if (cube.contains_cell(g, c)) {
          auto e = rng.engine(draw++);
          v[c] = cplx(2.0 * e.uniform() - 1.0, 2.0 * e.uniform() - 1.0);
        }
      b.set(cube, v);
    }
  return b;
}

Outcome carleson_embedding() {
  const RandomSource rng{110, 0};
  const auto X = SpaceDescriptor::lebesgue(1.5, 3);
  const oracle::Norm scalar = [](const CVec& x) { return std::abs(x[0]); };
  const oracle::Norm l15 = [](const CVec& x) { return oracle::lq_norm(x, 1.5); };
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const RandomSource r = rng.substream(i);
    const int n = 1 + i % 2, J = n == 1 ? 4 : 2;
    const auto b = random_small_family(n, J, 14, r);
    const bool vec = (i / 2) % 2;
    const GridFunction u = radmax::random_function(vec ? Grid(n, J, 1, X) : Grid::scalar(n, J), r.substream(1));
    const double p = 1.0 + 2.0 * r.engine(999).uniform();
    const auto est = carleson::carleson_embed_lhs(b, u, p, r);
    if (est.method != banach::Method::exact_enum) return {false, "embedding not enumerated"};
    const double ref = oracle::carleson_embed(b, u, p, vec ? l15 : scalar);
    worst = std::max(worst, std::abs(est.value - ref) / std::max(1e-300, ref));
  }
  bool ok = worst <= 1e-12;
  std::string detail = fmt("enumeration gap %.3e over 200 families;", worst);
  for (const char* sp : {"hilbert:1", "lq:1.5:4"}) {
    double lo = 1e300, hi = 0.0, top = 0.0;
    for (int J = 4; J <= 6; ++J) {
      const auto e = carleson::embedding_constant_experiment(SpaceDescriptor::parse(sp), 2.0, 0.5, 1, J, 20,
                                                             carleson::Ensemble::random, rng.substream(500 + J));
      lo = std::min(lo, e.max_ratio);
      hi = std::max(hi, e.max_ratio);
      for (double x : e.ratios) top = std::max(top, x);
    }
    ok = ok && hi / lo <= 1.5 && top <= 2.0;
    detail += std::string(" ") + sp + fmt(" constant in [%.4f, %.4f]", lo, hi);
  }
  return {ok, detail};
}

Outcome paraproduct_stability() {
  const RandomSource rng{111, 0};
  bool ok = true;
  std::string detail;
  for (const char* sp : {"hilbert:1", "lq:1.5:4", "lq:3:4"}) {
    const auto X = SpaceDescriptor::parse(sp);
    const auto a = carleson::paraproduct_bound_experiment(X, 2.0, 1, 6, 30, false, rng.substream(1));
    const auto b = carleson::paraproduct_bound_experiment(X, 2.0, 1, 10, 30, false, rng.substream(2));
    const double var = std::max(a.max_ratio, b.max_ratio) / std::min(a.max_ratio, b.max_ratio) - 1.0;
    ok = ok && var < 0.25;
    detail += std::string(" ") + sp + fmt(" %.4f/%.4f (%.1f%%)", a.max_ratio, b.max_ratio, 100.0 * var);
  }
  return {ok, "J=6/J=10:" + detail};
}

Outcome off_diagonal() {
  const RandomSource rng{112, 0};
  const Shape s{1, 8};
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const RandomSource r = rng.substream(i);
    const auto h = ops::hodge_dirac(ops::HodgeDiracConfig::elliptic(s, ops::random_matrix_field(s, 1.0, 10.0, r)));
    for (int k = -7; k <= -4; ++k) {
      const auto Q = ops::resolvent(h.PiB, std::ldexp(1.0, k), ops::ResolventStyle::Q, dense_solve());
      const auto rows = ops::off_diagonal_profile(Q, k, {1.0, 4.0}, 2.0, r.substream(100 + k), 4);
      if (rows.size() != 2u) return {false, "empty far region"};
      worst = std::max(worst, rows[1].operator_norm / rows[0].operator_norm);
    }
  }
  return {worst <= 0.5, fmt("worst rho=4 / rho=1 ratio %.4f over 20 coefficients and t = 2^-7..2^-4", worst)};
}

Outcome test_function_checks() {
  const Shape s{1, 8};
  const auto cfg = ops::rough_config(s, 1.0, 10.0, RandomSource{113, 0});
  const CVec w = (CVec(2) << 0.0, 1.0).finished();
  const auto sweep = carleson::eps_sweep(cfg, DyadicCube{-3, {0, 0}}, w, {0.4, 0.2, 0.1, 0.05, 0.025}, 2.0);
  double lo1 = 1e300, hi1 = 0.0, lo2 = 1e300, hi2 = 0.0;
  for (int k = -2; k >= -4; --k) {
    const auto r = carleson::test_function_report(cfg, carleson::test_functions(cfg, DyadicCube{k, {0, 0}}, w, 0.1), 2.0);
    lo1 = std::min(lo1, r.test1);
    hi1 = std::max(hi1, r.test1);
    lo2 = std::min(lo2, r.test2);
    hi2 = std::max(hi2, r.test2);
  }
  return {sweep.slope >= 0.3 && hi1 / lo1 <= 2.0 && hi2 / lo2 <= 2.0,
          fmt("slope %.4f; test1 spread %.3f, test2 spread %.3f", sweep.slope, hi1 / lo1, hi2 / lo2)};
}

Outcome hodge_decomposition() {
  const RandomSource rng{114, 0};
  double recomb = 0.0, annih = 0.0;
  for (int i = 0; i < 50; ++i) {
    const RandomSource r = rng.substream(i);
    const Shape s = i % 5 == 4 ? Shape{2, 3} : Shape{1, 3 + i % 4};
    const auto h = ops::hodge_dirac(ops::rough_config(s, 1.0, 10.0, r));
    const CMat u = ops::gaussian_field((1 + s.n) * s.cells(), 1, r.substream(1));
    const auto split = ops::hodge_split(h, u);
    recomb = std::max(recomb, rel(split.kernel + split.gamma_part + split.gamma_star_part, u));
    const double t = std::pow(2.0, -s.J + s.J * r.engine(2).uniform());
    const auto R = ops::resolvents(h.PiB, t, dense_solve());
    annih = std::max(annih, R.Q.apply(split.kernel).norm() / u.norm());
  }
  return {recomb <= 1e-8 && annih <= 1e-8, fmt("recombination %.3e, annihilation %.3e", recomb, annih)};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"scalar Rademacher maximal identity", scalar_identity},
      {"l1 counterexample", l1_counterexample},
      {"Khintchine-Kahane band for l2", khintchine_band},
      {"contraction principle", contraction},
      {"resolvent algebra", resolvent_algebra},
      {"functional calculus vs contour integral", contour_vs_fc},
      {"Neumann series vs dense solve", neumann_vs_dense},
      {"Kato identity at A = I", kato_identity},
      {"Kato rough ensemble", kato_rough},
      {"Carleson embedding", carleson_embedding},
      {"paraproduct constant stability", paraproduct_stability},
      {"off-diagonal decay", off_diagonal},
      {"test functions", test_function_checks},
      {"Hodge decomposition", hodge_decomposition},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(i + 1)) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(), sec);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
