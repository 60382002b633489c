#include "radmaxlab/selftest.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

#include "radmaxlab/calculus.hpp"
#include "radmaxlab/carleson.hpp"
#include "radmaxlab/elliptic.hpp"
#include "radmaxlab/grid_io.hpp"
#include "radmaxlab/kato.hpp"
#include "radmaxlab/principal.hpp"

namespace radmaxlab::harness {

using banach::SpaceDescriptor;
using dyadic::Grid;
using dyadic::GridFunction;
using ops::Shape;

namespace {

double rel(const CMat& a, const CMat& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

}  // namespace

std::vector<IdentityCheck> identity_checks(std::uint64_t seed) {
  std::vector<IdentityCheck> out;
  const RandomSource rng{seed, 0x5e1f};
  auto add = [&](const std::string& name, double value, double tol) { out.push_back({name, value, tol, value <= tol}); };

  {
    const GridFunction u = radmax::random_function(Grid::scalar(1, 6), rng.substream(1));
    const RVec mr = radmax::rademacher_maximal(u, rng.substream(2));
    add("scalar Rademacher maximal = dyadic maximal", (mr - dyadic::dyadic_maximal(u)).cwiseAbs().maxCoeff(), 1e-10);
  }
  add("l1 counterexample value at m = 1", std::abs(radmax::counterexample_l1(1).value - 0.5), 0.0);
  {
    const Grid g(2, 3, 2, SpaceDescriptor::lebesgue(1.5, 3));
    const GridFunction u = radmax::random_function(g, rng.substream(3));
    const GridFunction back = dyadic::haar_reconstruct(dyadic::haar_decompose(u));
    add("Haar reconstruct after decompose", (back.values() - u.values()).norm() / u.values().norm(), 1e-12);
    const GridFunction e = dyadic::conditional_expectation(u, -1);
    add("conditional expectation is idempotent",
        (dyadic::conditional_expectation(e, -1).values() - e.values()).norm(), 1e-12);
  }
  {
    const SpaceDescriptor H = SpaceDescriptor::hilbert(3);
    std::vector<CVec> xs;
    double sq = 0.0;
    for (int k = 0; k < 6; ++k) {
      xs.push_back(ops::gaussian_field(3, 1, rng.substream(10 + k)).col(0));
      sq += xs.back().squaredNorm();
    }
    banach::AveragingOptions o;
    o.moment = 2.0;
    const double enumerated = banach::rademacher_moment(banach::norm_fn(H), xs, rng.substream(4), o).value;
    add("Hilbert Rademacher average closed form", std::abs(enumerated - std::sqrt(sq)) / std::sqrt(sq), 1e-12);
  }
  {
    const Shape s{1, 4};
    const auto h = ops::hodge_dirac(ops::rough_config(s, 1.0, 4.0, rng.substream(5)));
    const CMat u = ops::gaussian_field(2 * s.cells(), 1, rng.substream(6));
    const double t = 0.3;
    ops::SolveOptions dense;
    dense.method = ops::SolveMethod::dense;
    const auto R = ops::resolvents(h.PiB, t, dense);
    const CMat Ru = R.R.apply(u), Rmu = R.Rminus.apply(u), Pu = R.P.apply(u), Qu = R.Q.apply(u);
    double worst = rel(0.5 * (Ru + Rmu), Pu);
    worst = std::max(worst, rel(R.R.apply(Rmu), Pu));
    worst = std::max(worst, rel(cplx(0.0, 0.5) * (Ru - Rmu), Qu));
    worst = std::max(worst, rel(t * h.PiB.apply(Pu), Qu));
    add("resolvent algebra", worst, 1e-9);
    const auto split = ops::hodge_split(h, u);
    add("Hodge split recombination", rel(split.kernel + split.gamma_part + split.gamma_star_part, u), 1e-12);
    add("Q_t annihilates the kernel part", R.Q.apply(split.kernel).norm() / u.norm(), 1e-8);
  }
  {
    const Shape s{1, 5};
    const auto h = ops::hodge_dirac(ops::HodgeDiracConfig::unperturbed(s));
    const CMat u = ops::gaussian_field(2 * s.cells(), 1, rng.substream(7));
    const ops::ScalarFn psi = [](cplx z) { return z / (1.0 + z * z); };
    const CMat exact = ops::functional_calculus_pi(s, psi, u);
    const auto c = ops::contour_calculus(h.Pi, psi, ops::ContourSpec{}, u);
    add("functional calculus of Pi vs contour integral", rel(c.value, exact), 1e-6);
  }
  add("D D* D = -Laplacian D", ops::dd_star_defect(Shape{2, 4}), 1e-12);
  for (int n = 1; n <= 2; ++n) {
    const Shape s{n, n == 1 ? 6 : 4};
    const ops::KatoOperator k = ops::kato_operator_scalar(s, RVec::Ones(s.cells()));
    const CMat u = ops::gaussian_field(s.cells(), 1, rng.substream(8 + n));
    const double a = ops::field_lp_norm(ops::sqrt_L(k, u, ops::SqrtMethod::dense_schur).value, s.cells(), 2.0);
    const double b = ops::field_lp_norm(k.grad.apply(u), s.cells(), 2.0);
    add("square root of -Laplacian vs gradient, n = " + std::to_string(n), std::abs(a - b) / b, 1e-10);
  }
  {
    const Shape s{1, 6};
    std::vector<CMat> K(static_cast<std::size_t>(s.cells()));
    for (std::size_t c = 0; c < K.size(); ++c)
      K[c] = CMat::Constant(1, 1, c == 0 ? 0.9 : 1.8 * rng.engine(100 + c).uniform() - 0.9);
    const CMat u = ops::gaussian_field(s.cells(), 1, rng.substream(11));
    const double t = 0.125;
    const CMat series = ops::neumann_resolvent(s, t, K, u, 1e-12);
    const ops::OperatorHandle sys = ops::add(
        {ops::identity(s, 1), ops::compose({ops::poisson_family(s, t).P, ops::pointwise(s, K)})});
    const CMat direct = sys.dense().partialPivLu().solve(u);
    add("Neumann series vs direct solve", (series - direct).cwiseAbs().maxCoeff(), 1e-8);

    const auto norm = ops::ellipticity_normalize(ops::random_matrix_field(s, 1.0, 2.0, rng.substream(12)), 1.0, 2.0);
    add("ellipticity normalization margin", std::max(0.0, norm.max_deviation - (norm.M - norm.delta)), 0.0);
  }
  {
    const Shape s{1, 5};
    const auto h = ops::hodge_dirac(ops::HodgeDiracConfig::unperturbed(s));
    double worst = 0.0;
    const auto Q = ops::quadratic_family(h, s.J);
    for (int k = -s.J; k <= 0; ++k)
      for (const CMat& g : ops::principal_part(Q[static_cast<std::size_t>(k + s.J)], k, -1)) worst = std::max(worst, g.norm());
    add("principal part vanishes without perturbation", worst, 1e-9);
  }
  {
    const Grid g(2, 2, 2, SpaceDescriptor::schatten(2.0, 2));
    const GridFunction u = radmax::random_function(g, rng.substream(13));
    std::stringstream a, b;
    dyadic::write_csv(a, u);
    dyadic::write_binary(b, u);
    const double err = std::max((dyadic::read_csv(a).values() - u.values()).cwiseAbs().maxCoeff(),
                                (dyadic::read_binary(b).values() - u.values()).cwiseAbs().maxCoeff());
    add("grid function CSV and binary round trip", err, 0.0);
  }
  {
    const auto fam = carleson::random_family(1, 4, 2.0, rng.substream(14));
    const auto path = (std::filesystem::temp_directory_path() / ("radmaxlab_selftest_" + std::to_string(seed) + ".csv")).string();
    carleson::save_family_csv(fam, path);
    const auto back = carleson::load_family_csv(path);
    std::filesystem::remove(path);
    double err = back.size() == fam.size() ? 0.0 : 1.0;
    for (const auto& [key, v] : fam.terms()) {
      const CVec* w = back.find(fam.cube(key));
      err = std::max(err, w ? (*w - v).cwiseAbs().maxCoeff() : 1.0);
    }
    add("Carleson family CSV round trip", err, 0.0);
  }
  {
    const Grid g = Grid::scalar(1, 5);
    GridFunction f(g);
    f.values().setConstant(cplx(2.0, -1.0));
    const GridFunction u = radmax::random_function(g, rng.substream(15));
    add("paraproduct with constant symbol vanishes", carleson::paraproduct(f, u).values().norm(), 1e-12);
  }
  {
    const SpaceDescriptor X = SpaceDescriptor::lebesgue(1.5, 4);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      std::vector<CVec> xs;
      std::vector<cplx> lam;
      for (int k = 0; k < 5; ++k) {
        xs.push_back(ops::gaussian_field(4, 1, rng.substream(1000 + 10 * i + k)).col(0));
        lam.push_back(cplx(2.0 * rng.engine(5000 + 10 * i + k).uniform() - 1.0, 0.0));
      }
      const auto r = banach::contraction_check(X, xs, lam, rng.substream(16));
      worst = std::max(worst, r.lhs - r.rhs * (1.0 + 1e-12));
    }
    add("contraction principle", std::max(0.0, worst), 0.0);
  }
  return out;
}

Report run_selftest(const ExperimentConfig& cfg) {
  Report rep("selftest", cfg);
  auto& t = rep.table("identities", "exact_identities", {"check", "defect", "tolerance", "pass"});
  int failed = 0;
  for (const auto& c : identity_checks(cfg.seed)) {
    rep.add_row(t, Json::array({c.name, c.value, c.tolerance, c.pass}));
    if (!c.pass) {
      ++failed;
      rep.fail(c.name);
    }
  }
  rep.aggregates()["failed"] = failed;
  return rep;
}

}  // namespace radmaxlab::harness
