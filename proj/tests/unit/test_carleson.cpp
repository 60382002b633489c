#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "radmaxlab/carleson.hpp"
#include "radmaxlab/kato.hpp"
#include "radmaxlab/test_functions.hpp"

using namespace radmaxlab;
using banach::SpaceDescriptor;
using carleson::CarForm;
using carleson::CarlesonFamily;
using dyadic::DyadicCube;
using dyadic::Grid;
using dyadic::GridFunction;

namespace {

CarlesonFamily random_small_family(int n, int J, int max_terms, const RandomSource& rng) {
  CarlesonFamily b(n, J);
  const Grid g = Grid::scalar(n, J);
  std::int64_t draw = 0;
  for (int k = 0; k >= -J && static_cast<int>(b.size()) < max_terms; --k)
    for (std::int64_t q = 0; q < g.cubes(k) && static_cast<int>(b.size()) < max_terms; ++q) {
      if (rng.engine(draw++).uniform() < 0.4) continue;
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

}  // namespace

TEST_CASE("Carleson norm examples") {
  CarlesonFamily one(1, 4);
  one.set_constant(DyadicCube{-2, {1, 0}}, 1.0);
  for (double p : {1.0, 2.0, 3.5}) {
    CHECK(carleson::car_norm(one, p, CarForm::square_function) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(carleson::car_norm(one, p, CarForm::randomized) == doctest::Approx(1.0).epsilon(1e-14));
  }
  for (int d = 1; d <= 5; ++d)
    for (double p : {1.0, 2.0, 3.0})
      CHECK(carleson::car_norm(carleson::full_tree(1, 5, d), p, CarForm::square_function) ==
            doctest::Approx(std::sqrt(static_cast<double>(d))).epsilon(1e-13));
  const auto b = random_small_family(1, 4, 8, RandomSource{1, 0});
  CHECK(carleson::car_norm(b.scaled(cplx(0.0, -3.0)), 2.0, CarForm::square_function) ==
        doctest::Approx(3.0 * carleson::car_norm(b, 2.0, CarForm::square_function)).epsilon(1e-13));
  CHECK_THROWS_AS(carleson::car_norm(b, 0.5, CarForm::square_function), InvalidInput);
}

TEST_CASE("Carleson norm is monotone under restriction and the two forms are comparable") {
  const RandomSource rng{2, 0};
  for (int i = 0; i < 20; ++i) {
    auto b = random_small_family(1 + i % 2, 3, 10, rng.substream(i));
    for (double p : {1.0, 2.0, 3.0}) {
      const double sq = carleson::car_norm(b, p, CarForm::square_function);
      const double rd = carleson::car_norm(b, p, CarForm::randomized);
      CHECK(rd / sq >= 0.5);
      CHECK(rd / sq <= 1.5);
    }
    while (b.size() > 1) {
      const double sq = carleson::car_norm(b, 2.0, CarForm::square_function);
      const double rd = carleson::car_norm(b, 2.0, CarForm::randomized);
      b.erase(b.cube(b.terms().begin()->first));
      CHECK(carleson::car_norm(b, 2.0, CarForm::square_function) <= sq * (1.0 + 1e-14));
      CHECK(carleson::car_norm(b, 2.0, CarForm::randomized) <= rd * (1.0 + 1e-14));
    }
  }
}

TEST_CASE("family bookkeeping") {
  CarlesonFamily b(1, 3);
  CVec leak = CVec::Zero(8);
  leak[7] = 1.0;
  CHECK_THROWS_AS(b.set(DyadicCube{-1, {0, 0}}, leak), InvalidInput);
  CHECK_THROWS_AS(b.set(DyadicCube{-4, {0, 0}}, CVec::Zero(8)), InvalidInput);
  b.set_constant(DyadicCube{-1, {0, 0}}, 2.0);
  b.set_constant(DyadicCube{0, {0, 0}}, 1.0);
  b.set_constant(DyadicCube{-3, {5, 0}}, 1.0);
  const auto act = b.active_at(0);
  REQUIRE(act.size() == 2u);
  CHECK(act[0].first == -1);
  CHECK(act[1].first == 0);
  CHECK(b.active_at(5).size() == 2u);
  REQUIRE(b.find(DyadicCube{-1, {0, 0}}) != nullptr);
  CHECK((*b.find(DyadicCube{-1, {0, 0}}))[3] == 2.0);
  CHECK((*b.find(DyadicCube{-1, {0, 0}}))[4] == 0.0);

  const auto path = (std::filesystem::temp_directory_path() / "radmaxlab_unit_family.csv").string();
  const auto r = carleson::random_family(2, 3, 2.0, RandomSource{3, 0});
  carleson::save_family_csv(r, path);
  const auto back = carleson::load_family_csv(path);
  std::filesystem::remove(path);
  CHECK(back.size() == r.size());
  for (const auto& [key, v] : r.terms()) {
    const CVec* w = back.find(r.cube(key));
    REQUIRE(w != nullptr);
    CHECK((*w - v).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(carleson::load_family_csv("/nonexistent/family.csv"), InvalidInput);
}

TEST_CASE("random and chain families are normalized") {
  for (int n = 1; n <= 2; ++n)
    for (double p : {1.5, 2.0, 3.0}) {
      CHECK(carleson::car_norm(carleson::random_family(n, 3, p, RandomSource{4, 0}), p, CarForm::square_function) ==
            doctest::Approx(1.0).epsilon(1e-12));
      CHECK(carleson::car_norm(carleson::chain_family(n, 3, p), p, CarForm::square_function) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  CHECK(carleson::parse_ensemble(carleson::to_string(carleson::Ensemble::chain)) == carleson::Ensemble::chain);
  CHECK_THROWS_AS(carleson::parse_ensemble("forest"), InvalidInput);
}

TEST_CASE("embedding left-hand side") {
  const RandomSource rng{5, 0};
  const auto X = SpaceDescriptor::lebesgue(1.5, 3);
  const GridFunction u = radmax::random_function(Grid(1, 3, 1, X), rng);
  CHECK(carleson::carleson_embed_lhs(CarlesonFamily(1, 3), u, 2.0, rng).value == 0.0);

  GridFunction c(Grid(1, 3, 1, X));
  const CVec cv = (CVec(3) << 1.0, cplx(0.0, -2.0), 0.5).finished();
  for (std::int64_t cell = 0; cell < 8; ++cell)
    for (int j = 0; j < 3; ++j) c(cell, 0, j) = cv[j];
  CarlesonFamily one(1, 3);
  one.set_constant(DyadicCube{-2, {3, 0}}, 1.0);
  for (double p : {1.0, 2.0, 3.0})
    CHECK(carleson::carleson_embed_lhs(one, c, p, rng).value ==
          doctest::Approx(std::pow(0.25, 1.0 / p) * banach::norm(banach::Vector(X, cv))).epsilon(1e-13));

  const oracle::Norm scalar = [](const CVec& x) { return std::abs(x[0]); };
  const oracle::Norm l15 = [](const CVec& x) { return oracle::lq_norm(x, 1.5); };
  for (int i = 0; i < 20; ++i) {
    const auto b = random_small_family(1, 3, 7, rng.substream(i));
    const bool vec = i % 2;
    const GridFunction v = radmax::random_function(vec ? Grid(1, 3, 1, X) : Grid::scalar(1, 3), rng.substream(100 + i));
    for (double p : {1.0, 2.5}) {
      const auto est = carleson::carleson_embed_lhs(b, v, p, rng);
      CHECK(est.method == banach::Method::exact_enum);
      CHECK(est.value == doctest::Approx(oracle::carleson_embed(b, v, p, vec ? l15 : scalar)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(carleson::carleson_embed_lhs(one, radmax::random_function(Grid::scalar(1, 4), rng), 2.0, rng),
                  InvalidInput);
}

TEST_CASE("embedding constant experiment") {
  const auto r = carleson::embedding_constant_experiment(SpaceDescriptor::hilbert(1), 2.0, 0.0, 1, 4, 10,
                                                         carleson::Ensemble::random, RandomSource{6, 0});
  REQUIRE(r.ratios.size() == 10u);
  for (double x : r.ratios) {
    CHECK(std::isfinite(x));
    CHECK(x > 0.0);
  }
  CHECK(r.max_ratio <= 2.0);
  const auto chain = carleson::embedding_constant_experiment(SpaceDescriptor::hilbert(1), 1.5, 0.5, 1, 4, 4,
                                                             carleson::Ensemble::chain, RandomSource{6, 1});
  CHECK(chain.max_ratio <= 2.0);
}

TEST_CASE("stopping decomposition") {
  const RandomSource rng{7, 0};
  GridFunction c(Grid(1, 4, 1, SpaceDescriptor::lebesgue(1.0, 2)));
  for (std::int64_t cell = 0; cell < 16; ++cell) {
    c(cell, 0, 0) = 0.3;
    c(cell, 0, 1) = cplx(0.0, 0.4);
  }
  const auto flat = carleson::stopping_decomposition(c, 0.71, rng);
  CHECK(flat.max_class == 0);
  for (const auto& F : flat.F) CHECK(F.empty());
  for (const auto& lvl : flat.cls)
    for (int k : lvl) CHECK(k == 0);

  const GridFunction u = radmax::random_function(Grid::scalar(1, 5), rng);
  const double A = 0.05;
  const auto sd = carleson::stopping_decomposition(u, A, rng);
  CHECK(sd.containment_ok);
  const auto Ks = [&](int level, std::int64_t idx) {
    const auto& g = u.grid();
    double best = 0.0;
    DyadicCube q = DyadicCube::from_linear(1, level, idx);
    while (true) {
      cplx s = 0.0;
      std::int64_t cnt = 0;
      for (std::int64_t cell = 0; cell < g.cells(); ++cell)
        if (q.contains_cell(g, cell)) {
          s += u(cell, 0, 0);
          ++cnt;
        }
      best = std::max(best, std::abs(s) / static_cast<double>(cnt));
      if (q.level == 0) break;
      q = q.parent();
    }
    return best;
  };
  for (int level = -5; level <= 0; ++level)
    for (std::int64_t q = 0; q < u.grid().cubes(level); ++q) {
      const double v = Ks(level, q);
      CHECK(sd.value[static_cast<std::size_t>(level + 5)][static_cast<std::size_t>(q)] == doctest::Approx(v).epsilon(1e-9));
      int k = 0;
      while (v > A * std::ldexp(1.0, k) * (1.0 + 1e-12)) ++k;
      CHECK(sd.cls[static_cast<std::size_t>(level + 5)][static_cast<std::size_t>(q)] == k);
      if (level < 0) {
        const auto parent = DyadicCube::from_linear(1, level, q).parent();
        CHECK(sd.cls[static_cast<std::size_t>(level + 5)][static_cast<std::size_t>(q)] >=
              sd.cls[static_cast<std::size_t>(level + 6)][static_cast<std::size_t>(parent.linear(1))]);
      }
    }
  for (std::size_t k = 0; k < sd.F.size(); ++k) {
    for (std::size_t i = 0; i < sd.F[k].size(); ++i)
      for (std::size_t j = i + 1; j < sd.F[k].size(); ++j) {
        CHECK_FALSE(sd.F[k][i].contains(sd.F[k][j]));
        CHECK_FALSE(sd.F[k][j].contains(sd.F[k][i]));
      }
    if (k > 0) {
      CHECK(sd.F_measure[k] <= sd.F_measure[k - 1] + 1e-15);
      for (const auto& q : sd.F[k]) {
        bool covered = false;
        for (const auto& p : sd.F[k - 1]) covered = covered || p.contains(q);
        CHECK(covered);
      }
    }
  }
}

TEST_CASE("stopping decomposition of the l1 counterexample") {
  const auto sd = carleson::stopping_decomposition(radmax::counterexample_function(2), 0.1, RandomSource{8, 0});
  REQUIRE(sd.F.size() >= 2u);
  CHECK_FALSE(sd.F[0].empty());
  for (std::size_t k = 1; k < sd.F_measure.size(); ++k) CHECK(sd.F_measure[k] <= sd.F_measure[k - 1]);
  CHECK(sd.containment_ok);
}

TEST_CASE("paraproduct examples") {
  const Grid g = Grid::scalar(1, 4);
  const RandomSource rng{9, 0};
  GridFunction f(g);
  f.values().setConstant(cplx(1.0, 1.0));
  const GridFunction u = radmax::random_function(Grid(1, 4, 1, SpaceDescriptor::lebesgue(3.0, 2)), rng);
  CHECK(carleson::paraproduct(f, u).values().norm() <= 1e-13);

  const GridFunction f2 = radmax::random_function(g, rng.substream(1));
  GridFunction cst(Grid(1, 4, 1, SpaceDescriptor::lebesgue(3.0, 2)));
  const CVec cv = (CVec(2) << 2.0, cplx(0.0, -1.0)).finished();
  for (std::int64_t c = 0; c < 16; ++c) cst.at(c)[0] = cv[0], cst.at(c)[1] = cv[1];
  const GridFunction P = carleson::paraproduct(f2, cst);
  const cplx mean = f2.values().mean();
  for (std::int64_t c = 0; c < 16; ++c)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(P(c, 0, j) - (f2(c, 0, 0) - mean) * cv[j]) <= 1e-13);

  const DyadicCube Q{-1, {1, 0}};
  const GridFunction hQ = dyadic::haar_function(g, Q, 1);
  GridFunction left(g);
  for (std::int64_t c = 0; c < 16; ++c)
    if (Q.child(1, 0).contains_cell(g, c)) left(c, 0, 0) = 1.0;
  const GridFunction Ph = carleson::paraproduct(hQ, left);
  for (std::int64_t c = 0; c < 16; ++c) CHECK(std::abs(Ph(c, 0, 0) - 0.5 * hQ(c, 0, 0)) <= 1e-14);

  const GridFunction h0 = dyadic::haar_function(g, DyadicCube{}, 1);
  GridFunction one(g);
  one.values().setOnes();
  const GridFunction Pone = carleson::paraproduct(h0, one);
  CHECK(dyadic::lp_norm(Pone, 2.0) / (dyadic::bmo_norm(h0) * dyadic::lp_norm(one, 2.0)) == doctest::Approx(1.0));

  const GridFunction v = radmax::random_function(Grid(1, 4, 1, SpaceDescriptor::lebesgue(3.0, 2)), rng.substream(2));
  const GridFunction lhs = carleson::paraproduct(f2, u + v);
  const GridFunction rhs = carleson::paraproduct(f2, u) + carleson::paraproduct(f2, v);
  CHECK((lhs.values() - rhs.values()).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(carleson::paraproduct(u, v), InvalidInput);
  CHECK_THROWS_AS(carleson::paraproduct(f2, radmax::random_function(Grid::scalar(1, 3), rng)), InvalidInput);
}

TEST_CASE("paraproduct bound experiment") {
  for (bool swapped : {false, true}) {
    const auto r = carleson::paraproduct_bound_experiment(SpaceDescriptor::lebesgue(1.5, 3), 2.0, 1, 5, 5, swapped,
                                                          RandomSource{10, 0});
    CHECK(r.ratios.size() == 5u);
    for (double x : r.ratios) CHECK(std::isfinite(x));
    CHECK(r.max_ratio < 5.0);
  }
}

TEST_CASE("test functions") {
  const ops::Shape s{1, 7};
  const auto cfg = ops::HodgeDiracConfig::unperturbed(s);
  const DyadicCube Q{-3, {2, 0}};
  const CVec w = (CVec(2) << 0.0, 1.0).finished();
  const auto b = carleson::test_functions(cfg, Q, w, 0.1);
  CHECK(b.plateau_error <= 0.15);
  CHECK(b.support_leak <= 0.15);
  const auto fine = carleson::test_functions(ops::HodgeDiracConfig::unperturbed(ops::Shape{1, 9}), Q, w, 0.1);
  CHECK(fine.plateau_error < b.plateau_error);
  CHECK(fine.support_leak < b.support_leak);
  CHECK(b.w_sup < 50.0);
  CHECK(b.cutoff_gradient < 50.0);
  const CMat eta = carleson::cutoff(s, Q);
  CHECK(eta.real().maxCoeff() <= 1.0 + 1e-14);
  CHECK(eta.real().minCoeff() >= -1e-14);

  double prev = 1e300;
  for (double eps : {0.4, 0.1, 0.025}) {
    const auto r = carleson::test_function_report(cfg, carleson::test_functions(cfg, Q, w, eps), 2.0, false);
    CHECK(r.closeness < prev);
    prev = r.closeness;
    CHECK(std::isfinite(r.test1));
  }
  CHECK(prev < 0.05);

  CHECK_THROWS_AS(carleson::test_functions(cfg, DyadicCube{-1, {0, 0}}, w, 0.1), InvalidInput);
  CHECK_THROWS_AS(carleson::test_functions(cfg, Q, w, 0.6), InvalidInput);
  CHECK_THROWS_AS(carleson::test_functions(cfg, Q, (CVec(2) << 1.0, 0.0).finished(), 0.1), InvalidInput);
}

TEST_CASE("Lp56 constant is stable in J") {
  const RandomSource rng{11, 0};
  for (double p : {1.5, 2.0, 3.0}) {
    double lo = 1e300, hi = 0.0;
    for (int J : {6, 7, 8}) {
      const ops::Shape s{1, J};
      const double c = carleson::lp56_constant(s, carleson::smooth_random_field(s, rng), p);
      CHECK(std::isfinite(c));
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    CHECK(hi / lo <= 2.0);
  }
}
