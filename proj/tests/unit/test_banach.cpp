#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "radmaxlab/banach_space.hpp"
#include "radmaxlab/kato.hpp"
#include "radmaxlab/kernels.hpp"

using namespace radmaxlab;
using banach::SpaceDescriptor;

namespace {

std::span<const cplx> sp(const CVec& x) { return {x.data(), static_cast<std::size_t>(x.size())}; }
double nrm(const SpaceDescriptor& X, const CVec& x) { return banach::norm(X, sp(x)); }

CVec randvec(int d, const RandomSource& rng) { return ops::gaussian_field(d, 1, rng).col(0); }

std::vector<CVec> randvecs(int K, int d, const RandomSource& rng) {
  std::vector<CVec> xs;
  for (int k = 0; k < K; ++k) xs.push_back(randvec(d, rng.substream(k)));
  return xs;
}

oracle::Norm oracle_norm(const SpaceDescriptor& X) {
  if (X.kind() == banach::SpaceKind::schatten) return [X](const CVec& x) { return oracle::schatten_norm(x, X.dim(), X.q()); };
  if (X.kind() == banach::SpaceKind::hilbert) return [](const CVec& x) { return oracle::lq_norm(x, 2.0); };
  return [X](const CVec& x) { return oracle::lq_norm(x, X.q()); };
}

const std::vector<SpaceDescriptor>& spaces() {
  static const std::vector<SpaceDescriptor> s{SpaceDescriptor::hilbert(3), SpaceDescriptor::lebesgue(1.0, 4),
                                              SpaceDescriptor::lebesgue(1.5, 5), SpaceDescriptor::lebesgue(4.0, 3),
                                              SpaceDescriptor::schatten(1.0, 2), SpaceDescriptor::schatten(3.0, 3)};
  return s;
}

}  // namespace

TEST_CASE("norm examples") {
  CHECK(banach::norm(SpaceDescriptor::hilbert(2), std::vector<cplx>{3.0, 4.0}) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(banach::norm(SpaceDescriptor::lebesgue(1.0, 3), std::vector<cplx>{1.0, -2.0, 3.0}) ==
        doctest::Approx(6.0).epsilon(1e-15));
  const CVec I = Eigen::Map<const CVec>(CMat::Identity(2, 2).eval().data(), 4);
  CHECK(nrm(SpaceDescriptor::schatten(2.0, 2), I) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(banach::Vector(SpaceDescriptor::hilbert(2), CVec::Zero(3)), InvalidInput);
}

TEST_CASE("norms agree with independent evaluation") {
  const RandomSource rng{11, 0};
  int i = 0;
  for (const auto& X : spaces()) {
    const auto ref = oracle_norm(X);
    for (int k = 0; k < 20; ++k, ++i) {
      const CVec x = randvec(X.coords(), rng.substream(i));
      CHECK(nrm(X, x) == doctest::Approx(ref(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("norm axioms on fuzzed vectors") {
  const RandomSource rng{12, 0};
  for (const auto& X : spaces()) {
    for (int k = 0; k < 20; ++k) {
      const CVec x = randvec(X.coords(), rng.substream(2 * k)), y = randvec(X.coords(), rng.substream(2 * k + 1));
      const cplx c(-1.7, 0.4);
      CHECK(nrm(X, CVec(x + y)) <= nrm(X, x) + nrm(X, y) + 1e-12);
      CHECK(nrm(X, CVec(c * x)) == doctest::Approx(std::abs(c) * nrm(X, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("space descriptors parse and carry tags") {
  const auto a = SpaceDescriptor::parse("lq:1.5:8");
  CHECK(a == SpaceDescriptor::lebesgue(1.5, 8));
  CHECK(a.is_lattice());
  CHECK_FALSE(a.is_hilbert());
  CHECK_FALSE(a.has_type_2());
  CHECK(SpaceDescriptor::parse(a.to_string()) == a);
  CHECK(SpaceDescriptor::parse("lq:2:3").is_hilbert());
  CHECK(SpaceDescriptor::parse("schatten:2:3").is_hilbert());
  CHECK_FALSE(SpaceDescriptor::parse("schatten:2:3").is_lattice());
  CHECK(SpaceDescriptor::parse("lq:4:3").has_type_2());
  CHECK(SpaceDescriptor::parse("hilbert:4").has_type_2());
  CHECK(SpaceDescriptor::parse("schatten:3:2").coords() == 4);
  for (const char* bad : {"", "lq", "lq:0.5:3", "lq:2:0", "hilbert:x", "banach:2", "schatten:2:99"})
    CHECK_THROWS_AS(SpaceDescriptor::parse(bad), InvalidInput);
}

TEST_CASE("rademacher average examples") {
  const RandomSource rng{1, 0};
  const CVec x = randvec(3, rng);
  const auto H2 = SpaceDescriptor::hilbert(2);
  CHECK(banach::rademacher_avg(SpaceDescriptor::lebesgue(1.5, 3), std::vector<CVec>{x}, 1.0, rng).value ==
        doctest::Approx(nrm(SpaceDescriptor::lebesgue(1.5, 3), x)).epsilon(1e-14));
  const std::vector<CVec> e{CVec::Unit(2, 0), CVec::Unit(2, 1)};
  CHECK(banach::rademacher_avg(H2, e, 1.0, rng).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  const std::vector<CVec> ones{CVec::Ones(1), CVec::Ones(1)};
  CHECK(banach::rademacher_avg(SpaceDescriptor::hilbert(1), ones, 1.0, rng).value == doctest::Approx(1.0));
  const auto empty = banach::rademacher_avg(H2, std::vector<CVec>{}, 1.0, rng);
  CHECK(empty.value == 0.0);
  CHECK(empty.method == banach::Method::exact_enum);
  const auto closed = banach::rademacher_avg(H2, e, 2.0, rng);
  CHECK(closed.method == banach::Method::closed_form);
  CHECK(closed.value == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("rademacher average matches full enumeration") {
  const RandomSource rng{2, 0};
  int i = 0;
  for (const auto& X : spaces()) {
    for (double p : {1.0, 3.0}) {
      const auto xs = randvecs(1 + i % 8, X.coords(), rng.substream(i));
      const auto est = banach::rademacher_avg(X, xs, p, rng);
      CHECK(est.method == banach::Method::exact_enum);
      CHECK(est.std_error == 0.0);
      CHECK(est.value == doctest::Approx(oracle::rademacher_enum(oracle_norm(X), xs, p)).epsilon(1e-12));
      ++i;
    }
  }
}

TEST_CASE("rademacher average switches to Monte Carlo past the exact limit") {
  const RandomSource rng{3, 0};
  const auto X = SpaceDescriptor::lebesgue(1.0, 3);
  const auto xs = randvecs(9, 3, rng);
  const auto exact = banach::rademacher_avg(X, xs, 1.0, rng);
  const auto mc = banach::rademacher_avg(X, xs, 1.0, rng, 20000, 4);
  CHECK(mc.method == banach::Method::monte_carlo);
  CHECK(mc.samples == 20000);
  CHECK(mc.std_error > 0.0);
  CHECK(std::abs(mc.value - exact.value) <= 4.0 * mc.std_error);
  CHECK(banach::rademacher_avg(X, xs, 1.0, rng, 20000, 4).value == mc.value);
  CHECK_THROWS_AS(banach::rademacher_avg(X, xs, 1.0, rng, 0, 4), InvalidInput);
}

TEST_CASE("rademacher average is homogeneous and Kahane-monotone in the moment") {
  const RandomSource rng{4, 0};
  for (std::size_t s = 0; s < spaces().size(); ++s) {
    const auto& X = spaces()[s];
    const auto xs = randvecs(6, X.coords(), rng.substream(s));
    std::vector<CVec> scaled;
    for (const auto& x : xs) scaled.push_back(cplx(0.3, -2.0) * x);
    const double v1 = banach::rademacher_avg(X, xs, 1.0, rng).value;
    CHECK(banach::rademacher_avg(X, scaled, 1.0, rng).value == doctest::Approx(std::abs(cplx(0.3, -2.0)) * v1).epsilon(1e-12));
    CHECK(banach::rademacher_avg(X, xs, 3.0, rng).value >= v1 * (1.0 - 1e-14));
  }
}

TEST_CASE("lattice Khintchine band for l2") {
  const RandomSource rng{5, 0};
  for (int i = 0; i < 200; ++i) {
    const int d = 1 + i % 8, K = 1 + (i / 8) % 10;
    const auto X = SpaceDescriptor::lebesgue(2.0, d);
    const auto xs = randvecs(K, d, rng.substream(i));
    const double r = banach::rademacher_avg(X, xs, 1.0, rng).value / banach::square_function_norm(X, xs);
    CHECK(r >= 1.0 / std::sqrt(2.0) - 1e-9);
    CHECK(r <= 1.0 + 1e-9);
  }
}

TEST_CASE("gaussian averages") {
  const RandomSource rng{6, 0};
  const CVec x = randvec(3, rng);
  const auto H = SpaceDescriptor::hilbert(3);
  CHECK(banach::gaussian_avg(H, std::vector<CVec>{x}, 2.0, rng).value == doctest::Approx(x.norm()).epsilon(1e-14));
  const auto X = SpaceDescriptor::lebesgue(1.5, 3);
  const auto g1 = banach::gaussian_avg(X, std::vector<CVec>{x}, 1.0, rng, 40000);
  CHECK(g1.method == banach::Method::monte_carlo);
  CHECK(std::abs(g1.value - std::sqrt(2.0 / kPi) * nrm(X, x)) <= 3.0 * g1.std_error);
  const std::vector<CVec> e{CVec::Unit(2, 0), CVec::Unit(2, 1)};
  const auto g2 = banach::gaussian_avg(SpaceDescriptor::lebesgue(3.0, 2), e, 2.0, rng, 40000);
  const double exact2 = std::sqrt(2.0);
  CHECK(g2.value == doctest::Approx(exact2).epsilon(0.05));
}

TEST_CASE("rademacher sums are dominated by gaussian sums") {
  const RandomSource rng{7, 0};
  for (std::size_t s = 0; s < spaces().size(); ++s) {
    const auto& X = spaces()[s];
    const auto xs = randvecs(5, X.coords(), rng.substream(s));
    const auto r = banach::rademacher_avg(X, xs, 1.0, rng);
    const auto g = banach::gaussian_avg(X, xs, 1.0, rng.substream(100 + s), 8192);
    CHECK(r.value <= std::sqrt(kPi / 2.0) * g.value + 3.0 * g.std_error);
  }
}

TEST_CASE("square function norm") {
  const auto L1 = SpaceDescriptor::lebesgue(1.0, 2);
  const std::vector<CVec> same{CVec::Unit(2, 0), CVec::Unit(2, 0)};
  CHECK(banach::square_function_norm(L1, same) == doctest::Approx(std::sqrt(2.0)));
  const std::vector<CVec> e{CVec::Unit(2, 0), CVec::Unit(2, 1)};
  CHECK(banach::square_function_norm(SpaceDescriptor::lebesgue(2.0, 2), e) == doctest::Approx(std::sqrt(2.0)));
  const CVec x = randvec(4, RandomSource{8, 0});
  const auto X = SpaceDescriptor::lebesgue(1.5, 4);
  CHECK(banach::square_function_norm(X, std::vector<CVec>{x}) == doctest::Approx(nrm(X, x)));
  CHECK_THROWS_AS(banach::square_function_norm(SpaceDescriptor::schatten(2.0, 2), std::vector<CVec>{CVec::Zero(4)}),
                  UnsupportedSpace);
}

TEST_CASE("gaussian product norm") {
  const RandomSource rng{9, 0};
  const auto xs = randvecs(3, 4, rng);
  double sq = 0.0;
  for (const auto& x : xs) sq += x.squaredNorm();
  CHECK(banach::gaussian_product_norm(SpaceDescriptor::hilbert(4), xs, rng).value == doctest::Approx(std::sqrt(sq)));
  const auto X = SpaceDescriptor::lebesgue(1.0, 4);
  CHECK(banach::gaussian_product_norm(X, std::vector<CVec>{xs[0]}, rng).value ==
        doctest::Approx(nrm(X, xs[0])).epsilon(1e-12));
  const std::vector<CVec> e{CVec::Unit(2, 0), CVec::Unit(2, 1)};
  const auto g = banach::gaussian_product_norm(SpaceDescriptor::lebesgue(1.0, 2), e, rng, 60000);
  CHECK(std::abs(g.value - std::sqrt(2.0 + 4.0 / kPi)) <= 3.0 * g.std_error);
}

TEST_CASE("contraction principle") {
  const RandomSource rng{10, 0};
  const auto X = SpaceDescriptor::lebesgue(1.0, 4);
  const auto xs = randvecs(6, 4, rng);
  const std::vector<cplx> ones(6, 1.0), zeros(6, 0.0);
  const auto a = banach::contraction_check(X, xs, ones, rng);
  CHECK(a.lhs == doctest::Approx(a.rhs / 2.0));
  CHECK(a.pass);
  const auto b = banach::contraction_check(X, xs, zeros, rng);
  CHECK(b.lhs == 0.0);
  CHECK(b.pass);
  for (int i = 0; i < 50; ++i) {
    std::vector<cplx> lam;
    for (int k = 0; k < 6; ++k) lam.push_back(cplx(2.0 * rng.engine(1000 + 10 * i + k).uniform() - 1.0, 0.0));
    const auto r = banach::contraction_check(X, randvecs(6, 4, rng.substream(50 + i)), lam, rng);
    CHECK(r.method == banach::Method::exact_enum);
    CHECK(r.pass);
  }
  CHECK_THROWS_AS(banach::contraction_check(X, xs, std::vector<cplx>(5, 1.0), rng), InvalidInput);
}

TEST_CASE("R-bound lower estimates") {
  const RandomSource rng{13, 0};
  banach::RBoundOptions opt;
  opt.restarts = 3;
  opt.sweeps = 10;
  for (const auto& X : {SpaceDescriptor::hilbert(3), SpaceDescriptor::lebesgue(1.0, 3)}) {
    const std::vector<banach::LinearMap> id{[](const CVec& x) { return x; }};
    const auto r = banach::rbound_estimate(id, X, X, 3, rng, opt);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.semantic == banach::Semantic::lower_bound);
    const std::vector<banach::LinearMap> c{[](const CVec& x) { return CVec(cplx(0.0, -2.5) * x); }};
    CHECK(banach::rbound_estimate(c, X, X, 3, rng, opt).value == doctest::Approx(2.5).epsilon(1e-12));
  }
  const auto X = SpaceDescriptor::lebesgue(1.0, 4);
  std::vector<banach::LinearMap> mult;
  for (int j = 0; j < 4; ++j) {
    const CVec m = randvec(4, rng.substream(200 + j)).unaryExpr([](cplx z) { return z / std::max(1.0, std::abs(z)); });
    mult.push_back([m](const CVec& x) { return CVec(m.cwiseProduct(x)); });
  }
  CHECK(banach::rbound_estimate(mult, X, X, 3, rng, opt).value <= 2.0);
  CHECK_THROWS_AS(banach::rbound_estimate(std::vector<banach::LinearMap>{}, X, X, 2, rng, opt), InvalidInput);
}

TEST_CASE("random sources are reproducible") {
  const RandomSource a{42, 7};
  CHECK(a.engine(5)() == RandomSource{42, 7}.engine(5)());
  CHECK(a.engine(5)() != a.engine(6)());
  CHECK(a.substream(1).engine(0)() == a.substream(1).engine(0)());
  CHECK(a.substream(1).engine(0)() != a.substream(2).engine(0)());
  CounterRng g = a.engine(0);
  for (int i = 0; i < 100; ++i) {
    const double u = g.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("component norm") {
  const RandomSource rng{14, 0};
  const CVec x = randvec(6, rng);
  CHECK(banach::ComponentNorm(SpaceDescriptor::hilbert(3), 2)(sp(x)) == doctest::Approx(x.norm()));
  const auto X = SpaceDescriptor::lebesgue(1.0, 3);
  CHECK(banach::ComponentNorm(X, 1)(sp(x.head(3))) == doctest::Approx(nrm(X, x.head(3))));
  const banach::ComponentNorm a(X, 2), b(X, 2);
  CHECK(a(sp(x)) == b(sp(x)));
  const CVec x2 = 2.0 * x;
  CHECK(a(sp(x2)) == doctest::Approx(2.0 * a(sp(x))));
}

TEST_CASE("serial and parallel kernels agree") {
  const RandomSource rng{15, 0};
  const auto X = SpaceDescriptor::lebesgue(1.5, 6);
  const auto norm = banach::norm_fn(X);
  const auto xs = randvecs(12, 6, rng);
  for (double p : {1.0, 2.5}) {
    CHECK(kernels::sign_moment_parallel(norm, xs, p) == doctest::Approx(kernels::sign_moment_serial(norm, xs, p)).epsilon(1e-13));
    for (auto kind : {kernels::Coefficients::rademacher, kernels::Coefficients::gaussian}) {
      const auto s = kernels::mc_moment_serial(norm, xs, p, rng, 3000, kind);
      const auto q = kernels::mc_moment_parallel(norm, xs, p, rng, 3000, kind);
      CHECK(q.mean == doctest::Approx(s.mean).epsilon(1e-12));
      CHECK(q.variance == doctest::Approx(s.variance).epsilon(1e-9));
    }
  }
  CHECK(std::pow(kernels::sign_moment_serial(norm, xs, 1.0), 1.0) ==
        doctest::Approx(oracle::rademacher_enum([&](const CVec& v) { return norm(sp(v)); }, xs, 1.0)).epsilon(1e-12));
}
