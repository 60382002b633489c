#include "radmaxlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "radmaxlab/carleson.hpp"
#include "radmaxlab/kato.hpp"
#include "radmaxlab/parallel.hpp"
#include "radmaxlab/principal.hpp"
#include "radmaxlab/selftest.hpp"

namespace radmaxlab::harness {

using banach::NormEstimate;
using banach::SpaceDescriptor;
using ops::OperatorHandle;
using ops::Shape;

namespace {

std::vector<int> resolutions(const ExperimentConfig& c) { return c.J_list.empty() ? std::vector<int>{c.J} : c.J_list; }

Json summary(const std::vector<double>& xs) {
  Json s = Json::object();
  s["count"] = xs.size();
  if (xs.empty()) return s;
  s["min"] = *std::min_element(xs.begin(), xs.end());
  s["max"] = *std::max_element(xs.begin(), xs.end());
  s["mean"] = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  return s;
}

std::string p_key(double p) {
  std::ostringstream os;
  os << "p=" << p;
  return os.str();
}

radmax::RadmaxOptions radmax_options(const ExperimentConfig& c) {
  radmax::RadmaxOptions o;
  o.restarts = c.restarts;
  o.sweeps = c.sweeps;
  o.budget = c.budget;
  return o;
}

banach::RBoundOptions rbound_options(const ExperimentConfig& c) {
  banach::RBoundOptions o;
  o.restarts = c.restarts;
  o.sweeps = c.sweeps;
  o.budget = c.budget;
  return o;
}

banach::AveragingOptions averaging_options(const ExperimentConfig& c) {
  banach::AveragingOptions o;
  o.budget = c.budget;
  return o;
}

void check_common(const ExperimentConfig& c) {
  if (c.n != 1 && c.n != 2) throw ConfigError("n must be 1 or 2");
  for (int J : resolutions(c))
    if (J < 1 || J > 14) throw ConfigError("grid resolution J must lie in 1..14");
  if (c.ensemble < 0) throw ConfigError("ensemble size must be nonnegative");
  for (double p : c.p)
    if (!(p >= 1.0)) throw ConfigError("every p must be at least 1");
}

/// (I - t^2 Delta)^{-1} on comps components.
OperatorHandle poisson(const Shape& s, int comps, double t) {
  return ops::multiplier(s, spectral::make_symbol(s, [comps, t](const std::array<double, 2>& x) {
    return CMat(CMat::Identity(comps, comps) / (1.0 + t * t * (x[0] * x[0] + x[1] * x[1])));
  }));
}

OperatorHandle sqrt_minus_laplacian(const Shape& s, double t) {
  return ops::multiplier(s, spectral::make_symbol(s, [t](const std::array<double, 2>& x) {
    return CMat(CMat::Constant(1, 1, t * std::hypot(x[0], x[1])));
  }));
}

/// Translation u -> u(. + h) followed by nothing else.
OperatorHandle translation(const Shape& s, const std::array<double, 2>& h) {
  return ops::multiplier(s, spectral::make_symbol(s, [h](const std::array<double, 2>& x) {
    return CMat(CMat::Constant(1, 1, std::exp(cplx(0.0, x[0] * h[0] + x[1] * h[1]))));
  }));
}

banach::LinearMap as_map(const OperatorHandle& T, std::int64_t rows) {
  return [T, rows](const CVec& x) {
    const CMat in = Eigen::Map<const CMat>(x.data(), rows, x.size() / rows);
    const CMat out = T.apply(in);
    return CVec(Eigen::Map<const CVec>(out.data(), out.size()));
  };
}

void add_estimate(Json& row, const NormEstimate& e) {
  row.push_back(banach::to_string(e.method));
  row.push_back(e.std_error);
}

std::string short_error(const std::exception& e) { return e.what(); }

}  // namespace

Report run_kato(const ExperimentConfig& cfg) {
  check_common(cfg);
  Report rep("kato", cfg);
  const Shape s{cfg.n, cfg.J};
  const std::int64_t cells = s.cells();
  const RandomSource rng{cfg.seed, 1};
  ops::SqrtOptions so;
  so.nodes_per_decade = cfg.nodes_per_decade;
  const bool with_dense = cells <= 1024;
  const double band_lo = 0.01, band_hi = 100.0, agree_tol = 1e-4;

  struct Member {
    std::vector<double> sq, gr;
    double rel = 0.0;
    int nodes = 0;
    std::string method, error;
  };
  std::vector<Member> out(static_cast<std::size_t>(cfg.ensemble));
  parallel_for(cfg.ensemble, [&](std::int64_t i) {
    Member& m = out[static_cast<std::size_t>(i)];
    const RandomSource r = rng.substream(static_cast<std::uint64_t>(i));
    try {
      const ops::KatoOperator k =
          cfg.n == 1 ? ops::kato_operator_scalar(s, ops::random_coefficient(s, cfg.lambda, cfg.Lambda, r.substream(0)))
                     : ops::kato_operator(s, ops::random_matrix_field(s, cfg.lambda, cfg.Lambda, r.substream(0)));
      const CMat u = ops::gaussian_field(cells, 1, r.substream(1));
      const auto quad = ops::sqrt_L(k, u, ops::SqrtMethod::resolvent_quadrature, so);
      m.nodes = quad.nodes;
      CMat root = quad.value;
      m.method = ops::to_string(ops::SqrtMethod::resolvent_quadrature);
      if (with_dense) {
        root = ops::sqrt_L(k, u, ops::SqrtMethod::dense_schur, so).value;
        m.rel = (root - quad.value).norm() / root.norm();
        m.method = ops::to_string(ops::SqrtMethod::dense_schur);
      }
      const CMat g = k.grad.apply(u);
      for (double p : cfg.p) {
        m.sq.push_back(ops::field_lp_norm(root, cells, p));
        m.gr.push_back(ops::field_lp_norm(g, cells, p));
      }
    } catch (const Error& e) {
      m.error = short_error(e);
    }
  });

  auto& ratios = rep.table("ratios", "kato_square_root_estimate",
                           {"member", "p", "sqrt_norm", "grad_norm", "ratio", "method", "std_error", "band_low",
                            "band_high", "pass"});
  auto& agree = rep.table("sqrt_methods", "kato_square_root_estimate",
                          {"member", "relative_difference", "nodes", "tolerance", "pass"});
  auto& failures = rep.table("failures", "kato_square_root_estimate", {"member", "error"});
  std::vector<std::vector<double>> by_p(cfg.p.size());
  std::vector<double> diffs;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Member& m = out[i];
    if (!m.error.empty()) {
      rep.add_row(failures, Json::array({i, m.error}));
      continue;
    }
    for (std::size_t j = 0; j < cfg.p.size(); ++j) {
      const double ratio = m.sq[j] / m.gr[j];
      const bool ok = ratio >= band_lo && ratio <= band_hi;
      by_p[j].push_back(ratio);
      rep.add_row(ratios, Json::array({i, cfg.p[j], m.sq[j], m.gr[j], ratio, m.method, 0.0, band_lo, band_hi, ok}));
      if (!ok) rep.fail("ratio outside band for member " + std::to_string(i));
    }
    if (with_dense) {
      const bool ok = m.rel <= agree_tol;
      diffs.push_back(m.rel);
      rep.add_row(agree, Json::array({i, m.rel, m.nodes, agree_tol, ok}));
      if (!ok) rep.fail("square root methods disagree for member " + std::to_string(i));
    }
  }
  for (std::size_t j = 0; j < cfg.p.size(); ++j) rep.aggregates()["ratio " + p_key(cfg.p[j])] = summary(by_p[j]);
  rep.aggregates()["relative_difference"] = summary(diffs);
  if (!with_dense) rep.note("grid too large for the dense oracle; quadrature only");

  // R-bounds of the four resolvent families on a small grid.
  const Shape small{1, std::min(cfg.J, 4)};
  const ops::KatoOperator k =
      ops::kato_operator_scalar(small, ops::random_coefficient(small, cfg.lambda, cfg.Lambda, rng.substream(1u << 20)));
  std::vector<std::vector<banach::LinearMap>> fam(4);
  for (int lev = -small.J; lev <= 0; ++lev) {
    const double t = std::ldexp(1.0, lev);
    ops::SolveOptions dense;
    dense.method = ops::SolveMethod::dense;
    const OperatorHandle R = ops::resolvent(k.L, t * t, ops::ResolventStyle::shift, dense);
    const OperatorHandle D = sqrt_minus_laplacian(small, t);
    fam[0].push_back(as_map(R, small.cells()));
    fam[1].push_back(as_map(ops::compose({D, R}), small.cells()));
    fam[2].push_back(as_map(ops::compose({R, D}), small.cells()));
    fam[3].push_back(as_map(ops::compose({D, R, D}), small.cells()));
  }
  const char* names[4] = {"(I+t^2L)^-1", "t sqrt(-Delta) (I+t^2L)^-1", "(I+t^2L)^-1 t sqrt(-Delta)",
                          "t sqrt(-Delta) (I+t^2L)^-1 t sqrt(-Delta)"};
  auto& rb = rep.table("rbounds", "four_resolvent_families_rbounded",
                       {"family", "J", "p", "value", "method", "std_error", "semantic"});
  const int tuple = std::min(4, small.J + 1);
  for (std::size_t j = 0; j < cfg.p.size(); ++j) {
    const auto nf = ops::field_norm_fn(small, 1, SpaceDescriptor::hilbert(1), cfg.p[j]);
    for (int f = 0; f < 4; ++f) {
      const NormEstimate e = banach::rbound_estimate(fam[static_cast<std::size_t>(f)], nf, nf,
                                                     static_cast<int>(small.cells()), tuple,
                                                     rng.substream(0x5000 + 16 * j + f), rbound_options(cfg));
      Json row = Json::array({names[f], small.J, cfg.p[j], e.value});
      add_estimate(row, e);
      row.push_back(banach::to_string(e.semantic));
      rep.add_row(rb, std::move(row));
    }
  }
  return rep;
}

Report run_rmf(const ExperimentConfig& cfg) {
  check_common(cfg);
  Report rep("rmf", cfg);
  const SpaceDescriptor X = SpaceDescriptor::parse(cfg.space);
  const RandomSource rng{cfg.seed, 2};
  auto& t = rep.table("rmf", "rmf_property",
                      {"J", "p", "member", "rmf_ratio", "maximal_ratio", "method", "std_error", "semantic"});
  auto& st = rep.table("stability", "rmf_property", {"J", "p", "max_ratio", "mean_ratio"});
  const auto opts = radmax_options(cfg);
  for (int J : resolutions(cfg)) {
    for (std::size_t j = 0; j < cfg.p.size(); ++j) {
      const auto r = radmax::rmf_norm_experiment(X, cfg.p[j], cfg.n, J, cfg.ensemble,
                                                 rng.substream(static_cast<std::uint64_t>(J * 64 + j)), opts);
      const std::string method = J + 1 <= opts.k_exact ? "exact_enum" : "monte_carlo";
      for (std::size_t i = 0; i < r.ratios.size(); ++i)
        rep.add_row(t, Json::array({J, cfg.p[j], i, r.ratios[i], r.maximal_ratios[i], method, 0.0, "lower_bound"}));
      rep.add_row(st, Json::array({J, cfg.p[j], r.max_ratio, r.mean_ratio}));
    }
  }
  if (X.is_scalar()) rep.note("scalar values: the Rademacher maximal function equals the dyadic maximal function");
  return rep;
}

Report run_counterexample(const ExperimentConfig& cfg) {
  if (cfg.m < 1) throw ConfigError("m must be at least 1");
  Report rep("counterexample", cfg);
  auto& t = rep.table("counterexample", "l1_has_no_rmf",
                      {"m", "dimension", "value", "chain_bound", "weak_chain_bound", "u_norm", "method", "std_error",
                       "increasing"});
  double prev = -1.0;
  for (int m = 1; m <= cfg.m; ++m) {
    const auto c = radmax::counterexample_l1(m);
    const bool inc = c.value > prev;
    if (!inc) rep.fail("counterexample values not increasing at m = " + std::to_string(m));
    rep.add_row(t, Json::array({m, c.dimension, c.value, c.chain_bound, c.weak_chain_bound, c.u_norm, "exact_enum",
                                0.0, inc}));
    prev = c.value;
  }
  return rep;
}

Report run_carleson(const ExperimentConfig& cfg) {
  check_common(cfg);
  Report rep("carleson", cfg);
  const SpaceDescriptor X = SpaceDescriptor::parse(cfg.space);
  const auto kind = carleson::parse_ensemble(cfg.ensemble_kind);
  const RandomSource rng{cfg.seed, 3};
  auto& t = rep.table("embedding", "carleson_embedding",
                      {"J", "p", "eps", "member", "ratio", "method", "std_error"});
  auto& st = rep.table("stability", "carleson_embedding", {"J", "p", "eps", "max_ratio", "mean_ratio"});
  for (int J : resolutions(cfg)) {
    for (std::size_t j = 0; j < cfg.p.size(); ++j) {
      const auto r = carleson::embedding_constant_experiment(X, cfg.p[j], cfg.eps, cfg.n, J, cfg.ensemble, kind,
                                                             rng.substream(static_cast<std::uint64_t>(J * 64 + j)));
      for (std::size_t i = 0; i < r.ratios.size(); ++i)
        rep.add_row(t, Json::array({J, cfg.p[j], cfg.eps, i, r.ratios[i], banach::to_string(r.methods[i]), 0.0}));
      rep.add_row(st, Json::array({J, cfg.p[j], cfg.eps, r.max_ratio, r.mean_ratio}));
    }
  }
  return rep;
}

Report run_paraproduct(const ExperimentConfig& cfg) {
  check_common(cfg);
  Report rep("paraproduct", cfg);
  const SpaceDescriptor X = SpaceDescriptor::parse(cfg.space);
  const RandomSource rng{cfg.seed, 4};
  auto& st = rep.table("stability", "paraproduct_bound", {"J", "p", "swapped", "max_ratio", "mean_ratio", "skipped"});
  for (int swapped = 0; swapped < 2; ++swapped) {
    auto& t = rep.table(swapped ? "paraproduct_swapped" : "paraproduct", "paraproduct_bound",
                        {"J", "p", "member", "ratio", "method", "std_error"});
    for (int J : resolutions(cfg))
      for (std::size_t j = 0; j < cfg.p.size(); ++j) {
        const auto r = carleson::paraproduct_bound_experiment(
            X, cfg.p[j], cfg.n, J, cfg.ensemble, swapped != 0,
            rng.substream(static_cast<std::uint64_t>(J * 64 + j * 2 + swapped)));
        for (std::size_t i = 0; i < r.ratios.size(); ++i)
          rep.add_row(t, Json::array({J, cfg.p[j], i, r.ratios[i], "exact", 0.0}));
        rep.add_row(st, Json::array({J, cfg.p[j], swapped != 0, r.max_ratio, r.mean_ratio, r.skipped}));
      }
  }
  return rep;
}

Report run_unperturbed_checks(const ExperimentConfig& cfg) {
  check_common(cfg);
  Report rep("unperturbed", cfg);
  const SpaceDescriptor X = SpaceDescriptor::parse(cfg.space);
  const RandomSource rng{cfg.seed, 5};
  auto& rt = rep.table("randomized_ratios", "averages_versus_poisson",
                       {"J", "member", "estimate", "lhs", "u_norm", "ratio", "method", "std_error"});
  auto& pt = rep.table("poincare", "poincare_inequality",
                       {"J", "member", "m", "lhs", "rhs", "ratio", "method", "std_error"});
  auto& st = rep.table("stability", "averages_versus_poisson", {"estimate", "J", "max_ratio"});
  const char* names[3] = {"(A-I)P", "A(P-I)", "A-P"};
  const int nodes = 4;

  for (int J : resolutions(cfg)) {
    const Shape s{cfg.n, J};
    const std::int64_t cells = s.cells();
    std::vector<std::vector<OperatorHandle>> fam(3);
    std::vector<std::vector<OperatorHandle>> left(2);
    const OperatorHandle I = ops::identity(s, 1);
    std::vector<std::array<double, 2>> shifts = {{0.0, 0.0}, {1.0, 0.0}};
    for (int k = -J; k <= 0; ++k) {
      const double t = std::ldexp(1.0, k);
      const OperatorHandle A = ops::averaging(s, 1, k);
      const OperatorHandle P = poisson(s, 1, t);
      fam[0].push_back(ops::compose({ops::add({A, ops::scaled(-1.0, I)}), P}));
      fam[1].push_back(ops::compose({A, ops::add({P, ops::scaled(-1.0, I)})}));
      fam[2].push_back(ops::add({A, ops::scaled(-1.0, P)}));
      for (std::size_t mi = 0; mi < shifts.size(); ++mi) {
        const OperatorHandle S = translation(s, {t * shifts[mi][0], t * shifts[mi][1]});
        left[mi].push_back(ops::compose({ops::add({I, ops::scaled(-1.0, ops::compose({S, A}))}), P}));
      }
    }
    std::vector<std::vector<double>> worst(3);
    for (int i = 0; i < cfg.ensemble; ++i) {
      const RandomSource r = rng.substream(static_cast<std::uint64_t>(J * 4096 + i));
      const CMat u = ops::gaussian_field(cells, X.coords(), r.substream(0));
      const double un = ops::field_norm(u, s, 1, X, cfg.p[0]);
      for (int e = 0; e < 3; ++e) {
        const NormEstimate est = ops::quadratic_estimate(fam[static_cast<std::size_t>(e)], u, X, cfg.p[0],
                                                         r.substream(10 + e), averaging_options(cfg));
        Json row = Json::array({J, i, names[e], est.value, un, est.value / un});
        add_estimate(row, est);
        rep.add_row(rt, std::move(row));
        worst[static_cast<std::size_t>(e)].push_back(est.value / un);
      }
      for (std::size_t mi = 0; mi < shifts.size(); ++mi) {
        const NormEstimate lhs =
            ops::quadratic_estimate(left[mi], u, X, cfg.p[0], r.substream(20 + mi), averaging_options(cfg));
        // Midpoint rule over z in [-1, 1]^n and t in [0, 1].
        double rhs = 0.0, se = 0.0;
        const int zn = cfg.n == 1 ? nodes : nodes * nodes;
        for (int zi = 0; zi < zn; ++zi) {
          const std::array<double, 2> z = {-1.0 + (2.0 * (zi % nodes) + 1.0) / nodes,
                                           cfg.n == 2 ? -1.0 + (2.0 * (zi / nodes) + 1.0) / nodes : 0.0};
          const std::array<double, 2> v = {shifts[mi][0] + z[0], cfg.n == 2 ? shifts[mi][1] + z[1] : 0.0};
          for (int ti = 0; ti < nodes; ++ti) {
            const double tau = (ti + 0.5) / nodes;
            std::vector<OperatorHandle> integrand;
            for (int k = -J; k <= 0; ++k) {
              const double h = std::ldexp(1.0, k);
              integrand.push_back(ops::multiplier(s, spectral::make_symbol(s, [h, v, tau](const std::array<double, 2>& x) {
                const double dot = x[0] * v[0] + x[1] * v[1];
                const cplx sym = h * cplx(0.0, dot) * std::exp(cplx(0.0, tau * h * dot)) /
                                 (1.0 + h * h * (x[0] * x[0] + x[1] * x[1]));
                return CMat(CMat::Constant(1, 1, sym));
              })));
            }
            const NormEstimate e = ops::quadratic_estimate(integrand, u, X, cfg.p[0],
                                                           r.substream(1000 + mi * 4096 + zi * nodes + ti),
                                                           averaging_options(cfg));
            rhs += e.value;
            se = std::max(se, e.std_error);
          }
        }
        rhs *= std::pow(2.0, cfg.n) / (zn * nodes);
        Json row = Json::array({J, i, static_cast<int>(mi), lhs.value, rhs, rhs > 0.0 ? lhs.value / rhs : 0.0});
        row.push_back(banach::to_string(lhs.method));
        row.push_back(std::max(lhs.std_error, se));
        rep.add_row(pt, std::move(row));
      }
    }
    for (int e = 0; e < 3; ++e) {
      const auto& w = worst[static_cast<std::size_t>(e)];
      rep.add_row(st, Json::array({names[e], J, w.empty() ? 0.0 : *std::max_element(w.begin(), w.end())}));
    }
  }
  return rep;
}

Report run_quadratic(const ExperimentConfig& cfg) {
  check_common(cfg);
  Report rep("quadratic", cfg);
  const SpaceDescriptor X = SpaceDescriptor::parse(cfg.space);
  const RandomSource rng{cfg.seed, 6};
  auto& t = rep.table("quadratic", "main_quadratic_estimate",
                      {"J", "member", "B", "group", "mainest", "high_frequency", "reduced", "u_norm", "method",
                       "std_error"});
  auto& failures = rep.table("failures", "main_quadratic_estimate", {"J", "member", "error"});
  auto& st = rep.table("stability", "main_quadratic_estimate", {"J", "group", "max_mainest", "max_high_frequency",
                                                                "max_reduced"});
  for (int J : resolutions(cfg)) {
    const Shape s{cfg.n, J};
    const int N = 1 + cfg.n;
    const std::int64_t rows = N * s.cells();
    std::vector<std::vector<double>> worst(6);
    for (int i = 0; i < std::max(cfg.ensemble, 1); ++i) {
      const RandomSource r = rng.substream(static_cast<std::uint64_t>(J * 4096 + i));
      try {
        const ops::HodgeDiracConfig hc = i == 0 ? ops::HodgeDiracConfig::unperturbed(s)
                                                : ops::rough_config(s, cfg.lambda, cfg.Lambda, r.substream(0));
        const ops::HodgeDirac h = ops::hodge_dirac(hc);
        const auto Q = ops::quadratic_family(h, J);
        std::vector<OperatorHandle> high, reduced;
        for (int k = -J; k <= 0; ++k) {
          const auto& Qk = Q[static_cast<std::size_t>(k + J)];
          const OperatorHandle I = ops::identity(s, N);
          high.push_back(ops::compose({Qk, ops::add({I, ops::scaled(-1.0, poisson(s, N, std::ldexp(1.0, k)))})}));
          const auto gamma = ops::principal_part(Qk, k, -1);
          reduced.push_back(ops::add({Qk, ops::scaled(-1.0, ops::principal_term(s, gamma, k))}));
        }
        CMat v = CMat::Zero(rows, X.coords());
        v.topRows(s.cells()) = ops::gaussian_field(s.cells(), X.coords(), r.substream(1));
        const CMat in_range = h.Gamma.apply(v);
        const CMat control = ops::gaussian_field(rows, X.coords(), r.substream(2));
        for (int g = 0; g < 2; ++g) {
          const CMat& u = g == 0 ? in_range : control;
          const double un = ops::field_norm(u, s, N, X, cfg.p[0]);
          const auto opt = averaging_options(cfg);
          const NormEstimate a = ops::quadratic_estimate(Q, u, X, cfg.p[0], r.substream(10 + 3 * g), opt);
          const NormEstimate b = ops::quadratic_estimate(high, u, X, cfg.p[0], r.substream(11 + 3 * g), opt);
          const NormEstimate c = ops::quadratic_estimate(reduced, u, X, cfg.p[0], r.substream(12 + 3 * g), opt);
          rep.add_row(t, Json::array({J, i, i == 0 ? "identity" : "rough", g == 0 ? "range_gamma" : "control",
                                      a.value / un, b.value / un, c.value / un, un, banach::to_string(a.method),
                                      std::max({a.std_error, b.std_error, c.std_error})}));
          worst[static_cast<std::size_t>(3 * g)].push_back(a.value / un);
          worst[static_cast<std::size_t>(3 * g + 1)].push_back(b.value / un);
          worst[static_cast<std::size_t>(3 * g + 2)].push_back(c.value / un);
        }
      } catch (const ResolventFailure& e) {
        rep.add_row(failures, Json::array({J, i, short_error(e)}));
      } catch (const SolverFailure& e) {
        rep.add_row(failures, Json::array({J, i, short_error(e)}));
      }
    }
    auto mx = [](const std::vector<double>& w) { return w.empty() ? 0.0 : *std::max_element(w.begin(), w.end()); };
    for (int g = 0; g < 2; ++g)
      rep.add_row(st, Json::array({J, g == 0 ? "range_gamma" : "control", mx(worst[3 * g]), mx(worst[3 * g + 1]),
                                   mx(worst[3 * g + 2])}));
  }
  return rep;
}

Report run_rbound(const ExperimentConfig& cfg) {
  check_common(cfg);
  Report rep("rbound", cfg);
  const SpaceDescriptor X = SpaceDescriptor::parse(cfg.space);
  const RandomSource rng{cfg.seed, 7};
  const Shape s{cfg.n, std::min(cfg.J, cfg.n == 1 ? 4 : 2)};
  const int N = 1 + cfg.n;
  const std::int64_t rows = N * s.cells();
  if (s.J < cfg.J) rep.note("R-bounds are estimated on the grid J = " + std::to_string(s.J));
  auto& t = rep.table("rbounds", "r_bisectoriality",
                      {"member", "B", "family", "p", "value", "method", "std_error", "semantic"});
  auto& failures = rep.table("failures", "r_bisectoriality", {"member", "error"});
  const int tuple = std::min(4, s.J + 1);
  for (int i = 0; i < std::max(cfg.ensemble, 1); ++i) {
    const RandomSource r = rng.substream(static_cast<std::uint64_t>(i));
    try {
      const ops::HodgeDiracConfig hc =
          i == 0 ? ops::HodgeDiracConfig::unperturbed(s) : ops::rough_config(s, cfg.lambda, cfg.Lambda, r.substream(0));
      const ops::HodgeDirac h = ops::hodge_dirac(hc);
      std::vector<std::vector<banach::LinearMap>> fam(3);
      for (int k = -s.J; k <= 0; ++k) {
        const double tt = std::ldexp(1.0, k);
        const auto R = ops::resolvents(h.PiB, tt);
        fam[0].push_back(as_map(R.R, rows));
        fam[0].push_back(as_map(R.Rminus, rows));
        fam[1].push_back(as_map(R.P, rows));
        fam[2].push_back(as_map(R.Q, rows));
      }
      const char* names[3] = {"R_t", "P_t", "Q_t"};
      for (std::size_t j = 0; j < cfg.p.size(); ++j) {
        const auto nf = ops::field_norm_fn(s, N, X, cfg.p[j]);
        for (int f = 0; f < 3; ++f) {
          const NormEstimate e =
              banach::rbound_estimate(fam[static_cast<std::size_t>(f)], nf, nf, static_cast<int>(rows * X.coords()),
                                      tuple, r.substream(100 + 8 * j + f), rbound_options(cfg));
          Json row = Json::array({i, i == 0 ? "identity" : "rough", names[f], cfg.p[j], e.value});
          add_estimate(row, e);
          row.push_back(banach::to_string(e.semantic));
          rep.add_row(t, std::move(row));
        }
      }
    } catch (const ResolventFailure& e) {
      rep.add_row(failures, Json::array({i, short_error(e)}));
    } catch (const SolverFailure& e) {
      rep.add_row(failures, Json::array({i, short_error(e)}));
    }
  }
  return rep;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"kato",        "rmf",       "counterexample", "carleson", "paraproduct",
                                                 "unperturbed", "quadratic", "rbound",         "selftest"};
  return names;
}

Report run_experiment(const ExperimentConfig& cfg) {
  const std::string& e = cfg.experiment;
  if (e == "kato") return run_kato(cfg);
  if (e == "rmf") return run_rmf(cfg);
  if (e == "counterexample") return run_counterexample(cfg);
  if (e == "carleson") return run_carleson(cfg);
  if (e == "paraproduct") return run_paraproduct(cfg);
  if (e == "unperturbed") return run_unperturbed_checks(cfg);
  if (e == "quadratic") return run_quadratic(cfg);
  if (e == "rbound") return run_rbound(cfg);
  if (e == "selftest") return run_selftest(cfg);
  throw ConfigError("unknown experiment: " + e);
}

}  // namespace radmaxlab::harness
