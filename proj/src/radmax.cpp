#include "radmaxlab/radmax.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "radmaxlab/parallel.hpp"

namespace radmaxlab::radmax {

namespace {

using banach::SpaceDescriptor;
using banach::SpaceKind;

// (E||sum eps_k lambda_k a_k||^p)^{1/p} and a subgradient in lambda. The
// sign set is either every pattern (eps_0 = +1) or a frozen Monte Carlo
// sample, so the objective is always a convex, 1-homogeneous function of
// lambda and the fixed-point ascent below cannot decrease it.
class ChainObjective {
 public:
  ChainObjective(const SpaceDescriptor& space, std::span<const CVec> a, const RandomSource& rng,
                 const RadmaxOptions& opts)
      : space_(space), p_(opts.moment), K_(static_cast<int>(a.size())) {
    A_.resize(space.coords(), K_);
    for (int k = 0; k < K_; ++k) A_.col(k) = a[static_cast<std::size_t>(k)];
    if (K_ <= opts.k_exact) {
      const std::int64_t patterns = std::int64_t{1} << (K_ - 1);
      signs_.resize(K_, patterns);
      for (std::int64_t s = 0; s < patterns; ++s) {
        signs_(0, s) = 1.0;
        for (int k = 1; k < K_; ++k) signs_(k, s) = ((s >> (k - 1)) & 1) ? -1.0 : 1.0;
      }
    } else {
      signs_.resize(K_, opts.budget);
      for (std::int64_t s = 0; s < opts.budget; ++s) {
        CounterRng g = rng.engine(static_cast<std::uint64_t>(s));
        for (int k = 0; k < K_; ++k) signs_(k, s) = g.sign();
      }
    }
    sum_.resize(space.coords());
    phi_.resize(space.coords());
  }

  int terms() const { return K_; }

  double operator()(const RVec& lambda, RVec* grad) {
    const Eigen::Index patterns = signs_.cols();
    double acc = 0.0;
    if (grad) grad->setZero(K_);
    const CMat B = A_ * lambda.cast<cplx>().asDiagonal();
    for (Eigen::Index s = 0; s < patterns; ++s) {
      sum_.noalias() = B * signs_.col(s).cast<cplx>();
      const double v = banach::norm(space_, std::span<const cplx>(sum_.data(), sum_.size()));
      const double vp = p_ == 1.0 ? v : std::pow(v, p_);
      acc += vp;
      if (grad && v > 0.0) {
        functional(v);
        const double w = p_ == 1.0 ? 1.0 : std::pow(v, p_ - 1.0);
        const RVec re = (A_.adjoint() * phi_).real();
        *grad += w * re.cwiseProduct(signs_.col(s));
      }
    }
    const double mean = acc / static_cast<double>(patterns);
    const double f = p_ == 1.0 ? mean : std::pow(mean, 1.0 / p_);
    if (grad) {
      *grad /= static_cast<double>(patterns);
      if (p_ != 1.0 && f > 0.0) *grad *= std::pow(f, 1.0 - p_);
    }
    return f;
  }

 private:
  void functional(double nrm) {
    const double q = space_.q();
    if (space_.kind() == SpaceKind::schatten && q != 2.0) {
      phi_ = banach::norming_functional(space_, std::span<const cplx>(sum_.data(), sum_.size()));
      return;
    }
    for (Eigen::Index j = 0; j < sum_.size(); ++j) {
      const double a = std::abs(sum_[j]);
      if (a == 0.0) phi_[j] = 0.0;
      else if (q == 1.0) phi_[j] = sum_[j] / a;
      else if (q == 2.0) phi_[j] = sum_[j] / nrm;
      else phi_[j] = sum_[j] * std::pow(a / nrm, q - 2.0) / nrm;
    }
  }

  SpaceDescriptor space_;
  double p_;
  int K_;
  CMat A_;
  Eigen::MatrixXd signs_;
  CVec sum_, phi_;
};

double ascend(ChainObjective& obj, RVec lambda, int sweeps, RVec& best) {
  RVec g;
  double f = obj(lambda, &g);
  for (int it = 0; it < sweeps; ++it) {
    const double gn = g.norm();
    if (!(gn > 0.0)) break;
    RVec next = g / gn;
    RVec gnext;
    const double fn = obj(next, &gnext);
    if (!(fn > f * (1.0 + 1e-12))) break;
    lambda = std::move(next);
    g = std::move(gnext);
    f = fn;
  }
  best = std::move(lambda);
  return f;
}

}  // namespace

double rademacher_maximal_point(const SpaceDescriptor& space, std::span<const CVec> averages,
                                const RandomSource& rng, const RadmaxOptions& opts,
                                RVec* best_lambda) {
  const int K = static_cast<int>(averages.size());
  if (K == 0) return 0.0;
  if (!(opts.moment >= 1.0)) throw InvalidInput("moment must be >= 1");
  double best = 0.0;
  int arg = 0;
  for (int k = 0; k < K; ++k) {
    const CVec& a = averages[static_cast<std::size_t>(k)];
    const double v = banach::norm(space, std::span<const cplx>(a.data(), a.size()));
    if (v > best) {
      best = v;
      arg = k;
    }
  }
  RVec best_l = RVec::Zero(K);
  best_l[arg] = 1.0;
  // For the p = 2 moment in a Hilbert space the objective is
  // (sum lambda_k^2 ||a_k||^2)^{1/2}, maximized by a basis vector.
  if (K == 1 || (space.is_hilbert() && opts.moment == 2.0) || best == 0.0) {
    if (best_lambda) *best_lambda = best_l;
    return best;
  }

  ChainObjective obj(space, averages, rng.substream(1), opts);
  std::vector<RVec> starts;
  starts.push_back(RVec::Constant(K, 1.0 / std::sqrt(static_cast<double>(K))));
  {
    RVec w(K);
    for (int k = 0; k < K; ++k) {
      const CVec& a = averages[static_cast<std::size_t>(k)];
      w[k] = banach::norm(space, std::span<const cplx>(a.data(), a.size()));
    }
    starts.push_back(w / w.norm());
  }
  const RandomSource cand = rng.substream(2);
  for (int r = 0; r < opts.restarts; ++r) {
    CounterRng g = cand.engine(static_cast<std::uint64_t>(r));
    RVec v(K);
    for (int k = 0; k < K; ++k) v[k] = g.normal();
    const double nv = v.norm();
    if (nv > 0.0) starts.push_back(v / nv);
  }
  for (const RVec& s : starts) {
    RVec l;
    const double v = ascend(obj, s, opts.sweeps, l);
    if (v > best) {
      best = v;
      best_l = l;
    }
  }
  if (best_lambda) *best_lambda = best_l;
  return best;
}

std::vector<CVec> ancestor_averages(const dyadic::GridFunction& u, std::int64_t cell) {
  const auto& g = u.grid();
  std::vector<CVec> out;
  const int st = g.stride();
  for (int k = -g.J(); k <= 0; ++k) {
    const std::int64_t q = g.cube_of(cell, k);
    CVec acc = CVec::Zero(st);
    std::int64_t count = 0;
    for (std::int64_t c = 0; c < g.cells(); ++c)
      if (g.cube_of(c, k) == q) {
        acc += u.values().segment(c * st, st);
        ++count;
      }
    out.push_back(acc / static_cast<double>(count));
  }
  return out;
}

RVec rademacher_maximal(const dyadic::GridFunction& u, const RandomSource& rng,
                        const RadmaxOptions& opts) {
  const auto& g = u.grid();
  if (g.ncomp() != 1) throw InvalidInput("rademacher_maximal expects a single component");
  const int st = g.stride();
  std::vector<CVec> levels;
  for (int k = -g.J(); k <= 0; ++k) levels.push_back(dyadic::cube_averages(u, k));
  RVec out(g.cells());
  parallel_for(g.cells(), [&](std::int64_t c) {
    std::vector<CVec> chain;
    chain.reserve(levels.size());
    for (int k = -g.J(); k <= 0; ++k)
      chain.push_back(levels[static_cast<std::size_t>(k + g.J())].segment(g.cube_of(c, k) * st, st));
    out[c] = rademacher_maximal_point(g.space(), chain, rng.substream(static_cast<std::uint64_t>(c)), opts);
  });
  return out;
}

dyadic::GridFunction random_function(const dyadic::Grid& g, const RandomSource& rng) {
  dyadic::GridFunction u(g);
  const std::int64_t cells = g.cells();
  const int st = g.stride();
  for (std::int64_t c = 0; c < cells; ++c) {
    CounterRng e = rng.engine(static_cast<std::uint64_t>(c));
    for (int i = 0; i < st; ++i) u.at(c)[i] = cplx(e.normal(), e.normal()) / std::sqrt(2.0);
  }
  return u;
}

RMFReport rmf_norm_experiment(const SpaceDescriptor& space, double p, int n, int J, int ensemble,
                              const RandomSource& rng, const RadmaxOptions& opts) {
  if (!(p > 1.0) || std::isinf(p)) throw InvalidInput("p must lie in (1, infinity)");
  RMFReport r;
  r.space = space.to_string();
  r.p = p;
  r.n = n;
  r.J = J;
  r.ensemble = ensemble;
  r.seed = rng.seed;
  r.options = opts;
  const dyadic::Grid g(n, J, 1, space);
  for (int e = 0; e < ensemble; ++e) {
    const RandomSource src = rng.substream(static_cast<std::uint64_t>(e));
    const auto u = random_function(g, src.substream(0));
    const double un = dyadic::lp_norm(u, p);
    const RVec mr = rademacher_maximal(u, src.substream(1), opts);
    const RVec m = dyadic::dyadic_maximal(u);
    r.ratios.push_back(dyadic::lp_norm(mr, p) / un);
    r.maximal_ratios.push_back(dyadic::lp_norm(m, p) / un);
  }
  if (!r.ratios.empty()) {
    r.max_ratio = *std::max_element(r.ratios.begin(), r.ratios.end());
    r.mean_ratio = std::accumulate(r.ratios.begin(), r.ratios.end(), 0.0) / r.ratios.size();
  }
  return r;
}

Counterexample counterexample_l1(int m) {
  if (m < 1) throw InvalidInput("m must be >= 1");
  if (m > 4) throw ResourceError("counterexample is limited to m <= 4");
  Counterexample r;
  r.m = m;
  r.dimension = 1 << m;
  const int n = r.dimension;
  std::vector<double> alpha(static_cast<std::size_t>(m + 1)), coef(static_cast<std::size_t>(m + 1));
  r.lambda = RVec::Zero(n + 1);
  for (int i = 1; i <= m; ++i) {
    alpha[i] = 1.0 / (i + 1);
    coef[i] = alpha[i] * std::ldexp(1.0, -(1 << i));  // alpha_i 2^{-2^i}
    r.lambda[1 << i] = alpha[i];
    const double tail = std::ldexp(1.0, -(1 << (i - 1)));
    r.chain_bound += alpha[i] * (1.0 - 2.0 * tail);
    r.weak_chain_bound += alpha[i] * (1.0 - 2.0 * tail) - alpha[i] * tail;
  }
  // Coordinate k is hit by term i iff k <= 2^{2^i}; group the coordinates by
  // the smallest such i and enumerate the signs once per group.
  const std::int64_t patterns = std::int64_t{1} << m;
  for (int j = 1; j <= m; ++j) {
    const double count = j == 1 ? 4.0 : std::ldexp(1.0, 1 << j) - std::ldexp(1.0, 1 << (j - 1));
    double e = 0.0;
    for (std::int64_t s = 0; s < patterns; ++s) {
      double v = 0.0;
      for (int i = j; i <= m; ++i) v += (((s >> (i - 1)) & 1) ? -1.0 : 1.0) * coef[i];
      e += std::abs(v);
    }
    r.value += count * e / static_cast<double>(patterns);
  }
  // Every cell carries a single unit vector, so ||u(x)||_1 = 1 everywhere.
  r.u_norm = 1.0;
  return r;
}

dyadic::GridFunction counterexample_function(int m) {
  if (m < 1) throw InvalidInput("m must be >= 1");
  if (m > 3) throw ResourceError("the counterexample function is materialized only for m <= 3");
  const int n = 1 << m;
  const dyadic::Grid g(1, n, 1, SpaceDescriptor::lebesgue(1.0, 1 << n));
  dyadic::GridFunction u(g);
  for (std::int64_t c = 0; c < g.cells(); ++c) u(c, 0, static_cast<int>(c)) = 1.0;
  return u;
}

DominationReport domination_checks(const dyadic::GridFunction& u, const RandomSource& rng,
                                   const RadmaxOptions& opts) {
  DominationReport r;
  const auto& space = u.grid().space();
  const RVec mr = rademacher_maximal(u, rng, opts);
  if (space.has_type_2()) {
    r.type2_checked = true;
    const RVec m = dyadic::dyadic_maximal(u);
    for (Eigen::Index c = 0; c < m.size(); ++c)
      if (m[c] > 0.0) r.type2_constant = std::max(r.type2_constant, mr[c] / m[c]);
  } else {
    r.notices.push_back("type-2 check skipped: " + space.to_string() + " lacks type 2");
  }
  if (space.is_lattice()) {
    r.lattice_checked = true;
    const auto lm = dyadic::lattice_maximal(u);
    for (std::int64_t c = 0; c < u.grid().cells(); ++c) {
      const double v = banach::norm(space, lm.at(c));
      if (v > 0.0) r.lattice_constant = std::max(r.lattice_constant, mr[c] / v);
    }
  } else {
    r.notices.push_back("lattice check skipped: " + space.to_string() + " is not a lattice");
  }
  return r;
}

}  // namespace radmaxlab::radmax
