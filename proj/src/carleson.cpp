#include "radmaxlab/carleson.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "radmaxlab/parallel.hpp"

namespace radmaxlab::carleson {

using banach::NormEstimate;
using banach::SpaceDescriptor;

namespace {

Grid scalar_grid(int n, int J) { return Grid::scalar(n, J); }

cplx disc_sample(CounterRng& e) {
  const double r = std::sqrt(e.uniform());
  return std::polar(r, 2.0 * kPi * e.uniform());
}

void check_p(double p) {
  if (!(p >= 1.0) || std::isinf(p)) throw InvalidInput("p must be a finite number >= 1");
}

}  // namespace

CarlesonFamily::CarlesonFamily(int n, int J) : n_(n), J_(J) {
  (void)scalar_grid(n, J);
}

void CarlesonFamily::set(const DyadicCube& q, CVec values) {
  if (q.level < -J_ || q.level > 0) throw InvalidInput("cube level out of range");
  if (values.size() != cells()) throw InvalidInput("b_Q needs one value per cell");
  const Grid g = scalar_grid(n_, J_);
  for (std::int64_t c = 0; c < cells(); ++c)
    if (values[c] != 0.0 && !q.contains_cell(g, c))
      throw InvalidInput("b_Q is not supported in Q (cell " + std::to_string(c) + ")");
  terms_[{q.level, q.linear(n_)}] = std::move(values);
}

void CarlesonFamily::set_constant(const DyadicCube& q, cplx c) {
  const Grid g = scalar_grid(n_, J_);
  CVec v = CVec::Zero(cells());
  for (std::int64_t x = 0; x < cells(); ++x)
    if (q.contains_cell(g, x)) v[x] = c;
  set(q, std::move(v));
}

void CarlesonFamily::erase(const DyadicCube& q) { terms_.erase({q.level, q.linear(n_)}); }

const CVec* CarlesonFamily::find(const DyadicCube& q) const {
  auto it = terms_.find({q.level, q.linear(n_)});
  return it == terms_.end() ? nullptr : &it->second;
}

CarlesonFamily CarlesonFamily::scaled(cplx c) const {
  CarlesonFamily out = *this;
  for (auto& [k, v] : out.terms_) v *= c;
  return out;
}

std::vector<CarlesonFamily::Key> CarlesonFamily::active_at(std::int64_t c) const {
  const Grid g = scalar_grid(n_, J_);
  std::vector<Key> out;
  for (int k = -J_; k <= 0; ++k) {
    const Key key{k, g.cube_of(c, k)};
    if (terms_.count(key)) out.push_back(key);
  }
  return out;
}

void save_family_csv(const CarlesonFamily& b, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot write " + path);
  os.precision(17);
  os << "# n=" << b.n() << " J=" << b.J() << "\n";
  os << "level,index0,index1,cell,real,imag\n";
  for (const auto& [key, v] : b.terms()) {
    const DyadicCube q = b.cube(key);
    for (std::int64_t c = 0; c < v.size(); ++c)
      if (v[c] != 0.0)
        os << q.level << ',' << q.index[0] << ',' << q.index[1] << ',' << c << ',' << v[c].real() << ','
           << v[c].imag() << '\n';
  }
}

CarlesonFamily load_family_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot read " + path);
  std::string line;
  int n = 0, J = -1;
  if (!std::getline(is, line) || std::sscanf(line.c_str(), "# n=%d J=%d", &n, &J) != 2)
    throw InvalidInput("missing family header in " + path);
  if (!std::getline(is, line) || line != "level,index0,index1,cell,real,imag")
    throw InvalidInput("missing column header in " + path);
  CarlesonFamily b(n, J);
  std::map<CarlesonFamily::Key, CVec> acc;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    DyadicCube q;
    long long cell = 0;
    double re = 0.0, im = 0.0;
    if (!(ls >> q.level >> q.index[0] >> q.index[1] >> cell >> re >> im))
      throw InvalidInput("malformed row in " + path + ": " + line);
    if (q.level < -J || q.level > 0 || cell < 0 || cell >= b.cells()) throw InvalidInput("row out of range: " + line);
    auto& v = acc[{q.level, q.linear(n)}];
    if (v.size() == 0) v = CVec::Zero(b.cells());
    v[cell] = cplx(re, im);
  }
  for (auto& [key, v] : acc) b.set(b.cube(key), std::move(v));
  return b;
}

std::string to_string(CarForm f) { return f == CarForm::randomized ? "randomized" : "square_function"; }

double car_norm(const CarlesonFamily& b, double p, CarForm form, const RandomSource& rng) {
  check_p(p);
  const int J = b.J(), n = b.n();
  const Grid g = scalar_grid(n, J);
  const std::int64_t cells = b.cells();
  // sums[level + J][cube]: integral over S of the pointwise quantity, in cells
  std::vector<RVec> sums(static_cast<std::size_t>(J + 1));
  for (int k = -J; k <= 0; ++k) sums[static_cast<std::size_t>(k + J)] = RVec::Zero(g.cubes(k));
  const SpaceDescriptor scalar = SpaceDescriptor::hilbert(1);
  for (std::int64_t c = 0; c < cells; ++c) {
    std::vector<CVec> xs;
    double sq = 0.0;
    std::size_t next = 0;
    const auto active = b.active_at(c);
    for (int k = -J; k <= 0; ++k) {
      while (next < active.size() && active[next].first <= k) {
        const cplx v = b.terms().at(active[next])[c];
        sq += std::norm(v);
        if (v != 0.0) xs.push_back(CVec::Constant(1, v));
        ++next;
      }
      double val = 0.0;
      if (form == CarForm::square_function) {
        val = std::pow(sq, p / 2.0);
      } else if (!xs.empty()) {
        const auto est = banach::rademacher_avg(scalar, xs, p, rng.substream(static_cast<std::uint64_t>(c * (J + 1) + (k + J))));
        val = std::pow(est.value, p);
      }
      sums[static_cast<std::size_t>(k + J)][g.cube_of(c, k)] += val;
    }
  }
  double best = 0.0;
  for (int k = -J; k <= 0; ++k) {
    const double per = static_cast<double>(cells / g.cubes(k));
    best = std::max(best, sums[static_cast<std::size_t>(k + J)].maxCoeff() / per);
  }
  return std::pow(best, 1.0 / p);
}

NormEstimate carleson_embed_lhs(const CarlesonFamily& b, const GridFunction& u, double p, const RandomSource& rng,
                                std::int64_t budget, int k_exact) {
  check_p(p);
  const Grid& g = u.grid();
  if (g.n() != b.n() || g.J() != b.J() || g.ncomp() != 1) throw InvalidInput("u does not match the family grid");
  const int J = g.J();
  const int st = g.stride();
  std::vector<CVec> avg(static_cast<std::size_t>(J + 1));
  for (int k = -J; k <= 0; ++k) avg[static_cast<std::size_t>(k + J)] = dyadic::cube_averages(u, k);
  const auto nrm = banach::norm_fn(g.space());
  const std::int64_t cells = g.cells();
  RVec mom = RVec::Zero(cells), var = RVec::Zero(cells);
  std::vector<char> exact(static_cast<std::size_t>(cells), 1);
  parallel_for(cells, [&](std::int64_t c) {
    std::vector<CVec> xs;
    for (const auto& key : b.active_at(c)) {
      const cplx v = b.terms().at(key)[c];
      if (v == 0.0) continue;
      xs.emplace_back(v * avg[static_cast<std::size_t>(key.first + J)].segment(key.second * st, st));
    }
    if (xs.empty()) return;
    const auto est = banach::rademacher_moment(nrm, xs, rng.substream(static_cast<std::uint64_t>(c)),
                                               {p, budget, k_exact});
    mom[c] = std::pow(est.value, p);
    if (est.method != banach::Method::exact_enum) {
      exact[static_cast<std::size_t>(c)] = 0;
      const double d = p * std::pow(est.value, p - 1.0) * est.std_error;
      var[c] = d * d;
    }
  });
  NormEstimate out;
  const double mean = mom.mean();
  out.value = std::pow(mean, 1.0 / p);
  const bool all_exact = std::all_of(exact.begin(), exact.end(), [](char e) { return e != 0; });
  out.method = all_exact ? banach::Method::exact_enum : banach::Method::monte_carlo;
  out.semantic = all_exact ? banach::Semantic::exact : banach::Semantic::estimate;
  if (!all_exact && mean > 0.0) {
    const double se_mean = std::sqrt(var.sum()) / static_cast<double>(cells);
    out.std_error = out.value / (p * mean) * se_mean;
    out.samples = budget;
  }
  return out;
}

std::string to_string(Ensemble e) { return e == Ensemble::random ? "random" : "chain"; }

Ensemble parse_ensemble(const std::string& s) {
  if (s == "random") return Ensemble::random;
  if (s == "chain") return Ensemble::chain;
  throw InvalidInput("unknown ensemble: " + s);
}

CarlesonFamily random_family(int n, int J, double p, const RandomSource& rng) {
  CarlesonFamily b(n, J);
  const Grid g = scalar_grid(n, J);
  std::uint64_t id = 0;
  for (int k = 0; k >= -J; --k) {
    for (std::int64_t qi = 0; qi < g.cubes(k); ++qi, ++id) {
      CounterRng e = rng.engine(id);
      if (e.uniform() >= 0.5) continue;
      const DyadicCube q = DyadicCube::from_linear(n, k, qi);
      CVec v = CVec::Zero(g.cells());
      for (std::int64_t c = 0; c < g.cells(); ++c)
        if (g.cube_of(c, k) == qi) v[c] = disc_sample(e);
      b.set(q, std::move(v));
    }
  }
  if (b.size() == 0) b.set_constant(DyadicCube{}, 1.0);
  return b.scaled(1.0 / car_norm(b, p, CarForm::square_function));
}

CarlesonFamily chain_family(int n, int J, double p) {
  CarlesonFamily b(n, J);
  for (int k = -J; k <= 0; ++k) b.set_constant(DyadicCube{k, {0, 0}}, 1.0);
  return b.scaled(1.0 / car_norm(b, p, CarForm::square_function));
}

CarlesonFamily full_tree(int n, int J, int depth) {
  if (depth < 1 || depth > J + 1) throw InvalidInput("tree depth out of range");
  CarlesonFamily b(n, J);
  const Grid g = scalar_grid(n, J);
  for (int k = 0; k > -depth; --k)
    for (std::int64_t qi = 0; qi < g.cubes(k); ++qi) b.set_constant(DyadicCube::from_linear(n, k, qi), 1.0);
  return b;
}

EmbeddingReport embedding_constant_experiment(const SpaceDescriptor& space, double p, double eps, int n, int J,
                                              int count, Ensemble ensemble, const RandomSource& rng) {
  check_p(p);
  if (!(eps >= 0.0)) throw InvalidInput("eps must be nonnegative");
  EmbeddingReport r;
  r.space = space.to_string();
  r.p = p;
  r.eps = eps;
  r.n = n;
  r.J = J;
  r.ensemble = ensemble;
  const Grid g(n, J, 1, space);
  for (int i = 0; i < count; ++i) {
    const RandomSource src = rng.substream(static_cast<std::uint64_t>(i));
    const CarlesonFamily b =
        ensemble == Ensemble::random ? random_family(n, J, p + eps, src.substream(0)) : chain_family(n, J, p + eps);
    const GridFunction u = radmax::random_function(g, src.substream(1));
    const NormEstimate lhs = carleson_embed_lhs(b, u, p, src.substream(2));
    const double den = car_norm(b, p + eps, CarForm::square_function) * dyadic::lp_norm(u, p);
    r.ratios.push_back(den > 0.0 ? lhs.value / den : 0.0);
    r.methods.push_back(lhs.method);
  }
  if (!r.ratios.empty()) {
    r.max_ratio = *std::max_element(r.ratios.begin(), r.ratios.end());
    double s = 0.0;
    for (double x : r.ratios) s += x;
    r.mean_ratio = s / static_cast<double>(r.ratios.size());
  }
  return r;
}

StoppingDecomposition stopping_decomposition(const GridFunction& u, double A, const RandomSource& rng,
                                             const StoppingOptions& opts) {
  if (!(A > 0.0)) throw InvalidInput("threshold must be positive");
  const Grid& g = u.grid();
  if (g.ncomp() != 1) throw InvalidInput("stopping decomposition needs a single component");
  const int J = g.J(), n = g.n();
  const int st = g.stride();
  std::vector<CVec> avg(static_cast<std::size_t>(J + 1));
  for (int k = -J; k <= 0; ++k) avg[static_cast<std::size_t>(k + J)] = dyadic::cube_averages(u, k);

  StoppingDecomposition d;
  d.threshold = A;
  d.cls.resize(static_cast<std::size_t>(J + 1));
  d.value.resize(static_cast<std::size_t>(J + 1));
  for (int k = 0; k >= -J; --k) {
    const auto lk = static_cast<std::size_t>(k + J);
    const std::int64_t count = g.cubes(k);
    d.value[lk].assign(static_cast<std::size_t>(count), 0.0);
    d.cls[lk].assign(static_cast<std::size_t>(count), 0);
    parallel_for(count, [&](std::int64_t qi) {
      const DyadicCube q = DyadicCube::from_linear(n, k, qi);
      std::vector<CVec> chain;
      DyadicCube r = q;
      while (true) {
        chain.emplace_back(avg[static_cast<std::size_t>(r.level + J)].segment(r.linear(n) * st, st));
        if (r.level == 0) break;
        r = r.parent();
      }
      const std::uint64_t id = (static_cast<std::uint64_t>(-k) << 40) + static_cast<std::uint64_t>(qi);
      double v = radmax::rademacher_maximal_point(g.space(), chain, rng.substream(id), opts.radmax);
      if (k < 0) v = std::max(v, d.value[lk + 1][static_cast<std::size_t>(q.parent().linear(n))]);
      d.value[lk][static_cast<std::size_t>(qi)] = v;
      int cls = 0;
      while (v > A * std::ldexp(1.0, cls)) ++cls;
      d.cls[lk][static_cast<std::size_t>(qi)] = cls;
    });
    for (int c : d.cls[lk]) d.max_class = std::max(d.max_class, c);
  }

  d.F.assign(static_cast<std::size_t>(d.max_class), {});
  d.F_measure.assign(static_cast<std::size_t>(d.max_class), 0.0);
  for (int kk = 0; kk < d.max_class; ++kk) {
    for (int k = 0; k >= -J; --k) {
      const auto lk = static_cast<std::size_t>(k + J);
      for (std::int64_t qi = 0; qi < g.cubes(k); ++qi) {
        if (d.cls[lk][static_cast<std::size_t>(qi)] <= kk) continue;
        const DyadicCube q = DyadicCube::from_linear(n, k, qi);
        if (k < 0 && d.cls[lk + 1][static_cast<std::size_t>(q.parent().linear(n))] > kk) continue;
        d.F[static_cast<std::size_t>(kk)].push_back(q);
        d.F_measure[static_cast<std::size_t>(kk)] += std::ldexp(1.0, k * n);
      }
    }
  }

  // containment of the F_{k-1} cubes in {M_R u > A 2^{k-1} (1 - tol)}
  if (d.max_class > 0) {
    const RVec mr = radmax::rademacher_maximal(u, rng.substream(std::uint64_t{1} << 62), opts.radmax);
    for (int kk = 0; kk < d.max_class; ++kk) {
      const double level = A * std::ldexp(1.0, kk) * (1.0 - opts.tol);
      for (const DyadicCube& q : d.F[static_cast<std::size_t>(kk)])
        for (std::int64_t c = 0; c < g.cells(); ++c)
          if (q.contains_cell(g, c) && !(mr[c] > level)) ++d.containment_violations;
    }
  }
  d.containment_ok = d.containment_violations == 0;
  return d;
}

GridFunction paraproduct(const GridFunction& f, const GridFunction& u) {
  const Grid& gf = f.grid();
  const Grid& gu = u.grid();
  if (gf.n() != gu.n() || gf.J() != gu.J()) throw InvalidInput("paraproduct needs matching grids");
  const bool f_scalar = gf.stride() == 1;
  if (!f_scalar && gu.stride() != 1) throw InvalidInput("one paraproduct argument must be scalar valued");
  const Grid out_grid = f_scalar ? gu : gf;
  const int n = gf.n(), J = gf.J();
  const int st = out_grid.stride();
  const int etas = (1 << n) - 1;
  const auto haar = dyadic::haar_decompose(f);
  GridFunction out(out_grid);
  for (int k = 0; k > -J; --k) {
    const CVec avg = dyadic::cube_averages(u, k);
    const CVec& coef = haar.levels[static_cast<std::size_t>(-k)];
    for (std::int64_t c = 0; c < out_grid.cells(); ++c) {
      const std::int64_t qi = gf.cube_of(c, k);
      const DyadicCube q = DyadicCube::from_linear(n, k, qi);
      for (int eta = 1; eta <= etas; ++eta) {
        const double h = dyadic::haar_value(gf, q, eta, c);
        auto dst = out.values().segment(c * st, st);
        if (f_scalar) {
          dst += (h * coef[qi * etas + eta - 1]) * avg.segment(qi * st, st);
        } else {
          dst += (h * avg[qi]) * coef.segment((qi * etas + eta - 1) * st, st);
        }
      }
    }
  }
  return out;
}

ParaproductReport paraproduct_bound_experiment(const SpaceDescriptor& space, double p, int n, int J, int count,
                                               bool swapped, const RandomSource& rng) {
  if (!(p > 1.0) || std::isinf(p)) throw InvalidInput("p must lie in (1, infinity)");
  ParaproductReport r;
  r.space = space.to_string();
  r.p = p;
  r.n = n;
  r.J = J;
  r.swapped = swapped;
  const Grid gs = Grid::scalar(n, J);
  const Grid gx(n, J, 1, space);
  for (int i = 0; i < count; ++i) {
    const RandomSource src = rng.substream(static_cast<std::uint64_t>(i));
    GridFunction disc(gs);
    for (std::int64_t c = 0; c < gs.cells(); ++c) {
      CounterRng e = src.substream(0).engine(static_cast<std::uint64_t>(c));
      disc.values()[c] = disc_sample(e);
    }
    const GridFunction gauss = radmax::random_function(gx, src.substream(1));
    const GridFunction& f = swapped ? gauss : disc;
    const GridFunction& u = swapped ? disc : gauss;
    const double bmo = dyadic::bmo_norm(f);
    if (!(bmo > 0.0)) {
      ++r.skipped;
      continue;
    }
    const GridFunction P = paraproduct(f, u);
    r.ratios.push_back(dyadic::lp_norm(P, p) / (bmo * dyadic::lp_norm(u, p)));
  }
  if (!r.ratios.empty()) {
    r.max_ratio = *std::max_element(r.ratios.begin(), r.ratios.end());
    double s = 0.0;
    for (double x : r.ratios) s += x;
    r.mean_ratio = s / static_cast<double>(r.ratios.size());
  }
  return r;
}

}  // namespace radmaxlab::carleson
