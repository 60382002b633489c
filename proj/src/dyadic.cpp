#include "radmaxlab/dyadic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "radmaxlab/parallel.hpp"

namespace radmaxlab::dyadic {

namespace {

void check_level(const Grid& g, int k) {
  if (k < -g.J() || k > 0) throw InvalidInput("scale out of range");
}

double eta_sign(int eta, int child) {
  // odd number of "upper half" axes inside eta flips the sign
  return (std::popcount(static_cast<unsigned>(eta & child)) & 1) ? -1.0 : 1.0;
}

}  // namespace

Grid::Grid(int n, int J, int ncomp, banach::SpaceDescriptor space)
    : n_(n), J_(J), ncomp_(ncomp), space_(space) {
  if (n != 1 && n != 2) throw InvalidInput("only n = 1 and n = 2 are supported");
  if (J < 0 || n * J > 24) throw InvalidInput("grid depth out of range");
  if (ncomp < 1) throw InvalidInput("component count must be >= 1");
}

Grid Grid::scalar(int n, int J) { return Grid(n, J, 1, banach::SpaceDescriptor::hilbert(1)); }

std::array<int, 2> Grid::cell_index(std::int64_t c) const {
  if (n_ == 1) return {static_cast<int>(c), 0};
  return {static_cast<int>(c % side()), static_cast<int>(c / side())};
}

std::int64_t Grid::cubes(int k) const {
  check_level(*this, k);
  return std::int64_t{1} << (-k * n_);
}

std::int64_t Grid::cube_of(std::int64_t c, int k) const {
  const int shift = k + J_;
  if (n_ == 1) return c >> shift;
  const auto idx = cell_index(c);
  const std::int64_t s = std::int64_t{1} << (-k);
  return (idx[0] >> shift) + s * (idx[1] >> shift);
}

std::int64_t DyadicCube::linear(int n) const {
  if (n == 1) return index[0];
  return index[0] + (std::int64_t{1} << (-level)) * index[1];
}

DyadicCube DyadicCube::from_linear(int n, int level, std::int64_t idx) {
  DyadicCube q;
  q.level = level;
  if (n == 1) {
    q.index = {static_cast<int>(idx), 0};
  } else {
    const std::int64_t s = std::int64_t{1} << (-level);
    q.index = {static_cast<int>(idx % s), static_cast<int>(idx / s)};
  }
  return q;
}

DyadicCube DyadicCube::parent() const {
  if (level >= 0) throw InvalidInput("the unit cube has no parent");
  return {level + 1, {index[0] >> 1, index[1] >> 1}};
}

DyadicCube DyadicCube::child(int n, int which) const {
  DyadicCube q{level - 1, {2 * index[0] + (which & 1), 2 * index[1]}};
  if (n == 2) q.index[1] += (which >> 1) & 1;
  return q;
}

bool DyadicCube::contains_cell(const Grid& g, std::int64_t c) const {
  return g.cube_of(c, level) == linear(g.n());
}

bool DyadicCube::contains(const DyadicCube& o) const {
  if (o.level > level) return false;
  const int d = level - o.level;
  return (o.index[0] >> d) == index[0] && (o.index[1] >> d) == index[1];
}

GridFunction::GridFunction(Grid grid) : grid_(grid), values_(CVec::Zero(grid.cells() * grid.stride())) {}

GridFunction::GridFunction(Grid grid, CVec values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cells() * grid_.stride())
    throw InvalidInput("grid function shape does not match grid");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  if (!(o.grid_ == grid_)) throw InvalidInput("grid mismatch");
  values_ += o.values_;
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  if (!(o.grid_ == grid_)) throw InvalidInput("grid mismatch");
  values_ -= o.values_;
  return *this;
}

GridFunction& GridFunction::operator*=(cplx c) {
  values_ *= c;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(cplx c, GridFunction a) { return a *= c; }

CVec cube_averages(const GridFunction& u, int k) {
  const Grid& g = u.grid();
  check_level(g, k);
  const int st = g.stride();
  CVec avg = CVec::Zero(g.cubes(k) * st);
  for (std::int64_t c = 0; c < g.cells(); ++c) {
    const std::int64_t q = g.cube_of(c, k);
    avg.segment(q * st, st) += u.values().segment(c * st, st);
  }
  avg /= static_cast<double>(g.cells() / g.cubes(k));
  return avg;
}

GridFunction conditional_expectation(const GridFunction& u, int k) {
  const Grid& g = u.grid();
  const CVec avg = cube_averages(u, k);
  const int st = g.stride();
  GridFunction out(g);
  for (std::int64_t c = 0; c < g.cells(); ++c)
    out.values().segment(c * st, st) = avg.segment(g.cube_of(c, k) * st, st);
  return out;
}

cplx HaarCoefficients::coefficient(const DyadicCube& q, int eta, int comp, int coord) const {
  const int n = grid.n();
  if (q.level <= -grid.J() || q.level > 0) throw InvalidInput("cube level has no Haar functions");
  if (eta < 1 || eta >= (1 << n)) throw InvalidInput("invalid eta");
  const int etas = (1 << n) - 1;
  const CVec& lv = levels[static_cast<std::size_t>(-q.level)];
  return lv[(q.linear(n) * etas + (eta - 1)) * grid.stride() + comp * grid.coords() + coord];
}

HaarCoefficients haar_decompose(const GridFunction& u) {
  const Grid& g = u.grid();
  const int n = g.n(), J = g.J(), st = g.stride();
  const int kids = 1 << n, etas = kids - 1;
  HaarCoefficients h{g, CVec(), {}};
  h.levels.resize(static_cast<std::size_t>(J));
  CVec fine = u.values();  // averages at the current child level
  for (int k = -J + 1; k <= 0; ++k) {
    const std::int64_t nq = g.cubes(k);
    CVec coarse = CVec::Zero(nq * st);
    CVec coef = CVec::Zero(nq * etas * st);
    for (std::int64_t qi = 0; qi < nq; ++qi) {
      const DyadicCube q = DyadicCube::from_linear(n, k, qi);
      for (int ch = 0; ch < kids; ++ch) {
        const auto a = fine.segment(q.child(n, ch).linear(n) * st, st);
        coarse.segment(qi * st, st) += a / static_cast<double>(kids);
        for (int eta = 1; eta <= etas; ++eta)
          coef.segment((qi * etas + eta - 1) * st, st) += eta_sign(eta, ch) / kids * a;
      }
    }
    h.levels[static_cast<std::size_t>(-k)] = std::move(coef);
    fine = std::move(coarse);
  }
  h.mean = fine;
  return h;
}

GridFunction haar_reconstruct(const HaarCoefficients& h) {
  const Grid& g = h.grid;
  const int n = g.n(), J = g.J(), st = g.stride();
  const int kids = 1 << n, etas = kids - 1;
  if (h.mean.size() != st || static_cast<int>(h.levels.size()) != J)
    throw InvalidInput("Haar coefficient shape does not match grid");
  CVec coarse = h.mean;
  for (int k = 0; k >= -J + 1; --k) {
    const std::int64_t nq = g.cubes(k);
    const CVec& coef = h.levels[static_cast<std::size_t>(-k)];
    CVec fine = CVec::Zero(nq * kids * st);
    for (std::int64_t qi = 0; qi < nq; ++qi) {
      const DyadicCube q = DyadicCube::from_linear(n, k, qi);
      for (int ch = 0; ch < kids; ++ch) {
        auto a = fine.segment(q.child(n, ch).linear(n) * st, st);
        a = coarse.segment(qi * st, st);
        for (int eta = 1; eta <= etas; ++eta)
          a += eta_sign(eta, ch) * coef.segment((qi * etas + eta - 1) * st, st);
      }
    }
    coarse = std::move(fine);
  }
  return GridFunction(g, std::move(coarse));
}

double haar_value(const Grid& g, const DyadicCube& q, int eta, std::int64_t c) {
  if (!q.contains_cell(g, c)) return 0.0;
  const auto idx = g.cell_index(c);
  const int w = q.cells_per_side(g.J());
  double s = 1.0;
  for (int d = 0; d < g.n(); ++d) {
    if (!((eta >> d) & 1)) continue;
    if (idx[d] - q.index[d] * w >= w / 2) s = -s;
  }
  return s;
}

GridFunction haar_function(const Grid& g, const DyadicCube& q, int eta) {
  GridFunction h(g);
  for (std::int64_t c = 0; c < g.cells(); ++c) {
    const double v = haar_value(g, q, eta, c);
    for (int i = 0; i < g.stride(); ++i) h.at(c)[i] = v;
  }
  return h;
}

banach::ComponentNorm value_norm(const Grid& g) { return banach::ComponentNorm(g.space(), g.ncomp()); }

RVec dyadic_maximal(const GridFunction& u) {
  const Grid& g = u.grid();
  const auto nrm = value_norm(g);
  const int st = g.stride();
  RVec m = RVec::Zero(g.cells());
  for (int k = -g.J(); k <= 0; ++k) {
    const CVec avg = cube_averages(u, k);
    const std::int64_t nq = g.cubes(k);
    RVec qn(nq);
    parallel_for(nq, [&](std::int64_t q) {
      qn[q] = nrm(std::span<const cplx>(avg.data() + q * st, static_cast<std::size_t>(st)));
    });
    for (std::int64_t c = 0; c < g.cells(); ++c) m[c] = std::max(m[c], qn[g.cube_of(c, k)]);
  }
  return m;
}

GridFunction lattice_maximal(const GridFunction& u) {
  const Grid& g = u.grid();
  if (!g.space().is_lattice()) throw UnsupportedSpace("lattice maximal function needs a Banach lattice");
  const int st = g.stride();
  GridFunction out(g);
  for (int k = -g.J(); k <= 0; ++k) {
    const CVec avg = cube_averages(u, k);
    for (std::int64_t c = 0; c < g.cells(); ++c) {
      const std::int64_t q = g.cube_of(c, k);
      for (int i = 0; i < st; ++i) {
        const double a = std::abs(avg[q * st + i]);
        if (a > out.at(c)[i].real()) out.at(c)[i] = a;
      }
    }
  }
  return out;
}

double lp_norm(const RVec& v, double p) {
  if (!(p >= 1.0)) throw InvalidInput("p must be >= 1");
  if (v.size() == 0) return 0.0;
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]) / scale, p);
  return scale * std::pow(s / static_cast<double>(v.size()), 1.0 / p);
}

double lp_norm(const GridFunction& u, double p) {
  const Grid& g = u.grid();
  const auto nrm = value_norm(g);
  RVec v(g.cells());
  parallel_for(g.cells(), [&](std::int64_t c) { v[c] = nrm(u.at(c)); });
  return lp_norm(v, p);
}

double bmo_norm(const GridFunction& f) {
  const Grid& g = f.grid();
  const auto nrm = value_norm(g);
  const int st = g.stride();
  double best = 0.0;
  CVec diff(st);
  for (int k = -g.J(); k <= 0; ++k) {
    const CVec avg = cube_averages(f, k);
    RVec osc = RVec::Zero(g.cubes(k));
    for (std::int64_t c = 0; c < g.cells(); ++c) {
      const std::int64_t q = g.cube_of(c, k);
      diff = f.values().segment(c * st, st) - avg.segment(q * st, st);
      osc[q] += nrm(std::span<const cplx>(diff.data(), static_cast<std::size_t>(st)));
    }
    best = std::max(best, osc.maxCoeff() / static_cast<double>(g.cells() / g.cubes(k)));
  }
  return best;
}

}  // namespace radmaxlab::dyadic
