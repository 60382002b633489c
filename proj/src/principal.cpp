#include "radmaxlab/principal.hpp"

#include "radmaxlab/kato.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace radmaxlab::ops {

namespace {

std::array<int, 2> cell_coords(const Shape& s, std::int64_t c) {
  const int side = s.side();
  return {static_cast<int>(c % side), s.n == 2 ? static_cast<int>(c / side) : 0};
}

// Cube of level k containing cell c, as per-axis indices.
std::array<int, 2> cube_coords(const Shape& s, std::int64_t c, int k) {
  const auto i = cell_coords(s, c);
  const int shift = k + s.J;
  return {i[0] >> shift, i[1] >> shift};
}

std::int64_t cube_linear(const Shape& s, const std::array<int, 2>& q, int k) {
  const std::int64_t per_side = std::int64_t{1} << (-k);
  return s.n == 2 ? q[0] + per_side * q[1] : q[0];
}

void check_level(const Shape& s, int k) {
  if (k < -s.J || k > 0) throw InvalidInput("cube level out of range");
}

class AveragingNode : public OperatorNode {
 public:
  AveragingNode(const Shape& s, int comps, int k) : OperatorNode(s, comps, comps) {
    const std::int64_t cells = s.cells();
    cube_.resize(static_cast<std::size_t>(cells));
    for (std::int64_t c = 0; c < cells; ++c) cube_[static_cast<std::size_t>(c)] = cube_linear(s, cube_coords(s, c, k), k);
    cubes_ = std::int64_t{1} << (-k * s.n);
  }

  CMat apply(const CMat& f) const override {
    const std::int64_t cells = shape().cells();
    if (f.rows() != in_comps() * cells) throw InvalidInput("field size does not match operator");
    const double inv = static_cast<double>(cubes_) / static_cast<double>(cells);
    CMat out(f.rows(), f.cols());
    std::vector<cplx> sums(static_cast<std::size_t>(cubes_));
    for (Eigen::Index col = 0; col < f.cols(); ++col) {
      for (int comp = 0; comp < in_comps(); ++comp) {
        std::fill(sums.begin(), sums.end(), cplx(0.0));
        const std::int64_t off = comp * cells;
        for (std::int64_t c = 0; c < cells; ++c) sums[static_cast<std::size_t>(cube_[static_cast<std::size_t>(c)])] += f(off + c, col);
        for (std::int64_t c = 0; c < cells; ++c)
          out(off + c, col) = sums[static_cast<std::size_t>(cube_[static_cast<std::size_t>(c)])] * inv;
      }
    }
    return out;
  }

 private:
  std::int64_t cubes_ = 1;
  std::vector<std::int64_t> cube_;
};

int periodic_gap(int a, int b, int period) {
  const int d = std::abs(a - b) % period;
  return std::min(d, period - d);
}

}  // namespace

OperatorHandle averaging(const Shape& s, int comps, int k) {
  check_level(s, k);
  return OperatorHandle(std::make_shared<AveragingNode>(s, comps, k));
}

banach::NormFn field_norm_fn(const Shape& s, int comps, const banach::SpaceDescriptor& X, double p) {
  if (!(p >= 1.0)) throw InvalidInput("p must be at least 1");
  const std::int64_t cells = s.cells();
  const int coords = X.dim();
  const std::int64_t rows = comps * cells;
  auto cn = std::make_shared<banach::ComponentNorm>(X, comps);
  return [=](std::span<const cplx> flat) {
    if (static_cast<std::int64_t>(flat.size()) != rows * coords) throw InvalidInput("field size does not match norm");
    std::vector<cplx> buf(static_cast<std::size_t>(comps * coords));
    RVec pt(cells);
    for (std::int64_t c = 0; c < cells; ++c) {
      for (int comp = 0; comp < comps; ++comp)
        for (int x = 0; x < coords; ++x)
          buf[static_cast<std::size_t>(comp * coords + x)] = flat[static_cast<std::size_t>(x * rows + comp * cells + c)];
      pt[c] = (*cn)(buf);
    }
    const double m = pt.maxCoeff();
    if (m == 0.0) return 0.0;
    if (std::isinf(p)) return m;
    return m * std::pow((pt / m).array().pow(p).sum() / static_cast<double>(cells), 1.0 / p);
  };
}

double field_norm(const CMat& field, const Shape& s, int comps, const banach::SpaceDescriptor& X, double p) {
  if (field.cols() != X.dim()) throw InvalidInput("field columns must match the dimension of X");
  return field_norm_fn(s, comps, X, p)(std::span<const cplx>(field.data(), static_cast<std::size_t>(field.size())));
}

std::vector<CMat> principal_part(const OperatorHandle& T, int k, int radius) {
  const Shape& s = T.shape();
  check_level(s, k);
  if (T.in_comps() != T.out_comps()) throw InvalidInput("principal part needs a square operator");
  const int N = T.in_comps();
  const std::int64_t cells = s.cells();
  const auto ucells = static_cast<std::size_t>(cells);
  std::vector<CMat> gamma(ucells, CMat::Zero(N, N));

  if (radius < 0) {
    CMat ones = CMat::Zero(N * cells, N);
    for (int w = 0; w < N; ++w) ones.block(w * cells, w, cells, 1).setOnes();
    const CMat img = T.apply(ones);
    for (std::int64_t c = 0; c < cells; ++c)
      for (int w = 0; w < N; ++w)
        for (int r = 0; r < N; ++r) gamma[static_cast<std::size_t>(c)](r, w) = img(r * cells + c, w);
    return gamma;
  }

  const std::int64_t cubes = std::int64_t{1} << (-k * s.n);
  const int per_side = 1 << (-k);
  std::vector<std::array<int, 2>> qc(ucells);
  std::vector<std::int64_t> ql(ucells);
  for (std::int64_t c = 0; c < cells; ++c) {
    qc[static_cast<std::size_t>(c)] = cube_coords(s, c, k);
    ql[static_cast<std::size_t>(c)] = cube_linear(s, qc[static_cast<std::size_t>(c)], k);
  }
  const std::int64_t total = N * cubes;
  const std::int64_t rows = N * cells;
  const std::int64_t chunk = std::max<std::int64_t>(1, (std::int64_t{1} << 24) / rows);
  for (std::int64_t start = 0; start < total; start += chunk) {
    const std::int64_t count = std::min(chunk, total - start);
    CMat in = CMat::Zero(rows, count);
    for (std::int64_t j = 0; j < count; ++j) {
      const int w = static_cast<int>((start + j) / cubes);
      const std::int64_t q = (start + j) % cubes;
      for (std::int64_t c = 0; c < cells; ++c)
        if (ql[static_cast<std::size_t>(c)] == q) in(w * cells + c, j) = 1.0;
    }
    const CMat img = T.apply(in);
    for (std::int64_t j = 0; j < count; ++j) {
      const int w = static_cast<int>((start + j) / cubes);
      const std::int64_t q = (start + j) % cubes;
      const std::array<int, 2> qq = {static_cast<int>(q % per_side), s.n == 2 ? static_cast<int>(q / per_side) : 0};
      for (std::int64_t c = 0; c < cells; ++c) {
        const auto& xc = qc[static_cast<std::size_t>(c)];
        int d = periodic_gap(xc[0], qq[0], per_side);
        if (s.n == 2) d = std::max(d, periodic_gap(xc[1], qq[1], per_side));
        if (d > radius) continue;
        for (int r = 0; r < N; ++r) gamma[static_cast<std::size_t>(c)](r, w) += img(r * cells + c, j);
      }
    }
  }
  return gamma;
}

OperatorHandle principal_term(const Shape& s, const std::vector<CMat>& gamma, int k) {
  if (gamma.empty()) throw InvalidInput("empty principal part");
  const int N = static_cast<int>(gamma.front().rows());
  return compose({pointwise(s, gamma), averaging(s, N, k)});
}

std::vector<OffDiagonalRow> off_diagonal_profile(const OperatorHandle& T, int k, const std::vector<double>& rho,
                                                 double p, const RandomSource& rng, int samples) {
  const Shape& s = T.shape();
  check_level(s, k);
  const int N = T.in_comps();
  if (T.out_comps() != N) throw InvalidInput("off-diagonal profile needs a square operator");
  const std::int64_t cells = s.cells();
  const int side = s.side();
  const int m = 1 << (k + s.J);

  std::vector<std::int64_t> F;
  std::vector<double> dist(static_cast<std::size_t>(cells));
  for (std::int64_t c = 0; c < cells; ++c) {
    const auto i = cell_coords(s, c);
    double d2 = 0.0;
    bool inside = true;
    for (int a = 0; a < s.n; ++a) {
      const int gap = i[a] < m ? 0 : std::min(i[a] - m, side - (i[a] + 1));
      if (i[a] >= m) inside = false;
      d2 += static_cast<double>(gap) * gap;
    }
    if (inside) F.push_back(c);
    dist[static_cast<std::size_t>(c)] = std::sqrt(d2);
  }

  // T restricted to inputs on F: columns are (component, cell of F)
  const auto nf = static_cast<std::int64_t>(F.size());
  CMat basis = CMat::Zero(N * cells, N * nf);
  for (int w = 0; w < N; ++w)
    for (std::int64_t j = 0; j < nf; ++j) basis(w * cells + F[static_cast<std::size_t>(j)], w * nf + j) = 1.0;
  const CMat cols = T.apply(basis);

  std::vector<CMat> inputs;
  for (int sIdx = 0; sIdx < samples; ++sIdx) {
    CounterRng e = rng.engine(static_cast<std::uint64_t>(sIdx));
    CMat v(N * nf, 1);
    for (Eigen::Index r = 0; r < v.rows(); ++r) v(r, 0) = cplx(e.normal(), e.normal());
    inputs.push_back(std::move(v));
  }

  std::vector<OffDiagonalRow> out;
  for (double r : rho) {
    std::vector<std::int64_t> E;
    for (std::int64_t c = 0; c < cells; ++c)
      if (dist[static_cast<std::size_t>(c)] >= r * m - 1e-9) E.push_back(c);
    if (E.empty()) continue;
    const auto ne = static_cast<std::int64_t>(E.size());
    CMat block(N * ne, N * nf);
    for (int comp = 0; comp < N; ++comp)
      for (std::int64_t i = 0; i < ne; ++i) block.row(comp * ne + i) = cols.row(comp * cells + E[static_cast<std::size_t>(i)]);
    OffDiagonalRow row;
    row.rho = r;
    row.far_cells = ne;
    Eigen::JacobiSVD<CMat> svd(block);
    row.operator_norm = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    for (const CMat& v : inputs) {
      CMat full_in = CMat::Zero(N * cells, 1), full_out = CMat::Zero(N * cells, 1);
      for (int comp = 0; comp < N; ++comp)
        for (std::int64_t j = 0; j < nf; ++j) full_in(comp * cells + F[static_cast<std::size_t>(j)], 0) = v(comp * nf + j, 0);
      const CMat img = block * v;
      for (int comp = 0; comp < N; ++comp)
        for (std::int64_t i = 0; i < ne; ++i) full_out(comp * cells + E[static_cast<std::size_t>(i)], 0) = img(comp * ne + i, 0);
      const double den = field_lp_norm(full_in, cells, p);
      if (den > 0.0) row.ratio = std::max(row.ratio, field_lp_norm(full_out, cells, p) / den);
    }
    out.push_back(row);
  }
  return out;
}

std::vector<OperatorHandle> quadratic_family(const HodgeDirac& h, int J, SolveOptions opts) {
  std::vector<OperatorHandle> fam;
  for (int k = -J; k <= 0; ++k) fam.push_back(resolvent(h.PiB, std::ldexp(1.0, k), ResolventStyle::Q, opts));
  return fam;
}

banach::NormEstimate quadratic_estimate(const std::vector<OperatorHandle>& family, const CMat& u,
                                        const banach::SpaceDescriptor& X, double p,
                                        const RandomSource& rng, const banach::AveragingOptions& opts) {
  if (family.empty()) throw InvalidInput("empty operator family");
  const Shape& s = family.front().shape();
  const int N = family.front().in_comps();
  std::vector<CVec> xs;
  xs.reserve(family.size());
  for (const auto& T : family) {
    const CMat img = T.apply(u);
    xs.emplace_back(Eigen::Map<const CVec>(img.data(), img.size()));
  }
  return banach::rademacher_moment(field_norm_fn(s, N, X, p), xs, rng, opts);
}

}  // namespace radmaxlab::ops
