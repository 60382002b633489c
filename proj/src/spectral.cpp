#include "radmaxlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace radmaxlab::spectral {

namespace {

std::mutex plan_mutex;

struct PlanCache {
  std::map<std::tuple<int, int, int, int>, fftw_plan> plans;
  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

fftw_plan get_plan(const Shape& s, int howmany, bool inverse) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  static PlanCache cache;
  const auto key = std::make_tuple(s.n, s.J, howmany, inverse ? 1 : 0);
  auto it = cache.plans.find(key);
  if (it != cache.plans.end()) return it->second;
  const int dims[2] = {s.side(), s.side()};
  const int cells = static_cast<int>(s.cells());
  auto* buf = fftw_alloc_complex(static_cast<std::size_t>(cells) * howmany);
  fftw_plan p = fftw_plan_many_dft(s.n, dims, howmany, buf, nullptr, 1, cells, buf, nullptr, 1, cells,
                                   inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (!p) throw Error("FFTW planning failed");
  cache.plans.emplace(key, p);
  return p;
}

}  // namespace

Shape shape_of(const dyadic::Grid& g) { return Shape{g.n(), g.J()}; }

std::array<int, 2> frequency(const Shape& s, std::int64_t f) {
  const int side = s.side();
  auto wrap = [side](int i) { return i < side / 2 ? i : i - side; };
  if (s.n == 1) return {wrap(static_cast<int>(f)), 0};
  return {wrap(static_cast<int>(f % side)), wrap(static_cast<int>(f / side))};
}

double zeta(const Shape& s, std::int64_t f) {
  const auto k = frequency(s, f);
  return 2.0 * kPi * std::sqrt(static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1]);
}

CMat to_field(const dyadic::GridFunction& u) {
  const auto& g = u.grid();
  const std::int64_t cells = g.cells();
  CMat f(cells * g.ncomp(), g.coords());
  for (std::int64_t c = 0; c < cells; ++c)
    for (int k = 0; k < g.ncomp(); ++k)
      for (int i = 0; i < g.coords(); ++i) f(k * cells + c, i) = u(c, k, i);
  return f;
}

dyadic::GridFunction from_field(const dyadic::Grid& g, const CMat& f) {
  const std::int64_t cells = g.cells();
  if (f.rows() != cells * g.ncomp() || f.cols() != g.coords())
    throw InvalidInput("field shape does not match grid");
  dyadic::GridFunction u(g);
  for (std::int64_t c = 0; c < cells; ++c)
    for (int k = 0; k < g.ncomp(); ++k)
      for (int i = 0; i < g.coords(); ++i) u(c, k, i) = f(k * cells + c, i);
  return u;
}

void fft(CMat& field, const Shape& s, bool inverse) {
  const std::int64_t cells = s.cells();
  if (field.size() == 0) return;
  if (field.size() % cells != 0) throw InvalidInput("field size is not a multiple of the cell count");
  const int howmany = static_cast<int>(field.size() / cells);
  fftw_plan p = get_plan(s, howmany, inverse);
  auto* data = reinterpret_cast<fftw_complex*>(field.data());
  fftw_execute_dft(p, data, data);
  if (inverse) field /= static_cast<double>(cells);
}

Symbol make_symbol(const Shape& s, const std::function<CMat(const std::array<double, 2>&)>& f) {
  Symbol sym(static_cast<std::size_t>(s.cells()));
  for (std::int64_t b = 0; b < s.cells(); ++b) {
    const auto k = frequency(s, b);
    sym[static_cast<std::size_t>(b)] = f({2.0 * kPi * k[0], 2.0 * kPi * k[1]});
  }
  return sym;
}

Symbol gradient_symbol(const Shape& s) {
  return make_symbol(s, [n = s.n](const std::array<double, 2>& x) {
    CMat m(n, 1);
    for (int d = 0; d < n; ++d) m(d, 0) = cplx(0.0, x[d]);
    return m;
  });
}

Symbol divergence_symbol(const Shape& s) {
  return make_symbol(s, [n = s.n](const std::array<double, 2>& x) {
    CMat m(1, n);
    for (int d = 0; d < n; ++d) m(0, d) = cplx(0.0, x[d]);
    return m;
  });
}

Symbol laplacian_symbol(const Shape& s) {
  return make_symbol(s, [](const std::array<double, 2>& x) {
    CMat m(1, 1);
    m(0, 0) = -(x[0] * x[0] + x[1] * x[1]);
    return m;
  });
}

}  // namespace radmaxlab::spectral
