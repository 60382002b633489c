#include "radmaxlab/banach_space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "radmaxlab/kernels.hpp"

namespace radmaxlab::banach {

namespace {

constexpr int kMaxSchattenDim = 16;

double lq_norm(std::span<const cplx> x, double q) {
  if (q == 2.0) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return std::sqrt(s);
  }
  if (q == 1.0) {
    double s = 0.0;
    for (const auto& v : x) s += std::abs(v);
    return s;
  }
  double scale = 0.0;
  for (const auto& v : x) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& v : x) s += std::pow(std::abs(v) / scale, q);
  return scale * std::pow(s, 1.0 / q);
}

Eigen::Map<const CMat> as_matrix(std::span<const cplx> x, int m) {
  return Eigen::Map<const CMat>(x.data(), m, m);
}

double parse_double(std::string_view s, std::string_view spec) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidInput("malformed space spec: " + std::string(spec));
  return v;
}

int parse_int(std::string_view s, std::string_view spec) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidInput("malformed space spec: " + std::string(spec));
  return v;
}

void check_shapes(std::span<const CVec> xs, Eigen::Index expected) {
  for (const auto& x : xs)
    if (x.size() != expected) throw InvalidInput("vector shape does not match space");
}

NormEstimate finish_mc(const kernels::McMoment& mc, double p, std::int64_t samples,
                       Semantic semantic) {
  NormEstimate est;
  est.method = Method::monte_carlo;
  est.samples = samples;
  est.semantic = semantic;
  est.value = std::pow(std::max(mc.mean, 0.0), 1.0 / p);
  const double se_moment = std::sqrt(mc.variance / static_cast<double>(samples));
  // delta method for m -> m^{1/p}
  est.std_error = mc.mean > 0.0 ? est.value / (p * mc.mean) * se_moment : 0.0;
  return est;
}

}  // namespace

SpaceDescriptor SpaceDescriptor::lebesgue(double q, int d) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw InvalidInput("l^q requires finite q >= 1");
  if (d < 1) throw InvalidInput("dimension must be positive");
  return SpaceDescriptor(SpaceKind::lebesgue, q, d);
}

SpaceDescriptor SpaceDescriptor::hilbert(int d) {
  if (d < 1) throw InvalidInput("dimension must be positive");
  return SpaceDescriptor(SpaceKind::hilbert, 2.0, d);
}

SpaceDescriptor SpaceDescriptor::schatten(double q, int m) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw InvalidInput("Schatten class requires finite q >= 1");
  if (m < 1) throw InvalidInput("dimension must be positive");
  if (m > kMaxSchattenDim) throw InvalidInput("Schatten matrices larger than 16 x 16 are not supported");
  return SpaceDescriptor(SpaceKind::schatten, q, m);
}

SpaceDescriptor SpaceDescriptor::parse(std::string_view spec) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = spec.find(':', start);
    parts.push_back(spec.substr(start, pos == std::string_view::npos ? spec.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (parts.size() == 3 && parts[0] == "lq")
    return lebesgue(parse_double(parts[1], spec), parse_int(parts[2], spec));
  if (parts.size() == 2 && parts[0] == "hilbert") return hilbert(parse_int(parts[1], spec));
  if (parts.size() == 3 && parts[0] == "schatten")
    return schatten(parse_double(parts[1], spec), parse_int(parts[2], spec));
  throw InvalidInput("malformed space spec: " + std::string(spec));
}

std::string SpaceDescriptor::to_string() const {
  std::ostringstream os;
  switch (kind_) {
    case SpaceKind::lebesgue: os << "lq:" << q_ << ":" << dim_; break;
    case SpaceKind::hilbert: os << "hilbert:" << dim_; break;
    case SpaceKind::schatten: os << "schatten:" << q_ << ":" << dim_; break;
  }
  return os.str();
}

Vector::Vector(SpaceDescriptor s, CVec d) : space(s), data(std::move(d)) {
  if (data.size() != space.coords()) throw InvalidInput("vector shape does not match space");
}

double norm(const SpaceDescriptor& space, std::span<const cplx> x) {
  if (static_cast<int>(x.size()) != space.coords())
    throw InvalidInput("vector shape does not match space");
  switch (space.kind()) {
    case SpaceKind::hilbert: return lq_norm(x, 2.0);
    case SpaceKind::lebesgue: return lq_norm(x, space.q());
    case SpaceKind::schatten: {
      const int m = space.dim();
      if (space.q() == 2.0) return lq_norm(x, 2.0);
      Eigen::JacobiSVD<CMat> svd(as_matrix(x, m));
      const RVec& s = svd.singularValues();
      std::vector<cplx> sv(s.data(), s.data() + s.size());
      return lq_norm(sv, space.q());
    }
  }
  return 0.0;
}

double norm(const Vector& x) {
  return norm(x.space, std::span<const cplx>(x.data.data(), x.data.size()));
}

NormFn norm_fn(const SpaceDescriptor& space) {
  return [space](std::span<const cplx> x) { return norm(space, x); };
}

CVec norming_functional(const SpaceDescriptor& space, std::span<const cplx> x) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  if (n != space.coords()) throw InvalidInput("vector shape does not match space");
  CVec phi = CVec::Zero(n);
  const double nx = norm(space, x);
  if (nx == 0.0) return phi;
  const double q = space.q();
  if (space.kind() != SpaceKind::schatten || q == 2.0) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double a = std::abs(x[j]);
      if (a == 0.0) continue;
      if (q == 1.0) phi[j] = x[j] / a;
      else phi[j] = x[j] * std::pow(a / nx, q - 2.0) / nx;
    }
    return phi;
  }
  const int m = space.dim();
  Eigen::JacobiSVD<CMat> svd(as_matrix(x, m), Eigen::ComputeFullU | Eigen::ComputeFullV);
  RVec s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] <= 0.0) s[i] = 0.0;
    else s[i] = q == 1.0 ? 1.0 : std::pow(s[i] / nx, q - 1.0);
  }
  CMat f = svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
  return Eigen::Map<CVec>(f.data(), n);
}

std::string to_string(Method m) {
  switch (m) {
    case Method::exact_enum: return "exact_enum";
    case Method::monte_carlo: return "monte_carlo";
    case Method::closed_form: return "closed_form";
  }
  return "?";
}

std::string to_string(Semantic s) {
  switch (s) {
    case Semantic::exact: return "exact";
    case Semantic::lower_bound: return "lower_bound";
    case Semantic::estimate: return "estimate";
  }
  return "?";
}

NormEstimate rademacher_moment(const NormFn& norm_of, std::span<const CVec> xs,
                               const RandomSource& rng, const AveragingOptions& opt) {
  if (!(opt.moment >= 1.0)) throw InvalidInput("moment must be >= 1");
  NormEstimate est;
  if (xs.empty()) return est;
  check_shapes(xs, xs[0].size());
  if (static_cast<int>(xs.size()) <= opt.k_exact) {
    const double m = kernels::sign_moment_parallel(norm_of, xs, opt.moment);
    est.value = std::pow(m, 1.0 / opt.moment);
    est.samples = std::int64_t{1} << (xs.size() - 1);
    return est;
  }
  if (opt.budget < 1) throw InvalidInput("Monte Carlo budget must be >= 1");
  const auto mc = kernels::mc_moment_parallel(norm_of, xs, opt.moment, rng, opt.budget,
                                              kernels::Coefficients::rademacher);
  return finish_mc(mc, opt.moment, opt.budget, Semantic::estimate);
}

NormEstimate rademacher_avg(const SpaceDescriptor& space, std::span<const CVec> xs, double p,
                            const RandomSource& rng, std::int64_t budget, int k_exact) {
  check_shapes(xs, space.coords());
  if (xs.empty()) return {};
  if (space.is_hilbert() && p == 2.0) {
    double s = 0.0;
    for (const auto& x : xs) s += x.squaredNorm();
    NormEstimate est;
    est.value = std::sqrt(s);
    est.method = Method::closed_form;
    return est;
  }
  return rademacher_moment(norm_fn(space), xs, rng, {p, budget, k_exact});
}

NormEstimate gaussian_moment(const NormFn& norm_of, std::span<const CVec> xs,
                             const RandomSource& rng, const AveragingOptions& opt) {
  if (!(opt.moment >= 1.0)) throw InvalidInput("moment must be >= 1");
  if (xs.empty()) return {};
  check_shapes(xs, xs[0].size());
  if (opt.budget < 1) throw InvalidInput("Monte Carlo budget must be >= 1");
  const auto mc = kernels::mc_moment_parallel(norm_of, xs, opt.moment, rng, opt.budget,
                                              kernels::Coefficients::gaussian);
  return finish_mc(mc, opt.moment, opt.budget, Semantic::estimate);
}

NormEstimate gaussian_avg(const SpaceDescriptor& space, std::span<const CVec> xs, double p,
                          const RandomSource& rng, std::int64_t budget) {
  check_shapes(xs, space.coords());
  if (xs.empty()) return {};
  if (space.is_hilbert() && p == 2.0) {
    double s = 0.0;
    for (const auto& x : xs) s += x.squaredNorm();
    NormEstimate est;
    est.value = std::sqrt(s);
    est.method = Method::closed_form;
    return est;
  }
  return gaussian_moment(norm_fn(space), xs, rng, {p, budget, 0});
}

double square_function_norm(const SpaceDescriptor& space, std::span<const CVec> xs) {
  if (!space.is_lattice()) throw UnsupportedSpace("square function needs a Banach lattice");
  check_shapes(xs, space.coords());
  CVec sq = CVec::Zero(space.coords());
  for (const auto& x : xs) sq += x.cwiseAbs2().cast<cplx>();
  for (Eigen::Index j = 0; j < sq.size(); ++j) sq[j] = std::sqrt(sq[j].real());
  return norm(space, std::span<const cplx>(sq.data(), sq.size()));
}

NormEstimate gaussian_product_norm(const SpaceDescriptor& space, std::span<const CVec> tuple,
                                   const RandomSource& rng, std::int64_t budget) {
  check_shapes(tuple, space.coords());
  if (tuple.size() == 1) {
    NormEstimate est;
    est.value = norm(space, std::span<const cplx>(tuple[0].data(), tuple[0].size()));
    est.method = Method::closed_form;
    return est;
  }
  return gaussian_avg(space, tuple, 2.0, rng, budget);
}

ContractionReport contraction_check(const SpaceDescriptor& space, std::span<const CVec> xs,
                                    std::span<const cplx> lambdas, const RandomSource& rng,
                                    std::int64_t budget, int k_exact) {
  if (xs.size() != lambdas.size()) throw InvalidInput("xs and lambdas differ in length");
  check_shapes(xs, space.coords());
  std::vector<CVec> scaled(xs.begin(), xs.end());
  double lambda_max = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    scaled[j] *= lambdas[j];
    lambda_max = std::max(lambda_max, std::abs(lambdas[j]));
  }
  const auto f = norm_fn(space);
  const AveragingOptions opt{1.0, budget, k_exact};
  // Same rng for both sides: in the Monte Carlo regime both averages see
  // identical sign draws.
  const NormEstimate lhs = rademacher_moment(f, scaled, rng, opt);
  const NormEstimate base = rademacher_moment(f, xs, rng, opt);
  ContractionReport r;
  r.lhs = lhs.value;
  r.rhs = 2.0 * lambda_max * base.value;
  r.method = lhs.method;
  if (lhs.method == Method::monte_carlo) {
    r.std_error = std::hypot(lhs.std_error, 2.0 * lambda_max * base.std_error);
    r.pass = r.lhs <= r.rhs + 3.0 * r.std_error;
  } else {
    r.pass = r.lhs <= r.rhs * (1.0 + 1e-12);
  }
  return r;
}

namespace {

struct RatioEvaluator {
  const NormFn& in_norm;
  const NormFn& out_norm;
  const RandomSource& rng;
  AveragingOptions opt;

  double operator()(const std::vector<CVec>& outputs, const std::vector<CVec>& inputs) const {
    const double den = rademacher_moment(in_norm, inputs, rng, opt).value;
    if (!(den > 0.0)) return -1.0;
    return rademacher_moment(out_norm, outputs, rng, opt).value / den;
  }
};

CVec random_complex(Eigen::Index n, CounterRng& g) {
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(g.normal(), g.normal());
  return v;
}

}  // namespace

NormEstimate rbound_estimate(std::span<const LinearMap> family, const NormFn& in_norm,
                             const NormFn& out_norm, int in_dim, int tuple_length,
                             const RandomSource& rng, const RBoundOptions& opt) {
  if (family.empty()) throw InvalidInput("rbound_estimate needs a non-empty family");
  if (tuple_length < 1) throw InvalidInput("tuple length must be >= 1");
  if (in_dim < 1) throw InvalidInput("input dimension must be >= 1");
  const int fam = static_cast<int>(family.size());
  const int n = tuple_length;
  const bool exact = n <= opt.k_exact;
  RatioEvaluator ratio{in_norm, out_norm, rng.substream(0xabc), {1.0, opt.budget, opt.k_exact}};

  double best = 0.0;
  for (int r = 0; r < std::max(opt.restarts, 1); ++r) {
    const RandomSource restart_rng = rng.substream(static_cast<std::uint64_t>(r));
    CounterRng g = restart_rng.engine(0);
    std::vector<int> pick(n);
    std::vector<CVec> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      pick[i] = static_cast<int>(g() % static_cast<std::uint64_t>(fam));
      xs[i] = random_complex(in_dim, g);
      ys[i] = family[pick[i]](xs[i]);
    }
    double current = ratio(ys, xs);
    int stale = 0;
    for (int sweep = 0; sweep < opt.sweeps && stale < 3; ++sweep) {
      bool improved = false;
      const double sigma = 0.5 * std::pow(0.9, sweep);
      for (int i = 0; i < n; ++i) {
        CVec best_x = xs[i], best_y = ys[i];
        int best_pick = pick[i];
        double best_val = current;
        auto consider = [&](const CVec& x, int op) {
          const CVec saved_x = xs[i], saved_y = ys[i];
          xs[i] = x;
          ys[i] = family[op](x);
          const double v = ratio(ys, xs);
          if (v > best_val) {
            best_val = v;
            best_x = xs[i];
            best_y = ys[i];
            best_pick = op;
          }
          xs[i] = saved_x;
          ys[i] = saved_y;
        };
        if (fam > 1) {
          if (fam <= 8) {
            for (int op = 0; op < fam; ++op)
              if (op != pick[i]) consider(xs[i], op);
          } else {
            for (int t = 0; t < 4; ++t)
              consider(xs[i], static_cast<int>(g() % static_cast<std::uint64_t>(fam)));
          }
        }
        const double scale = xs[i].norm() / std::sqrt(static_cast<double>(in_dim));
        for (int t = 0; t < opt.perturbations; ++t) {
          CVec x = xs[i] + sigma * scale * random_complex(in_dim, g);
          consider(x, pick[i]);
        }
        if (best_val > current) {
          xs[i] = best_x;
          ys[i] = best_y;
          pick[i] = best_pick;
          current = best_val;
          improved = true;
        }
      }
      stale = improved ? 0 : stale + 1;
    }
    best = std::max(best, current);
  }
  NormEstimate est;
  est.value = best;
  est.method = exact ? Method::exact_enum : Method::monte_carlo;
  est.samples = exact ? (std::int64_t{1} << (n - 1)) : opt.budget;
  est.semantic = Semantic::lower_bound;
  return est;
}

NormEstimate rbound_estimate(std::span<const LinearMap> family, const SpaceDescriptor& space_in,
                             const SpaceDescriptor& space_out, int tuple_length,
                             const RandomSource& rng, const RBoundOptions& opt) {
  return rbound_estimate(family, norm_fn(space_in), norm_fn(space_out), space_in.coords(),
                         tuple_length, rng, opt);
}

ComponentNorm::ComponentNorm(SpaceDescriptor space, int components, int samples,
                             std::uint64_t seed)
    : space_(space), components_(components) {
  if (components < 1) throw InvalidInput("component count must be >= 1");
  if (components > 1 && !space.is_hilbert()) {
    gauss_.resize(samples, components);
    const RandomSource src{seed, 0x6a55};
    for (int s = 0; s < samples; ++s) {
      CounterRng g = src.engine(static_cast<std::uint64_t>(s));
      for (int i = 0; i < components; ++i) gauss_(s, i) = g.normal();
    }
  }
}

double ComponentNorm::operator()(std::span<const cplx> x) const {
  const int c = space_.coords();
  if (static_cast<int>(x.size()) != c * components_)
    throw InvalidInput("component tuple shape mismatch");
  if (components_ == 1) return norm(space_, x);
  if (space_.is_hilbert()) return lq_norm(x, 2.0);
  thread_local CVec s;
  s.resize(c);
  double acc = 0.0;
  for (Eigen::Index r = 0; r < gauss_.rows(); ++r) {
    s.setZero();
    for (int i = 0; i < components_; ++i)
      s += gauss_(r, i) * Eigen::Map<const CVec>(x.data() + i * c, c);
    const double v = norm(space_, std::span<const cplx>(s.data(), s.size()));
    acc += v * v;
  }
  return std::sqrt(acc / static_cast<double>(gauss_.rows()));
}

}  // namespace radmaxlab::banach
