#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "radmaxlab/core.hpp"
#include "radmaxlab/random.hpp"

namespace radmaxlab::banach {

enum class SpaceKind { lebesgue, hilbert, schatten };

/// A finite-dimensional Banach space: l^q_d, Hilbert C^d, or the Schatten
/// class S^q on m x m matrices. Elements are stored as complex coordinate
/// arrays (column-major m x m for Schatten).
class SpaceDescriptor {
 public:
  static SpaceDescriptor lebesgue(double q, int d);
  static SpaceDescriptor hilbert(int d);
  static SpaceDescriptor schatten(double q, int m);
  /// "lq:1.5:8", "hilbert:4", "schatten:2:3"; throws InvalidInput.
  static SpaceDescriptor parse(std::string_view spec);

  SpaceKind kind() const { return kind_; }
  double q() const { return q_; }
  /// d for lebesgue/hilbert, m for schatten.
  int dim() const { return dim_; }
  /// Number of complex coordinates of an element.
  int coords() const { return kind_ == SpaceKind::schatten ? dim_ * dim_ : dim_; }

  bool is_lattice() const { return kind_ != SpaceKind::schatten; }
  bool is_hilbert() const { return kind_ == SpaceKind::hilbert || q_ == 2.0; }
  bool has_type_2() const { return q_ >= 2.0 || is_hilbert(); }
  bool is_scalar() const { return kind_ != SpaceKind::schatten && dim_ == 1; }

  std::string to_string() const;

  friend bool operator==(const SpaceDescriptor&, const SpaceDescriptor&) = default;

 private:
  SpaceDescriptor(SpaceKind kind, double q, int dim) : kind_(kind), q_(q), dim_(dim) {}

  SpaceKind kind_;
  double q_;
  int dim_;
};

/// An element of a SpaceDescriptor.
struct Vector {
  Vector(SpaceDescriptor space, CVec data);

  SpaceDescriptor space;
  CVec data;
};

using NormFn = std::function<double(std::span<const cplx>)>;

double norm(const SpaceDescriptor& space, std::span<const cplx> x);
double norm(const Vector& x);
NormFn norm_fn(const SpaceDescriptor& space);

/// A functional phi with Re<phi, x> = ||x|| and dual norm <= 1, where
/// <phi, x> = sum conj(phi_j) x_j. Zero for x = 0.
CVec norming_functional(const SpaceDescriptor& space, std::span<const cplx> x);

enum class Method { exact_enum, monte_carlo, closed_form };
enum class Semantic { exact, lower_bound, estimate };

std::string to_string(Method m);
std::string to_string(Semantic s);

struct NormEstimate {
  double value = 0.0;
  Method method = Method::exact_enum;
  std::int64_t samples = 0;
  double std_error = 0.0;
  Semantic semantic = Semantic::exact;
};

/// Sign patterns are enumerated exactly up to this many terms.
inline constexpr int kDefaultExactTerms = 14;

struct AveragingOptions {
  double moment = 1.0;
  std::int64_t budget = 4096;
  int k_exact = kDefaultExactTerms;
};

/// (E||sum_k eps_k x_k||^p)^{1/p} for an arbitrary norm on flat coordinate
/// arrays. Exact enumeration for K <= k_exact, Monte Carlo otherwise.
NormEstimate rademacher_moment(const NormFn& norm, std::span<const CVec> xs,
                               const RandomSource& rng, const AveragingOptions& opt = {});

/// Rademacher average in X; adds the Hilbert closed form for p = 2.
NormEstimate rademacher_avg(const SpaceDescriptor& space, std::span<const CVec> xs,
                            double p, const RandomSource& rng,
                            std::int64_t budget = 4096, int k_exact = kDefaultExactTerms);

/// Gaussian analogue of rademacher_moment (always Monte Carlo).
NormEstimate gaussian_moment(const NormFn& norm, std::span<const CVec> xs,
                             const RandomSource& rng, const AveragingOptions& opt = {});

NormEstimate gaussian_avg(const SpaceDescriptor& space, std::span<const CVec> xs,
                          double p, const RandomSource& rng, std::int64_t budget = 4096);

/// ||(sum_k |x_k|^2)^{1/2}||_X with coordinatewise modulus; lattices only.
double square_function_norm(const SpaceDescriptor& space, std::span<const CVec> xs);

/// (E||sum_i gamma_i x_i||^2)^{1/2}: the Gaussian norm on X^n.
NormEstimate gaussian_product_norm(const SpaceDescriptor& space, std::span<const CVec> tuple,
                                   const RandomSource& rng, std::int64_t budget = 4096);

struct ContractionReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  Method method = Method::exact_enum;
  double std_error = 0.0;
};

/// Compares E||sum eps_j lambda_j x_j|| with 2 ||lambda||_inf E||sum eps_j x_j||.
ContractionReport contraction_check(const SpaceDescriptor& space, std::span<const CVec> xs,
                                    std::span<const cplx> lambdas, const RandomSource& rng,
                                    std::int64_t budget = 4096,
                                    int k_exact = kDefaultExactTerms);

using LinearMap = std::function<CVec(const CVec&)>;

struct RBoundOptions {
  int restarts = 8;
  int sweeps = 50;
  int perturbations = 32;
  int k_exact = kDefaultExactTerms;
  std::int64_t budget = 2048;
};

/// Certified lower bound for the R-bound of a family of operators, from
/// random restarts and greedy coordinate ascent over (T_{j_i}, x_i).
NormEstimate rbound_estimate(std::span<const LinearMap> family, const NormFn& in_norm,
                             const NormFn& out_norm, int in_dim, int tuple_length,
                             const RandomSource& rng, const RBoundOptions& opt = {});

NormEstimate rbound_estimate(std::span<const LinearMap> family,
                             const SpaceDescriptor& space_in,
                             const SpaceDescriptor& space_out, int tuple_length,
                             const RandomSource& rng, const RBoundOptions& opt = {});

/// The norm of X^N used on grid functions: the plain X norm for N = 1,
/// the Euclidean norm when X is Hilbert, and otherwise the Gaussian product
/// norm evaluated on a frozen set of Gaussian samples (so it is a genuine,
/// deterministic norm).
class ComponentNorm {
 public:
  ComponentNorm(SpaceDescriptor space, int components, int samples = 256,
                std::uint64_t seed = 0x5eed);

  const SpaceDescriptor& space() const { return space_; }
  int components() const { return components_; }
  /// x holds components * coords entries, component-major.
  double operator()(std::span<const cplx> x) const;

 private:
  SpaceDescriptor space_;
  int components_;
  Eigen::MatrixXd gauss_;  // samples x components
};

}  // namespace radmaxlab::banach
