#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "radmaxlab/radmax.hpp"

namespace radmaxlab::carleson {

using dyadic::DyadicCube;
using dyadic::Grid;
using dyadic::GridFunction;

/// Finitely many scalar functions b_Q with supp b_Q inside Q.
class CarlesonFamily {
 public:
  using Key = std::pair<int, std::int64_t>;  // (level, linear cube index)

  CarlesonFamily(int n, int J);

  int n() const { return n_; }
  int J() const { return J_; }
  std::int64_t cells() const { return std::int64_t{1} << (n_ * J_); }

  /// values has one entry per cell; entries outside Q must vanish.
  void set(const DyadicCube& q, CVec values);
  /// b_Q = c 1_Q.
  void set_constant(const DyadicCube& q, cplx c);
  void erase(const DyadicCube& q);
  const CVec* find(const DyadicCube& q) const;
  std::size_t size() const { return terms_.size(); }
  const std::map<Key, CVec>& terms() const { return terms_; }
  DyadicCube cube(const Key& k) const { return DyadicCube::from_linear(n_, k.first, k.second); }

  CarlesonFamily scaled(cplx c) const;
  /// Cubes containing cell c that carry a term, finest first.
  std::vector<Key> active_at(std::int64_t c) const;

 private:
  int n_, J_;
  std::map<Key, CVec> terms_;
};

/// CSV rows: level, index0, index1, cell, real, imag (nonzero entries only),
/// preceded by a "# n= J=" header line.
void save_family_csv(const CarlesonFamily& b, const std::string& path);
CarlesonFamily load_family_csv(const std::string& path);

enum class CarForm { randomized, square_function };
std::string to_string(CarForm f);

/// sup over dyadic S of (|S|^{-1} int_S [sum_{R in S} |b_R|^2]^{p/2})^{1/p}, or
/// with E|sum eps_R b_R|^p in place of the square function.
double car_norm(const CarlesonFamily& b, double p, CarForm form, const RandomSource& rng = {});

/// (int E||sum_R eps_R b_R(x) <u>_R||_X^p dx)^{1/p} for single-component u.
banach::NormEstimate carleson_embed_lhs(const CarlesonFamily& b, const GridFunction& u, double p,
                                        const RandomSource& rng, std::int64_t budget = 4096,
                                        int k_exact = banach::kDefaultExactTerms);

enum class Ensemble { random, chain };
std::string to_string(Ensemble e);
Ensemble parse_ensemble(const std::string& s);

/// Each cube enters with probability 1/2 and carries values uniform on the
/// unit disc on its cells; the family is rescaled to car_norm(b, p) = 1.
CarlesonFamily random_family(int n, int J, double p, const RandomSource& rng);
/// b_Q = 1_Q along the ancestor chain of cell 0, rescaled to car_norm(b, p) = 1.
CarlesonFamily chain_family(int n, int J, double p);
/// b_Q = 1_Q for every cube of the top `depth` levels.
CarlesonFamily full_tree(int n, int J, int depth);

struct EmbeddingReport {
  std::string space;
  double p = 2.0, eps = 0.0;
  int n = 1, J = 0;
  Ensemble ensemble = Ensemble::random;
  std::vector<double> ratios;  // lhs / (car_norm(b, p + eps) ||u||_p)
  std::vector<banach::Method> methods;
  double max_ratio = 0.0, mean_ratio = 0.0;
};

EmbeddingReport embedding_constant_experiment(const banach::SpaceDescriptor& space, double p, double eps,
                                              int n, int J, int count, Ensemble ensemble,
                                              const RandomSource& rng);

struct StoppingDecomposition {
  double threshold = 0.0;
  /// Class k per cube, indexed [level + J][linear index].
  std::vector<std::vector<int>> cls;
  /// Chain R-bound lower bound per cube, same indexing.
  std::vector<std::vector<double>> value;
  /// F_k: maximal cubes of class > k, for k = 0..max class - 1.
  std::vector<std::vector<DyadicCube>> F;
  /// Measure of the union of F_k.
  std::vector<double> F_measure;
  bool containment_ok = true;
  std::int64_t containment_violations = 0;
  int max_class = 0;
};

struct StoppingOptions {
  double tol = 0.05;
  radmax::RadmaxOptions radmax;
};

StoppingDecomposition stopping_decomposition(const GridFunction& u, double A, const RandomSource& rng,
                                             const StoppingOptions& opts = {});

/// P(f, u) = sum_Q sum_eta c_f(Q, eta) <u>_Q h_Q^eta. One of f, u must be
/// scalar valued (single coordinate, single component).
GridFunction paraproduct(const GridFunction& f, const GridFunction& u);

struct ParaproductReport {
  std::string space;
  double p = 2.0;
  int n = 1, J = 0;
  bool swapped = false;
  std::vector<double> ratios;  // ||P(f,u)||_p / (||f||_BMO ||u||_p)
  std::int64_t skipped = 0;
  double max_ratio = 0.0, mean_ratio = 0.0;
};

/// f uniform on the unit disc per cell and u complex Gaussian; swapped puts
/// the X values in f and makes u scalar.
ParaproductReport paraproduct_bound_experiment(const banach::SpaceDescriptor& space, double p, int n, int J,
                                               int count, bool swapped, const RandomSource& rng);

}  // namespace radmaxlab::carleson
