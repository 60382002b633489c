#pragma once

#include <optional>
#include <string>
#include <vector>

#include "radmaxlab/dyadic.hpp"

namespace radmaxlab::radmax {

struct RadmaxOptions {
  int restarts = 8;      // random unit-vector candidates per point
  int sweeps = 50;       // ascent iterations per candidate
  double moment = 1.0;   // moment of the Rademacher average
  int k_exact = banach::kDefaultExactTerms;
  std::int64_t budget = 2048;
};

/// Lower bound for sup_{||lambda||_2 <= 1} (E||sum_k eps_k lambda_k a_k||^p)^{1/p}
/// over real lambda. The candidate set is the basis vectors plus
/// opts.restarts random unit vectors, each refined by subgradient ascent.
/// best_lambda, when given, receives the maximizer found.
double rademacher_maximal_point(const banach::SpaceDescriptor& space, std::span<const CVec> averages,
                                const RandomSource& rng, const RadmaxOptions& opts = {},
                                RVec* best_lambda = nullptr);

/// M_R u at every cell; u must have a single component.
RVec rademacher_maximal(const dyadic::GridFunction& u, const RandomSource& rng,
                        const RadmaxOptions& opts = {});

/// The J+1 averages <u>_Q over the cubes containing a cell, finest first.
std::vector<CVec> ancestor_averages(const dyadic::GridFunction& u, std::int64_t cell);

struct RMFReport {
  std::string space;
  double p = 2.0;
  int n = 1;
  int J = 0;
  int ensemble = 0;
  std::uint64_t seed = 0;
  RadmaxOptions options;
  std::vector<double> ratios;          // ||M_R u||_p / ||u||_p
  std::vector<double> maximal_ratios;  // ||M u||_p / ||u||_p, same inputs
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
};

/// Complex Gaussian test function on the given grid.
dyadic::GridFunction random_function(const dyadic::Grid& g, const RandomSource& rng);

RMFReport rmf_norm_experiment(const banach::SpaceDescriptor& space, double p, int n, int J,
                              int ensemble, const RandomSource& rng, const RadmaxOptions& opts = {});

struct Counterexample {
  int m = 0;
  int dimension = 0;          // n = 2^m; the space is l^1 of dimension 2^n
  double value = 0.0;         // exact E||sum_i eps_i alpha_i A_{2^{-n+2^i}} u(0)||
  double chain_bound = 0.0;   // sum_i alpha_i (1 - 2 * 2^{-2^{i-1}})
  double weak_chain_bound = 0.0;  // sum_i alpha_i (1 - 2^{1-2^{i-1}}) - sum_i alpha_i 2^{-2^{i-1}}
  double u_norm = 0.0;        // ||u||_{L^p(l^1)}, the same for every p
  RVec lambda;                // the scale weights, indexed by j = 0..n
};

/// The l^1 construction at n = 2^m with alpha_i = 1/(i+1). m > 4 throws
/// ResourceError.
Counterexample counterexample_l1(int m);
/// The function u itself (u = e_k on the k-th finest cell); only m <= 3.
dyadic::GridFunction counterexample_function(int m);

struct DominationReport {
  bool type2_checked = false;
  bool lattice_checked = false;
  double type2_constant = 0.0;    // max_x M_R u(x) / M u(x)
  double lattice_constant = 0.0;  // max_x M_R u(x) / ||M_lattice u(x)||
  std::vector<std::string> notices;
};

DominationReport domination_checks(const dyadic::GridFunction& u, const RandomSource& rng,
                                   const RadmaxOptions& opts = {});

}  // namespace radmaxlab::radmax
