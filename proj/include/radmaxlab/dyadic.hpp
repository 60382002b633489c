#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "radmaxlab/banach_space.hpp"

namespace radmaxlab::dyadic {

/// Periodic dyadic grid on [0,1)^n with 2^J cells per side. Functions take
/// values in X^N, N = ncomp.
class Grid {
 public:
  Grid(int n, int J, int ncomp, banach::SpaceDescriptor space);
  /// Scalar grid (X = C, one component).
  static Grid scalar(int n, int J);

  int n() const { return n_; }
  int J() const { return J_; }
  int ncomp() const { return ncomp_; }
  const banach::SpaceDescriptor& space() const { return space_; }

  int side() const { return 1 << J_; }
  std::int64_t cells() const { return std::int64_t{1} << (n_ * J_); }
  int coords() const { return space_.coords(); }
  /// Complex entries stored per cell.
  int stride() const { return ncomp_ * space_.coords(); }

  std::int64_t cell(int i0, int i1 = 0) const { return i0 + std::int64_t{side()} * i1; }
  std::array<int, 2> cell_index(std::int64_t c) const;
  /// Number of cubes at level k (side 2^k).
  std::int64_t cubes(int k) const;
  /// Linear index of the cube of level k containing cell c.
  std::int64_t cube_of(std::int64_t c, int k) const;

  bool operator==(const Grid&) const = default;

 private:
  int n_, J_, ncomp_;
  banach::SpaceDescriptor space_;
};

struct DyadicCube {
  int level = 0;                 // side length 2^level, level in [-J, 0]
  std::array<int, 2> index{};    // position in units of 2^level

  std::int64_t linear(int n) const;
  static DyadicCube from_linear(int n, int level, std::int64_t idx);
  DyadicCube parent() const;
  DyadicCube child(int n, int which) const;
  /// Side length in finest cells.
  int cells_per_side(int J) const { return 1 << (level + J); }
  bool contains_cell(const Grid& g, std::int64_t c) const;
  bool contains(const DyadicCube& other) const;
  bool operator==(const DyadicCube&) const = default;
};

/// X^N-valued function, piecewise constant on finest cells. Storage order
/// is (cell, component, coordinate).
class GridFunction {
 public:
  explicit GridFunction(Grid grid);
  GridFunction(Grid grid, CVec values);

  const Grid& grid() const { return grid_; }
  const CVec& values() const { return values_; }
  CVec& values() { return values_; }

  std::span<const cplx> at(std::int64_t cell) const {
    return {values_.data() + cell * grid_.stride(), static_cast<std::size_t>(grid_.stride())};
  }
  std::span<cplx> at(std::int64_t cell) {
    return {values_.data() + cell * grid_.stride(), static_cast<std::size_t>(grid_.stride())};
  }
  cplx& operator()(std::int64_t cell, int comp, int coord) {
    return values_[(cell * grid_.ncomp() + comp) * grid_.coords() + coord];
  }
  cplx operator()(std::int64_t cell, int comp, int coord) const {
    return values_[(cell * grid_.ncomp() + comp) * grid_.coords() + coord];
  }

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(cplx c);

 private:
  Grid grid_;
  CVec values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(cplx c, GridFunction a);

/// Averages over every cube of level k, flat (cube, stride).
CVec cube_averages(const GridFunction& u, int k);
GridFunction conditional_expectation(const GridFunction& u, int k);

/// Haar coefficients c(Q, eta) = avg_Q(u h_Q^eta) for cubes of level
/// -J+1..0. eta is a nonzero bitmask over the n axes; h_Q^eta is +1 on the
/// lower half of Q along each axis in eta and -1 on the upper half.
struct HaarCoefficients {
  Grid grid;
  CVec mean;
  /// levels[j] belongs to level k = -j; flat (cube, eta - 1, stride).
  std::vector<CVec> levels;

  cplx coefficient(const DyadicCube& q, int eta, int comp, int coord) const;
};

HaarCoefficients haar_decompose(const GridFunction& u);
GridFunction haar_reconstruct(const HaarCoefficients& h);
/// The Haar function h_Q^eta as a scalar grid function.
GridFunction haar_function(const Grid& scalar_grid, const DyadicCube& q, int eta);
/// Value of h_Q^eta at cell c (0 outside Q).
double haar_value(const Grid& g, const DyadicCube& q, int eta, std::int64_t c);

/// Norm on X^N used for grid values.
banach::ComponentNorm value_norm(const Grid& g);

/// M u(x) = max_k ||A_{2^k} u(x)||_{X^N}; one value per cell.
RVec dyadic_maximal(const GridFunction& u);
/// Coordinatewise sup_k |<u>_Q|; lattices only.
GridFunction lattice_maximal(const GridFunction& u);

/// (sum_cells 2^{-nJ} ||u(cell)||^p)^{1/p}; p = infinity allowed.
double lp_norm(const GridFunction& u, double p);
/// Same for nonnegative per-cell values.
double lp_norm(const RVec& cell_values, double p);
/// Dyadic BMO via L^1 mean oscillation.
double bmo_norm(const GridFunction& f);

}  // namespace radmaxlab::dyadic
