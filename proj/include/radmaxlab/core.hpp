#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace radmaxlab {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments, shape mismatches, violated preconditions.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The operation needs structure (lattice, Hilbert, ...) the space lacks.
class UnsupportedSpace : public Error {
 public:
  using Error::Error;
};

/// The request would exceed a hard size limit.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped before reaching its tolerance.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// (I + itA) could not be inverted (singular or badly conditioned).
class ResolventFailure : public Error {
 public:
  using Error::Error;
};

/// A Neumann series was requested for a perturbation of norm >= 1.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace radmaxlab
