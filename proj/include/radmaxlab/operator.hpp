#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "radmaxlab/spectral.hpp"

namespace radmaxlab::ops {

using spectral::Shape;
using spectral::Symbol;

class OperatorNode;

/// Immutable handle to a linear operator on C^N-valued grid fields,
/// tensor-extended over the X coordinates. Cheap to copy.
class OperatorHandle {
 public:
  OperatorHandle() = default;
  explicit OperatorHandle(std::shared_ptr<const OperatorNode> node) : node_(std::move(node)) {}

  const Shape& shape() const;
  int in_comps() const;
  int out_comps() const;
  /// Unknowns of the input side: in_comps * cells.
  std::int64_t in_size() const;
  std::int64_t out_size() const;

  CMat apply(const CMat& field) const;
  dyadic::GridFunction apply(const dyadic::GridFunction& u) const;
  /// Per-frequency matrix when the operator is a Fourier multiplier.
  std::optional<Symbol> symbol() const;
  /// Dense out_size x in_size matrix.
  CMat dense() const;

  const OperatorNode* node() const { return node_.get(); }
  explicit operator bool() const { return static_cast<bool>(node_); }

 private:
  std::shared_ptr<const OperatorNode> node_;
};

class OperatorNode {
 public:
  OperatorNode(Shape s, int in, int out) : shape_(s), in_(in), out_(out) {}
  virtual ~OperatorNode() = default;
  virtual CMat apply(const CMat& field) const = 0;
  virtual std::optional<Symbol> symbol() const { return std::nullopt; }

  const Shape& shape() const { return shape_; }
  int in_comps() const { return in_; }
  int out_comps() const { return out_; }

 private:
  Shape shape_;
  int in_, out_;
};

OperatorHandle identity(const Shape& s, int comps);
OperatorHandle zero(const Shape& s, int in, int out);
OperatorHandle multiplier(const Shape& s, Symbol symbol);
/// Cellwise matrices, one per cell (out x in).
OperatorHandle pointwise(const Shape& s, std::vector<CMat> matrices);
OperatorHandle scaled(cplx c, const OperatorHandle& op);
/// ops[0] after ops[1] after ...
OperatorHandle compose(const std::vector<OperatorHandle>& ops);
OperatorHandle add(const std::vector<OperatorHandle>& ops);
OperatorHandle linear_combination(const std::vector<cplx>& coeffs, const std::vector<OperatorHandle>& ops);
/// Block operator; entries[i][j] maps block j of the input to block i of the
/// output. Empty handles are zero blocks.
OperatorHandle block(const std::vector<int>& out_sizes, const std::vector<int>& in_sizes,
                     const std::vector<std::vector<OperatorHandle>>& entries);

enum class ResolventStyle { R, P, Q, shift };
enum class SolveMethod { automatic, symbol, dense, iterative };

struct SolveOptions {
  SolveMethod method = SolveMethod::automatic;
  std::int64_t dense_limit = 4096;
  double tol = 1e-10;
  int restart = 60;
  int max_iterations = 3000;
  /// Right preconditioner, applied as an approximate inverse of the system.
  OperatorHandle preconditioner;
};

/// R: (I + itA)^{-1}, P: (I + t^2 A^2)^{-1}, Q: tA(I + t^2 A^2)^{-1},
/// shift: (I + tA)^{-1}. Each style factors its own system.
OperatorHandle resolvent(const OperatorHandle& inner, double t, ResolventStyle style,
                         SolveOptions opts = {});

/// Restarted GMRES with right preconditioning, column by column.
CMat gmres(const std::function<CMat(const CMat&)>& A, const std::function<CMat(const CMat&)>& Minv,
           const CMat& b, double tol, int restart, int max_iterations);

/// Symbol algebra helpers.
Symbol symbol_product(const Symbol& a, const Symbol& b);
Symbol symbol_sum(const Symbol& a, const Symbol& b, cplx cb = 1.0);
CMat apply_symbol(const Symbol& s, int in, int out, const Shape& shape, const CMat& field);

}  // namespace radmaxlab::ops
