#include "radmaxlab/operator.hpp"

#include <cmath>
#include <mutex>

#include <Eigen/LU>

namespace radmaxlab::ops {

namespace {

void check_field(const OperatorNode& n, const CMat& f) {
  if (f.rows() != n.in_comps() * n.shape().cells())
    throw InvalidInput("field does not match operator input size");
}

class IdentityNode : public OperatorNode {
 public:
  using OperatorNode::OperatorNode;
  CMat apply(const CMat& f) const override {
    check_field(*this, f);
    return f;
  }
  std::optional<Symbol> symbol() const override {
    return Symbol(static_cast<std::size_t>(shape().cells()), CMat::Identity(in_comps(), in_comps()));
  }
};

class ZeroNode : public OperatorNode {
 public:
  using OperatorNode::OperatorNode;
  CMat apply(const CMat& f) const override {
    check_field(*this, f);
    return CMat::Zero(out_comps() * shape().cells(), f.cols());
  }
  std::optional<Symbol> symbol() const override {
    return Symbol(static_cast<std::size_t>(shape().cells()), CMat::Zero(out_comps(), in_comps()));
  }
};

class MultiplierNode : public OperatorNode {
 public:
  MultiplierNode(Shape s, Symbol sym)
      : OperatorNode(s, static_cast<int>(sym.at(0).cols()), static_cast<int>(sym.at(0).rows())),
        sym_(std::move(sym)) {}
  CMat apply(const CMat& f) const override {
    check_field(*this, f);
    return apply_symbol(sym_, in_comps(), out_comps(), shape(), f);
  }
  std::optional<Symbol> symbol() const override { return sym_; }

 private:
  Symbol sym_;
};

class PointwiseNode : public OperatorNode {
 public:
  PointwiseNode(Shape s, std::vector<CMat> m)
      : OperatorNode(s, static_cast<int>(m.at(0).cols()), static_cast<int>(m.at(0).rows())),
        m_(std::move(m)) {
    constant_ = true;
    for (const auto& x : m_) {
      if (x.rows() != out_comps() || x.cols() != in_comps())
        throw InvalidInput("pointwise matrices differ in shape");
      if (constant_ && !(x == m_[0])) constant_ = false;
    }
  }
  CMat apply(const CMat& f) const override {
    check_field(*this, f);
    const std::int64_t cells = shape().cells();
    CMat out = CMat::Zero(out_comps() * cells, f.cols());
    for (std::int64_t c = 0; c < cells; ++c) {
      const CMat& m = m_[static_cast<std::size_t>(c)];
      for (int k = 0; k < out_comps(); ++k)
        for (int l = 0; l < in_comps(); ++l) {
          const cplx a = m(k, l);
          if (a == 0.0) continue;
          out.row(k * cells + c) += a * f.row(l * cells + c);
        }
    }
    return out;
  }
  std::optional<Symbol> symbol() const override {
    if (!constant_) return std::nullopt;
    return Symbol(static_cast<std::size_t>(shape().cells()), m_[0]);
  }

 private:
  std::vector<CMat> m_;
  bool constant_ = false;
};

class CombinationNode : public OperatorNode {
 public:
  CombinationNode(std::vector<cplx> c, std::vector<OperatorHandle> ops)
      : OperatorNode(ops.at(0).shape(), ops.at(0).in_comps(), ops.at(0).out_comps()),
        c_(std::move(c)), ops_(std::move(ops)) {
    if (c_.size() != ops_.size()) throw InvalidInput("coefficient count mismatch");
    for (const auto& o : ops_)
      if (!(o.shape() == shape()) || o.in_comps() != in_comps() || o.out_comps() != out_comps())
        throw InvalidInput("summands differ in shape");
  }
  CMat apply(const CMat& f) const override {
    CMat out = c_[0] * ops_[0].apply(f);
    for (std::size_t i = 1; i < ops_.size(); ++i) out += c_[i] * ops_[i].apply(f);
    return out;
  }
  std::optional<Symbol> symbol() const override {
    auto s = ops_[0].symbol();
    if (!s) return std::nullopt;
    for (auto& m : *s) m *= c_[0];
    for (std::size_t i = 1; i < ops_.size(); ++i) {
      auto t = ops_[i].symbol();
      if (!t) return std::nullopt;
      s = symbol_sum(*s, *t, c_[i]);
    }
    return s;
  }

 private:
  std::vector<cplx> c_;
  std::vector<OperatorHandle> ops_;
};

class ComposeNode : public OperatorNode {
 public:
  explicit ComposeNode(std::vector<OperatorHandle> ops)
      : OperatorNode(ops.at(0).shape(), ops.back().in_comps(), ops.at(0).out_comps()),
        ops_(std::move(ops)) {
    for (std::size_t i = 0; i + 1 < ops_.size(); ++i)
      if (ops_[i].in_comps() != ops_[i + 1].out_comps() || !(ops_[i].shape() == ops_[i + 1].shape()))
        throw InvalidInput("composition shapes do not chain");
  }
  CMat apply(const CMat& f) const override {
    CMat x = ops_.back().apply(f);
    for (std::size_t i = ops_.size() - 1; i-- > 0;) x = ops_[i].apply(x);
    return x;
  }
  std::optional<Symbol> symbol() const override {
    auto s = ops_.back().symbol();
    if (!s) return std::nullopt;
    for (std::size_t i = ops_.size() - 1; i-- > 0;) {
      auto t = ops_[i].symbol();
      if (!t) return std::nullopt;
      s = symbol_product(*t, *s);
    }
    return s;
  }

 private:
  std::vector<OperatorHandle> ops_;
};

int total(const std::vector<int>& v) {
  int s = 0;
  for (int x : v) s += x;
  return s;
}

class BlockNode : public OperatorNode {
 public:
  BlockNode(Shape s, std::vector<int> outs, std::vector<int> ins, std::vector<std::vector<OperatorHandle>> e)
      : OperatorNode(s, total(ins), total(outs)), outs_(std::move(outs)), ins_(std::move(ins)), e_(std::move(e)) {
    if (e_.size() != outs_.size()) throw InvalidInput("block row count mismatch");
    for (std::size_t i = 0; i < e_.size(); ++i) {
      if (e_[i].size() != ins_.size()) throw InvalidInput("block column count mismatch");
      for (std::size_t j = 0; j < ins_.size(); ++j) {
        const auto& op = e_[i][j];
        if (!op) continue;
        if (!(op.shape() == s) || op.out_comps() != outs_[i] || op.in_comps() != ins_[j])
          throw InvalidInput("block entry shape mismatch");
      }
    }
  }
  CMat apply(const CMat& f) const override {
    check_field(*this, f);
    const std::int64_t cells = shape().cells();
    CMat out = CMat::Zero(out_comps() * cells, f.cols());
    std::int64_t ro = 0;
    for (std::size_t i = 0; i < outs_.size(); ++i) {
      std::int64_t co = 0;
      for (std::size_t j = 0; j < ins_.size(); ++j) {
        if (e_[i][j]) out.middleRows(ro, outs_[i] * cells) += e_[i][j].apply(f.middleRows(co, ins_[j] * cells));
        co += ins_[j] * cells;
      }
      ro += outs_[i] * cells;
    }
    return out;
  }
  std::optional<Symbol> symbol() const override {
    const std::int64_t cells = shape().cells();
    Symbol s(static_cast<std::size_t>(cells), CMat::Zero(out_comps(), in_comps()));
    int ro = 0;
    for (std::size_t i = 0; i < outs_.size(); ++i) {
      int co = 0;
      for (std::size_t j = 0; j < ins_.size(); ++j) {
        if (e_[i][j]) {
          auto t = e_[i][j].symbol();
          if (!t) return std::nullopt;
          for (std::int64_t b = 0; b < cells; ++b)
            s[static_cast<std::size_t>(b)].block(ro, co, outs_[i], ins_[j]) = (*t)[static_cast<std::size_t>(b)];
        }
        co += ins_[j];
      }
      ro += outs_[i];
    }
    return s;
  }

 private:
  std::vector<int> outs_, ins_;
  std::vector<std::vector<OperatorHandle>> e_;
};

CMat system_matrix_symbol(const CMat& a, double t, ResolventStyle style) {
  const CMat I = CMat::Identity(a.rows(), a.cols());
  switch (style) {
    case ResolventStyle::R: return I + cplx(0.0, t) * a;
    case ResolventStyle::shift: return I + t * a;
    default: return I + t * t * (a * a);
  }
}

class ResolventNode : public OperatorNode {
 public:
  ResolventNode(OperatorHandle inner, double t, ResolventStyle style, SolveOptions opts)
      : OperatorNode(inner.shape(), inner.in_comps(), inner.out_comps()),
        inner_(std::move(inner)), t_(t), style_(style), opts_(std::move(opts)) {
    if (inner_.in_comps() != inner_.out_comps()) throw InvalidInput("resolvent of a non-square operator");
    if (!std::isfinite(t)) throw InvalidInput("resolvent parameter must be finite");
    if (opts_.method == SolveMethod::automatic || opts_.method == SolveMethod::symbol) {
      auto s = inner_.symbol();
      if (s) {
        sym_ = build_symbol(*s);
      } else if (opts_.method == SolveMethod::symbol) {
        throw InvalidInput("symbol solve requested for a non-multiplier operator");
      }
    }
  }

  CMat apply(const CMat& f) const override {
    check_field(*this, f);
    if (t_ == 0.0) return style_ == ResolventStyle::Q ? CMat::Zero(f.rows(), f.cols()) : f;
    if (sym_) return apply_symbol(*sym_, in_comps(), out_comps(), shape(), f);
    CMat v = solve(f);
    if (style_ == ResolventStyle::Q) v = t_ * inner_.apply(v);
    return v;
  }

  std::optional<Symbol> symbol() const override { return sym_; }

 private:
  Symbol build_symbol(const Symbol& s) const {
    Symbol out(s.size());
    for (std::size_t b = 0; b < s.size(); ++b) {
      const CMat& a = s[b];
      if (t_ == 0.0) {
        out[b] = style_ == ResolventStyle::Q ? CMat(CMat::Zero(a.rows(), a.cols())) : CMat(CMat::Identity(a.rows(), a.cols()));
        continue;
      }
      Eigen::PartialPivLU<CMat> lu(system_matrix_symbol(a, t_, style_));
      CMat inv = lu.inverse();
      if (!inv.allFinite()) throw ResolventFailure("singular resolvent symbol");
      out[b] = style_ == ResolventStyle::Q ? CMat(t_ * a * inv) : inv;
    }
    return out;
  }

  CMat system_apply(const CMat& x) const {
    switch (style_) {
      case ResolventStyle::R: return x + cplx(0.0, t_) * inner_.apply(x);
      case ResolventStyle::shift: return x + t_ * inner_.apply(x);
      default: return x + t_ * t_ * inner_.apply(inner_.apply(x));
    }
  }

  CMat solve(const CMat& f) const {
    const std::int64_t unknowns = in_size();
    const bool dense = opts_.method == SolveMethod::dense ||
                       (opts_.method == SolveMethod::automatic && unknowns <= opts_.dense_limit);
    if (dense) {
      std::call_once(lu_once_, [&] {
        const CMat I = CMat::Identity(unknowns, unknowns);
        const CMat sys = system_apply(I);
        lu_ = std::make_unique<Eigen::PartialPivLU<CMat>>(sys);
        const double rc = lu_->rcond();
        if (!(rc > 1e-14)) {
          lu_.reset();
          lu_error_ = true;
        }
      });
      if (lu_error_) throw ResolventFailure("resolvent system is singular or badly conditioned");
      return lu_->solve(f);
    }
    auto A = [this](const CMat& x) { return system_apply(x); };
    std::function<CMat(const CMat&)> M = [](const CMat& x) { return x; };
    if (opts_.preconditioner) M = [this](const CMat& x) { return opts_.preconditioner.apply(x); };
    return gmres(A, M, f, opts_.tol, opts_.restart, opts_.max_iterations);
  }

  std::int64_t in_size() const { return in_comps() * shape().cells(); }

  OperatorHandle inner_;
  double t_;
  ResolventStyle style_;
  SolveOptions opts_;
  std::optional<Symbol> sym_;
  mutable std::once_flag lu_once_;
  mutable std::unique_ptr<Eigen::PartialPivLU<CMat>> lu_;
  mutable bool lu_error_ = false;
};

}  // namespace

const Shape& OperatorHandle::shape() const { return node_->shape(); }
int OperatorHandle::in_comps() const { return node_->in_comps(); }
int OperatorHandle::out_comps() const { return node_->out_comps(); }
std::int64_t OperatorHandle::in_size() const { return in_comps() * shape().cells(); }
std::int64_t OperatorHandle::out_size() const { return out_comps() * shape().cells(); }
CMat OperatorHandle::apply(const CMat& f) const { return node_->apply(f); }
std::optional<Symbol> OperatorHandle::symbol() const { return node_->symbol(); }

dyadic::GridFunction OperatorHandle::apply(const dyadic::GridFunction& u) const {
  const auto& g = u.grid();
  if (!(spectral::shape_of(g) == shape()) || g.ncomp() != in_comps())
    throw InvalidInput("grid function does not match operator");
  const dyadic::Grid out(g.n(), g.J(), out_comps(), g.space());
  return spectral::from_field(out, apply(spectral::to_field(u)));
}

CMat OperatorHandle::dense() const { return apply(CMat::Identity(in_size(), in_size())); }

OperatorHandle identity(const Shape& s, int comps) {
  return OperatorHandle(std::make_shared<IdentityNode>(s, comps, comps));
}

OperatorHandle zero(const Shape& s, int in, int out) {
  return OperatorHandle(std::make_shared<ZeroNode>(s, in, out));
}

OperatorHandle multiplier(const Shape& s, Symbol symbol) {
  if (static_cast<std::int64_t>(symbol.size()) != s.cells()) throw InvalidInput("symbol size mismatch");
  return OperatorHandle(std::make_shared<MultiplierNode>(s, std::move(symbol)));
}

OperatorHandle pointwise(const Shape& s, std::vector<CMat> m) {
  if (static_cast<std::int64_t>(m.size()) != s.cells()) throw InvalidInput("one matrix per cell expected");
  return OperatorHandle(std::make_shared<PointwiseNode>(s, std::move(m)));
}

OperatorHandle scaled(cplx c, const OperatorHandle& op) { return linear_combination({c}, {op}); }

OperatorHandle compose(const std::vector<OperatorHandle>& ops) {
  if (ops.empty()) throw InvalidInput("empty composition");
  if (ops.size() == 1) return ops[0];
  return OperatorHandle(std::make_shared<ComposeNode>(ops));
}

OperatorHandle add(const std::vector<OperatorHandle>& ops) {
  return linear_combination(std::vector<cplx>(ops.size(), 1.0), ops);
}

OperatorHandle linear_combination(const std::vector<cplx>& c, const std::vector<OperatorHandle>& ops) {
  if (ops.empty()) throw InvalidInput("empty sum");
  return OperatorHandle(std::make_shared<CombinationNode>(c, ops));
}

OperatorHandle block(const std::vector<int>& outs, const std::vector<int>& ins,
                     const std::vector<std::vector<OperatorHandle>>& entries) {
  Shape s;
  bool found = false;
  for (const auto& row : entries)
    for (const auto& e : row)
      if (e && !found) {
        s = e.shape();
        found = true;
      }
  if (!found) throw InvalidInput("block operator needs at least one entry");
  return OperatorHandle(std::make_shared<BlockNode>(s, outs, ins, entries));
}

OperatorHandle resolvent(const OperatorHandle& inner, double t, ResolventStyle style, SolveOptions opts) {
  return OperatorHandle(std::make_shared<ResolventNode>(inner, t, style, std::move(opts)));
}

CMat gmres(const std::function<CMat(const CMat&)>& A, const std::function<CMat(const CMat&)>& Minv,
           const CMat& b, double tol, int restart, int max_iterations) {
  CMat x = CMat::Zero(b.rows(), b.cols());
  for (Eigen::Index col = 0; col < b.cols(); ++col) {
    const CVec rhs = b.col(col);
    const double bnorm = rhs.norm();
    if (bnorm == 0.0) continue;
    CVec xc = CVec::Zero(rhs.size());
    int iterations = 0;
    double rel = 1.0;
    while (iterations < max_iterations) {
      const CVec r = rhs - A(xc);
      double beta = r.norm();
      rel = beta / bnorm;
      if (rel <= tol) break;
      const int m = restart;
      CMat V(rhs.size(), m + 1), Z(rhs.size(), m);
      CMat H = CMat::Zero(m + 1, m);
      std::vector<cplx> cs(m), sn(m);
      CVec g = CVec::Zero(m + 1);
      g[0] = beta;
      V.col(0) = r / beta;
      int k = 0;
      for (; k < m && iterations < max_iterations; ++k, ++iterations) {
        Z.col(k) = Minv(V.col(k));
        CVec w = A(Z.col(k));
        for (int i = 0; i <= k; ++i) {
          H(i, k) = V.col(i).dot(w);
          w -= H(i, k) * V.col(i);
        }
        // one reorthogonalization pass
        for (int i = 0; i <= k; ++i) {
          const cplx h = V.col(i).dot(w);
          H(i, k) += h;
          w -= h * V.col(i);
        }
        H(k + 1, k) = w.norm();
        if (std::abs(H(k + 1, k)) > 0.0) V.col(k + 1) = w / H(k + 1, k);
        for (int i = 0; i < k; ++i) {
          const cplx tmp = std::conj(cs[i]) * H(i, k) + std::conj(sn[i]) * H(i + 1, k);
          H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
          H(i, k) = tmp;
        }
        const double den = std::hypot(std::abs(H(k, k)), std::abs(H(k + 1, k)));
        if (den == 0.0) {
          cs[k] = 1.0;
          sn[k] = 0.0;
        } else {
          cs[k] = H(k, k) / den;
          sn[k] = H(k + 1, k) / den;
        }
        H(k, k) = std::conj(cs[k]) * H(k, k) + std::conj(sn[k]) * H(k + 1, k);
        H(k + 1, k) = 0.0;
        g[k + 1] = -sn[k] * g[k];
        g[k] = std::conj(cs[k]) * g[k];
        if (std::abs(g[k + 1]) / bnorm <= tol * 0.5) {
          ++k;
          ++iterations;
          break;
        }
      }
      const CMat Hk = H.topLeftCorner(k, k);
      const CVec y = Hk.triangularView<Eigen::Upper>().solve(g.head(k));
      xc += Z.leftCols(k) * y;
    }
    const double final_rel = (rhs - A(xc)).norm() / bnorm;
    if (!(final_rel <= tol * 10.0)) throw SolverFailure("GMRES did not converge", final_rel);
    x.col(col) = xc;
  }
  return x;
}

Symbol symbol_product(const Symbol& a, const Symbol& b) {
  if (a.size() != b.size()) throw InvalidInput("symbol size mismatch");
  Symbol out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Symbol symbol_sum(const Symbol& a, const Symbol& b, cplx cb) {
  if (a.size() != b.size()) throw InvalidInput("symbol size mismatch");
  Symbol out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + cb * b[i];
  return out;
}

CMat apply_symbol(const Symbol& s, int in, int out, const Shape& shape, const CMat& field) {
  const std::int64_t cells = shape.cells();
  if (field.rows() != in * cells) throw InvalidInput("field does not match symbol");
  CMat hat = field;
  spectral::fft(hat, shape, false);
  CMat res = CMat::Zero(out * cells, field.cols());
  for (std::int64_t b = 0; b < cells; ++b) {
    const CMat& m = s[static_cast<std::size_t>(b)];
    for (int k = 0; k < out; ++k)
      for (int l = 0; l < in; ++l) {
        const cplx a = m(k, l);
        if (a == 0.0) continue;
        res.row(k * cells + b) += a * hat.row(l * cells + b);
      }
  }
  spectral::fft(res, shape, true);
  return res;
}

}  // namespace radmaxlab::ops
