#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "vstar/triangular_field.hpp"

namespace vstar {

/// A generalized kernel c*delta(t'-t) + k(t',t)*Theta(t'-t), with constant
/// delta coefficient c and lower-triangular ordinary part k. Theta(0) = 1.
template <class S>
class GeneralizedKernel {
public:
  explicit GeneralizedKernel(const Grid& grid, S delta_coeff = S(0))
      : delta_(delta_coeff), smooth_(grid) {}

  GeneralizedKernel(S delta_coeff, TriangularField<S> smooth)
      : delta_(delta_coeff), smooth_(std::move(smooth)) {}

  const Grid& grid() const { return smooth_.grid(); }
  S delta_coeff() const { return delta_; }
  void set_delta_coeff(S c) { delta_ = c; }

  const TriangularField<S>& smooth() const { return smooth_; }
  TriangularField<S>& smooth() { return smooth_; }

  /// The *-product identity 1_* = delta(t'-t).
  static GeneralizedKernel identity(const Grid& grid) {
    return GeneralizedKernel(grid, S(1));
  }

  bool is_identity() const { return delta_ == S(1) && smooth_.is_zero(); }

private:
  S delta_;
  TriangularField<S> smooth_;
};

namespace detail {
inline void require_same_grid(const Grid& a, const Grid& b, const char* op) {
  if (!(a == b))
    throw std::invalid_argument(std::string(op) +
                                ": operands live on different grids");
}
} // namespace detail

/// Sample a two-variable callable k(t', t) at all node pairs i >= j.
template <class S, class F>
GeneralizedKernel<S> make_kernel(const Grid& grid, S delta_coeff, F&& k) {
  GeneralizedKernel<S> out(grid, delta_coeff);
  auto& m = out.smooth().matrix();
  const int n = grid.size();
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      S v;
      try {
        v = static_cast<S>(k(grid.node(i), grid.node(j)));
      } catch (const std::exception& e) {
        std::ostringstream msg;
        msg << "make_kernel: evaluation failed at (t'=" << grid.node(i)
            << ", t=" << grid.node(j) << "): " << e.what();
        throw std::domain_error(msg.str());
      }
      if (!finite_entry(v)) {
        std::ostringstream msg;
        msg << "make_kernel: non-finite value at (t'=" << grid.node(i)
            << ", t=" << grid.node(j) << ")";
        throw std::domain_error(msg.str());
      }
      m(i, j) = v;
    }
  }
  return out;
}

/// Theta(t'-t), i.e. the constant kernel with ordinary part 1.
template <class S>
GeneralizedKernel<S> theta_kernel(const Grid& grid, S scale = S(1)) {
  return make_kernel<S>(grid, S(0), [scale](double, double) { return scale; });
}

/// m(t') lifted to a two-variable kernel constant in the right variable.
/// The result carries Theta support; with Theta-supported partners the
/// triangular truncation of the lifted product is exact.
template <class S>
GeneralizedKernel<S> lift_left(const Grid& grid,
                               const OneVariableFunction<S>& m) {
  if (m.size() != grid.size())
    throw std::invalid_argument("lift_left: sample length != grid size");
  GeneralizedKernel<S> out(grid, S(0));
  auto& mat = out.smooth().matrix();
  for (int j = 0; j < grid.size(); ++j)
    for (int i = j; i < grid.size(); ++i) mat(i, j) = m(i);
  return out;
}

/// m(t) lifted to a two-variable kernel constant in the left variable.
template <class S>
GeneralizedKernel<S> lift_right(const Grid& grid,
                                const OneVariableFunction<S>& m) {
  if (m.size() != grid.size())
    throw std::invalid_argument("lift_right: sample length != grid size");
  GeneralizedKernel<S> out(grid, S(0));
  auto& mat = out.smooth().matrix();
  for (int j = 0; j < grid.size(); ++j)
    for (int i = j; i < grid.size(); ++i) mat(i, j) = m(j);
  return out;
}

/// Convolution-like *-product specialized to constant delta coefficients:
///   (f*g) = c_f c_g delta + [c_f g + c_g f + int_t^t' f(t',u) g(u,t) du] Theta.
/// The inner integral uses the grid's trapezoid rule over nodes j..i;
/// it vanishes exactly on the diagonal.
template <class S>
GeneralizedKernel<S> star_product(const GeneralizedKernel<S>& f,
                                  const GeneralizedKernel<S>& g) {
  detail::require_same_grid(f.grid(), g.grid(), "star_product");
  const Grid& grid = f.grid();
  const Matrix<S>& F = f.smooth().matrix();
  const Matrix<S>& G = g.smooth().matrix();
  const S cf = f.delta_coeff();
  const S cg = g.delta_coeff();

  GeneralizedKernel<S> out(grid, cf * cg);
  Matrix<S>& R = out.smooth().matrix();

  // A vanishing smooth part on either side makes the quadrature term exactly
  // zero; the identity law 1_* f = f 1_* = f then holds bit-for-bit.
  if (f.smooth().is_zero()) {
    if (cf == S(1))
      R = G;
    else
      R = cf * G;
    return out;
  }
  if (g.smooth().is_zero()) {
    if (cg == S(1))
      R = F;
    else
      R = cg * F;
    return out;
  }

  const double h = grid.step();
  Vector<S> fd = F.diagonal();
  Vector<S> gd = G.diagonal();

  R.noalias() = F.template triangularView<Eigen::Lower>() * G;
  R *= S(h);
  // Endpoint trapezoid correction: half weight at u = t_j and u = t_i.
  R.array() -= S(h / 2) * (F.array().rowwise() * gd.transpose().array() +
                           G.array().colwise() * fd.array());
  // The quadrature covers a zero-length interval on the diagonal; the two
  // expressions above cancel there analytically, but fused multiply-adds can
  // leave sub-ulp residue, so pin it.
  R.diagonal().setZero();
  if (cf != S(0)) R.noalias() += cf * G;
  if (cg != S(0)) R.noalias() += cg * F;
  return out;
}

/// n-fold *-power; n = 0 gives the identity 1_*.
template <class S>
GeneralizedKernel<S> star_power(const GeneralizedKernel<S>& f, int n) {
  if (n < 0) throw std::invalid_argument("star_power: negative exponent");
  if (n == 0) return GeneralizedKernel<S>::identity(f.grid());
  GeneralizedKernel<S> out = f;
  for (int k = 1; k < n; ++k) out = star_product(f, out);
  return out;
}

/// Sup-norm of the ordinary (Theta-supported) part over the triangle i >= j.
/// The delta coefficient is excluded.
template <class S>
double sup_norm(const GeneralizedKernel<S>& f) {
  return f.smooth().max_abs();
}

/// 1 * F * 1 evaluated by nested trapezoid quadrature:
///   R(t',t) = int_t^t' [ c_F + int_u^t' F(v,u) dv ] du,  delta part 0.
template <class S>
GeneralizedKernel<S> sandwich_ones(const GeneralizedKernel<S>& F) {
  const Grid& grid = F.grid();
  const int n = grid.size();
  const double h = grid.step();
  const Matrix<S>& M = F.smooth().matrix();
  const S cF = F.delta_coeff();

  // inner(i,k) = c_F + int_{t_k}^{t_i} F(v, t_k) dv, cumulative down column k.
  Matrix<S> inner = Matrix<S>::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    inner(k, k) = cF;
    for (int i = k + 1; i < n; ++i)
      inner(i, k) = inner(i - 1, k) + S(h / 2) * (M(i - 1, k) + M(i, k));
  }

  GeneralizedKernel<S> out(grid, S(0));
  Matrix<S>& R = out.smooth().matrix();
  // Outer integral over u = t_k, k in j..i, backward cumulative per row.
  for (int i = 0; i < n; ++i) {
    for (int j = i - 1; j >= 0; --j)
      R(i, j) = R(i, j + 1) + S(h / 2) * (inner(i, j) + inner(i, j + 1));
  }
  return out;
}

/// t |-> c_f + int_{t_from}^{t} f(u, t_from) du along the left edge; the delta
/// part contributes its coefficient once (Theta(0) = 1). Nodes before t_from
/// carry the value at t_from.
template <class S>
OneVariableFunction<S> integrate_left_edge(const GeneralizedKernel<S>& f,
                                           int from_node) {
  const Grid& grid = f.grid();
  const int n = grid.size();
  if (from_node < 0 || from_node >= n)
    throw std::invalid_argument("integrate_left_edge: node outside grid");
  const double h = grid.step();
  const Matrix<S>& m = f.smooth().matrix();
  OneVariableFunction<S> out(n);
  for (int k = 0; k <= from_node; ++k) out(k) = f.delta_coeff();
  for (int k = from_node + 1; k < n; ++k)
    out(k) = out(k - 1) + S(h / 2) * (m(k - 1, from_node) + m(k, from_node));
  return out;
}

// Pointwise linear combinations; the *-product distributes over these exactly.
template <class S>
GeneralizedKernel<S> operator+(const GeneralizedKernel<S>& a,
                               const GeneralizedKernel<S>& b) {
  detail::require_same_grid(a.grid(), b.grid(), "operator+");
  GeneralizedKernel<S> out(a.grid(), a.delta_coeff() + b.delta_coeff());
  out.smooth().matrix() = a.smooth().matrix() + b.smooth().matrix();
  return out;
}

template <class S>
GeneralizedKernel<S> operator-(const GeneralizedKernel<S>& a,
                               const GeneralizedKernel<S>& b) {
  detail::require_same_grid(a.grid(), b.grid(), "operator-");
  GeneralizedKernel<S> out(a.grid(), a.delta_coeff() - b.delta_coeff());
  out.smooth().matrix() = a.smooth().matrix() - b.smooth().matrix();
  return out;
}

template <class S>
GeneralizedKernel<S> operator*(S c, const GeneralizedKernel<S>& a) {
  GeneralizedKernel<S> out(a.grid(), c * a.delta_coeff());
  out.smooth().matrix() = c * a.smooth().matrix();
  return out;
}

template <class S>
GeneralizedKernel<S>& operator+=(GeneralizedKernel<S>& a,
                                 const GeneralizedKernel<S>& b) {
  detail::require_same_grid(a.grid(), b.grid(), "operator+=");
  a.set_delta_coeff(a.delta_coeff() + b.delta_coeff());
  a.smooth().matrix() += b.smooth().matrix();
  return a;
}

} // namespace vstar
