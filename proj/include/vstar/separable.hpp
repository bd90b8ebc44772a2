#pragma once

#include <cmath>
#include <utility>

#include "vstar/star_core.hpp"

namespace vstar {

/// A separable kernel component K(t',t) = a(t') b(t) Theta(t'-t), together
/// with the cumulative integral alpha(t) = int_{t_min}^t a(u) b(u) du used by
/// the closed-form resolvent. Only differences alpha(t') - alpha(t) matter, so
/// the lower limit is immaterial.
template <class S>
class SeparableComponent {
public:
  SeparableComponent(const Grid& grid, OneVariableFunction<S> a,
                     OneVariableFunction<S> b)
      : grid_(grid), a_(std::move(a)), b_(std::move(b)) {
    if (a_.size() != grid.size() || b_.size() != grid.size())
      throw std::invalid_argument("SeparableComponent: sample length mismatch");
    alpha_.resize(grid.size());
    alpha_(0) = S(0);
    const double h = grid.step();
    for (int k = 1; k < grid.size(); ++k)
      alpha_(k) = alpha_(k - 1) +
                  S(h / 2) * (a_(k - 1) * b_(k - 1) + a_(k) * b_(k));
  }

  template <class FA, class FB>
  static SeparableComponent from_functions(const Grid& grid, FA&& fa, FB&& fb) {
    OneVariableFunction<S> a(grid.size()), b(grid.size());
    for (int k = 0; k < grid.size(); ++k) {
      a(k) = static_cast<S>(fa(grid.node(k)));
      b(k) = static_cast<S>(fb(grid.node(k)));
    }
    return SeparableComponent(grid, std::move(a), std::move(b));
  }

  const Grid& grid() const { return grid_; }
  const OneVariableFunction<S>& a() const { return a_; }
  const OneVariableFunction<S>& b() const { return b_; }
  const OneVariableFunction<S>& alpha() const { return alpha_; }

  bool is_zero() const { return a_.isZero(0.0) || b_.isZero(0.0); }

private:
  Grid grid_;
  OneVariableFunction<S> a_, b_, alpha_;
};

/// The kernel a(t') b(t) Theta(t'-t) itself (delta-free).
template <class S>
GeneralizedKernel<S> kernel_of(const SeparableComponent<S>& comp) {
  const Grid& grid = comp.grid();
  GeneralizedKernel<S> out(grid, S(0));
  auto& m = out.smooth().matrix();
  for (int j = 0; j < grid.size(); ++j)
    for (int i = j; i < grid.size(); ++i) m(i, j) = comp.a()(i) * comp.b()(j);
  return out;
}

/// Closed-form resolvent of a separable kernel:
///   R = delta + a(t') b(t) exp(alpha(t') - alpha(t)) Theta.
template <class S>
GeneralizedKernel<S> resolvent_separable(const SeparableComponent<S>& comp) {
  const Grid& grid = comp.grid();
  GeneralizedKernel<S> out(grid, S(1));
  if (comp.is_zero()) return out; // zero kernel: R = 1_*
  auto& m = out.smooth().matrix();
  for (int j = 0; j < grid.size(); ++j)
    for (int i = j; i < grid.size(); ++i)
      m(i, j) =
          comp.a()(i) * comp.b()(j) * std::exp(comp.alpha()(i) - comp.alpha()(j));
  return out;
}

/// delta*1_* + u(t') v(t) Theta with rank-1 smooth part. Products against
/// such kernels reduce to cumulative sums, O(n^2) instead of O(n^3).
template <class S>
struct Rank1Kernel {
  Grid grid;
  S delta = S(0);
  OneVariableFunction<S> u, v;
};

template <class S>
Rank1Kernel<S> rank1_of(const SeparableComponent<S>& comp) {
  return Rank1Kernel<S>{comp.grid(), S(0), comp.a(), comp.b()};
}

/// The closed-form resolvent in rank-1 form:
/// 1_* + [a e^{alpha}](t') [b e^{-alpha}](t) Theta.
template <class S>
Rank1Kernel<S> resolvent_rank1(const SeparableComponent<S>& comp) {
  const int n = comp.grid().size();
  Rank1Kernel<S> out{comp.grid(), S(1), OneVariableFunction<S>(n),
                     OneVariableFunction<S>(n)};
  if (comp.is_zero()) {
    out.u.setZero();
    out.v.setZero();
    return out;
  }
  for (int k = 0; k < n; ++k) {
    out.u(k) = comp.a()(k) * std::exp(comp.alpha()(k));
    out.v(k) = comp.b()(k) * std::exp(-comp.alpha()(k));
  }
  return out;
}

template <class S>
GeneralizedKernel<S> materialize(const Rank1Kernel<S>& r) {
  GeneralizedKernel<S> out(r.grid, r.delta);
  auto& m = out.smooth().matrix();
  for (int j = 0; j < r.grid.size(); ++j)
    for (int i = j; i < r.grid.size(); ++i) m(i, j) = r.u(i) * r.v(j);
  return out;
}

/// f * g with rank-1 f. Same trapezoid discretization as star_product:
/// the inner sum collapses to column-wise cumulative sums.
template <class S>
GeneralizedKernel<S> star_product(const Rank1Kernel<S>& f,
                                  const GeneralizedKernel<S>& g) {
  detail::require_same_grid(f.grid, g.grid(), "star_product(rank1,.)");
  const Grid& grid = f.grid;
  const int n = grid.size();
  const double h = grid.step();
  const Matrix<S>& G = g.smooth().matrix();
  const S cf = f.delta, cg = g.delta_coeff();

  GeneralizedKernel<S> out(grid, cf * cg);
  Matrix<S>& R = out.smooth().matrix();
  for (int j = 0; j < n; ++j) {
    S c = S(0); // sum_{k=j}^{i} v(k) G(k,j)
    for (int i = j; i < n; ++i) {
      c += f.v(i) * G(i, j);
      // On the diagonal the quadrature spans a zero-length interval and
      // cancels analytically; pin it so fused multiply-adds cannot leave
      // sub-ulp residue.
      S quad = (i == j) ? S(0)
                        : S(h) * f.u(i) * c -
                              S(h / 2) * (f.u(i) * f.v(j) * G(j, j) +
                                          f.u(i) * f.v(i) * G(i, j));
      R(i, j) = quad + cf * G(i, j) + cg * f.u(i) * f.v(j);
    }
  }
  return out;
}

/// f * g with rank-1 g; the inner sum collapses to row-wise cumulative sums.
template <class S>
GeneralizedKernel<S> star_product(const GeneralizedKernel<S>& f,
                                  const Rank1Kernel<S>& g) {
  detail::require_same_grid(f.grid(), g.grid, "star_product(.,rank1)");
  const Grid& grid = g.grid;
  const int n = grid.size();
  const double h = grid.step();
  const Matrix<S>& F = f.smooth().matrix();
  const S cf = f.delta_coeff(), cg = g.delta;

  GeneralizedKernel<S> out(grid, cf * cg);
  Matrix<S>& R = out.smooth().matrix();
  for (int i = 0; i < n; ++i) {
    S e = S(0); // sum_{k=j}^{i} F(i,k) u(k)
    for (int j = i; j >= 0; --j) {
      e += F(i, j) * g.u(j);
      // Same zero-length-interval pin as the rank-1 left product above.
      S quad = (i == j) ? S(0)
                        : S(h) * e * g.v(j) -
                              S(h / 2) * (F(i, j) * g.u(j) * g.v(j) +
                                          F(i, i) * g.u(i) * g.v(j));
      R(i, j) = quad + cf * g.u(i) * g.v(j) + cg * F(i, j);
    }
  }
  return out;
}

} // namespace vstar
