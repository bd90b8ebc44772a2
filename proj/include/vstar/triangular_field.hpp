#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <type_traits>

#include "vstar/grid.hpp"

namespace vstar {

template <class S>
inline constexpr bool is_complex_v = false;
template <class R>
inline constexpr bool is_complex_v<std::complex<R>> = true;

template <class S>
using real_of = decltype(std::abs(std::declval<S>()));

template <class S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

/// Samples of a scalar function of one time variable at the grid nodes.
template <class S>
using OneVariableFunction = Vector<S>;

inline bool finite_entry(double x) { return std::isfinite(x); }
inline bool finite_entry(const std::complex<double>& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Lower-triangular samples k(t_i, t_j), i >= j, of a two-variable function
/// supported on t' >= t. Entries above the diagonal are kept exactly zero.
template <class S>
class TriangularField {
public:
  explicit TriangularField(const Grid& grid)
      : grid_(grid), values_(Matrix<S>::Zero(grid.size(), grid.size())) {}

  TriangularField(const Grid& grid, Matrix<S> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.rows() != grid.size() || values_.cols() != grid.size())
      throw std::invalid_argument("TriangularField: matrix size mismatch");
  }

  const Grid& grid() const { return grid_; }

  S operator()(int i, int j) const {
    if (i < j)
      throw std::out_of_range("TriangularField: requested (i,j) with i < j");
    return values_(i, j);
  }

  void set(int i, int j, S v) {
    if (i < j)
      throw std::out_of_range("TriangularField: set (i,j) with i < j");
    values_(i, j) = v;
  }

  const Matrix<S>& matrix() const { return values_; }
  Matrix<S>& matrix() { return values_; }

  double max_abs() const { return values_.cwiseAbs().maxCoeff(); }
  bool is_zero() const { return values_.isZero(0.0); }

  bool all_finite() const {
    for (int j = 0; j < values_.cols(); ++j)
      for (int i = j; i < values_.rows(); ++i)
        if (!finite_entry(values_(i, j))) return false;
    return true;
  }

private:
  Grid grid_;
  Matrix<S> values_;
};

} // namespace vstar
