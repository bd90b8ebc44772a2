#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace vstar {

/// Uniform discretization of an interval [t_min, t_max].
/// Node k sits at t_min + k*h with h = (t_max - t_min)/(n_points - 1).
/// Integrals between nodes use composite trapezoid weights h*(1/2, 1, ..., 1, 1/2).
class Grid {
public:
  Grid(double t_min, double t_max, int n_points)
      : t_min_(t_min), t_max_(t_max), n_(n_points) {
    if (n_points < 2)
      throw std::invalid_argument("Grid: n_points must be >= 2, got " +
                                  std::to_string(n_points));
    if (!(t_max > t_min))
      throw std::invalid_argument("Grid: t_max must exceed t_min");
    h_ = (t_max - t_min) / static_cast<double>(n_points - 1);
  }

  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  int size() const { return n_; }
  double step() const { return h_; }
  double length() const { return t_max_ - t_min_; }
  double node(int k) const { return t_min_ + h_ * static_cast<double>(k); }

  /// Nearest node index for a coordinate; throws if t is not (close to) a node.
  int node_index(double t) const {
    double x = (t - t_min_) / h_;
    int k = static_cast<int>(std::lround(x));
    if (k < 0 || k >= n_ || std::abs(x - k) > 1e-9)
      throw std::invalid_argument("Grid: " + std::to_string(t) +
                                  " is not a grid node");
    return k;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  double t_min_;
  double t_max_;
  int n_;
  double h_;
};

} // namespace vstar
