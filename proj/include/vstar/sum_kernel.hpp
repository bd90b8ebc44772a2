#pragma once

#include <stdexcept>
#include <variant>
#include <vector>

#include "vstar/separable.hpp"

namespace vstar {

/// One summand of a sum kernel: either a separable component with a
/// closed-form resolvent, or a generic delta-free numeric kernel.
template <class S>
using SumComponent = std::variant<SeparableComponent<S>, GeneralizedKernel<S>>;

/// K = sum_i K_i with every component living on one shared grid.
template <class S>
class SumKernel {
public:
  explicit SumKernel(const Grid& grid) : grid_(grid) {}

  const Grid& grid() const { return grid_; }
  int size() const { return static_cast<int>(components_.size()); }
  const SumComponent<S>& component(int i) const { return components_.at(i); }

  void add_separable(SeparableComponent<S> comp) {
    if (!(comp.grid() == grid_))
      throw std::invalid_argument("SumKernel: component grid mismatch");
    components_.push_back(std::move(comp));
  }

  void add_numeric(GeneralizedKernel<S> k) {
    if (!(k.grid() == grid_))
      throw std::invalid_argument("SumKernel: component grid mismatch");
    if (k.delta_coeff() != S(0))
      throw std::invalid_argument(
          "SumKernel: numeric components must be delta-free");
    components_.push_back(std::move(k));
  }

  GeneralizedKernel<S> component_kernel(int i) const {
    const auto& c = components_.at(i);
    if (const auto* sep = std::get_if<SeparableComponent<S>>(&c))
      return kernel_of(*sep);
    return std::get<GeneralizedKernel<S>>(c);
  }

  /// The materialized total kernel sum_i K_i (delta-free).
  GeneralizedKernel<S> total() const {
    if (components_.empty())
      throw std::logic_error("SumKernel: no components");
    GeneralizedKernel<S> out = component_kernel(0);
    for (int i = 1; i < size(); ++i) out += component_kernel(i);
    return out;
  }

private:
  Grid grid_;
  std::vector<SumComponent<S>> components_;
};

} // namespace vstar
