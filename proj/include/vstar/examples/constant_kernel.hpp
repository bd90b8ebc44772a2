#pragma once

#include <cmath>

#include "vstar/separable.hpp"

namespace vstar {

// Closed forms for the two-constant sum kernel K = aTheta + bTheta.
// The quotient forms are singular at a = b; inputs near coincidence are
// routed to the analytic limits instead.

namespace detail {
inline bool near_coincident(double a, double b) {
  return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a) + std::abs(b));
}
} // namespace detail

/// Smooth part of the full resolvent: (a+b) e^{(a+b) dt}.
inline double constant_exact(double a, double b, double dt) {
  return (a + b) * std::exp((a + b) * dt);
}

/// Smooth part of the order-0 approximant R_b * R_a:
/// (a^2 e^{a dt} - b^2 e^{b dt}) / (a - b);  limit a->b: (2a + a^2 dt) e^{a dt}.
inline double constant_f0(double a, double b, double dt) {
  if (detail::near_coincident(a, b)) {
    double m = 0.5 * (a + b);
    return (2.0 * m + m * m * dt) * std::exp(m * dt);
  }
  return (a * a * std::exp(a * dt) - b * b * std::exp(b * dt)) / (a - b);
}

/// Smooth part of T = 1_* - R_b*R_a*(1_* - K):
/// ab (e^{a dt} - e^{b dt}) / (a - b);  limit a->b: a^2 dt e^{a dt}.
inline double constant_T(double a, double b, double dt) {
  if (detail::near_coincident(a, b)) {
    double m = 0.5 * (a + b);
    return m * m * dt * std::exp(m * dt);
  }
  return a * b * (std::exp(a * dt) - std::exp(b * dt)) / (a - b);
}

/// Smooth part of the order-1 approximant f^(0) + T * (f^(0) + 1_*),
/// in the printed two-variable (t', t) form.
inline double constant_f1_order(double a, double b, double tp, double t) {
  const double dt = tp - t;
  const double d = a - b;
  // The quotient form below divides by (a-b)^3, so cancellation costs about
  // three times the digits lost in the other quotients.  Switch to a
  // first-order expansion in d = a - b well before that becomes visible;
  // the expansion error is O(d^2), ~1e-6 relative at the boundary.
  if (std::abs(d) <= 1e-3 * (1.0 + std::abs(a) + std::abs(b))) {
    const double x = a * dt;
    const double e = std::exp(x);
    const double l0 = e * a * (2.0 + 2.0 * x + x * x + x * x * x / 6.0);
    const double c1 = -e * (x * x * x * x / 12.0 + 5.0 * x * x * x / 6.0 +
                            2.5 * x * x + 3.0 * x + 1.0);
    return l0 + d * c1;
  }
  return (a + b) / d * (a * std::exp(a * dt) - b * std::exp(b * dt)) +
         a * b / (d * d * d) * std::exp(-(a + b) * t) *
             (std::exp(a * t + b * tp) *
                  (a * a + a * b * b * dt - b * b * b * dt + b * b) -
              std::exp(a * tp + b * t) *
                  (-a * a * d * dt + a * a + b * b));
}

/// The constant kernel c*Theta as a separable component.
template <class S>
SeparableComponent<S> constant_component(const Grid& grid, S c) {
  return SeparableComponent<S>::from_functions(
      grid, [c](double) { return c; }, [](double) { return S(1); });
}

} // namespace vstar
