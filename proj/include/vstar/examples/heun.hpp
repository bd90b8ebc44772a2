#pragma once

#include <complex>

#include "vstar/resolvent.hpp"

namespace vstar {

using cplx = std::complex<double>;

/// Driven two-level system
///   2i w a'(t) = nu b(t) + f(t) a(t),   f(t) = f1 sin(w t),
///   2i w b'(t) = nu a(t) - f(t) b(t),
/// recast as a Volterra equation of the second kind for a'(.) with a sum
/// kernel K = K1 + K2:
///   K1 separable with a1(t') = lam f(t'), b1 = 1,   lam = -i/(2w),
///   K2 = lam^2 nu^2 * (1 * F * 1),  F = (1_* - (-lam) f Theta)^{*-1}.
struct HeunProblem {
  double f1 = 0.5;
  double nu = 0.5;
  double omega = 1.0;
  Grid grid{0.0, 2 * 3.14159265358979323846, 1601};

  HeunProblem() = default;
  HeunProblem(double f1_, double nu_, double omega_, const Grid& g)
      : f1(f1_), nu(nu_), omega(omega_), grid(g) {
    if (omega == 0.0)
      throw std::invalid_argument("HeunProblem: omega must be nonzero");
  }

  cplx lambda() const { return cplx(0.0, -1.0 / (2.0 * omega)); }
  double f(double t) const { return f1 * std::sin(omega * t); }
};

/// Separable generator of F: kernel (i/(2w)) f(t') Theta, i.e. -lam f.
inline SeparableComponent<cplx> heun_F_component(const HeunProblem& p) {
  const cplx mu = -p.lambda();
  return SeparableComponent<cplx>::from_functions(
      p.grid, [&p, mu](double tp) { return mu * p.f(tp); },
      [](double) { return cplx(1.0); });
}

/// F in closed form:
///   F = delta + (i/(2w)) f1 sin(w t') e^{-i f1 (cos w t' - cos w t)/(2w^2)} Theta.
/// Identical (to rounding) to resolvent_separable(heun_F_component(p)).
inline GeneralizedKernel<cplx> heun_build_F(const HeunProblem& p) {
  const double w = p.omega, f1 = p.f1;
  return make_kernel<cplx>(
      p.grid, cplx(1.0), [w, f1](double tp, double t) {
        const cplx pref = cplx(0.0, f1 / (2.0 * w)) * std::sin(w * tp);
        const cplx arg =
            cplx(0.0, -f1 / (2.0 * w * w)) * (std::cos(w * tp) - std::cos(w * t));
        return pref * std::exp(arg);
      });
}

/// The Volterra sum kernel for a'. When literal_split is set, K2 is replaced
/// by the two separable components lam^2 nu^2 (s(t') - s(t)) with
/// s(x) := (1*F*1)(x, t_min) — a one-variable surrogate whose accuracy is
/// measured by split_discrepancy below.
inline SumKernel<cplx> heun_build_kernel(const HeunProblem& p,
                                         bool literal_split = false) {
  SumKernel<cplx> sk(p.grid);
  const cplx lam = p.lambda();
  sk.add_separable(SeparableComponent<cplx>::from_functions(
      p.grid, [&p, lam](double tp) { return lam * p.f(tp); },
      [](double) { return cplx(1.0); }));
  if (p.nu == 0.0) return sk;

  const cplx c2 = lam * lam * p.nu * p.nu; // = -nu^2/(4 w^2)
  GeneralizedKernel<cplx> R = sandwich_ones(heun_build_F(p));
  if (!literal_split) {
    sk.add_numeric(c2 * R);
    return sk;
  }
  // s sampled on the grid, then used as node-lookup functions
  const int n = p.grid.size();
  Vector<cplx> s(n);
  for (int k = 0; k < n; ++k) s(k) = R.smooth()(k, 0);
  const Grid grid = p.grid;
  sk.add_separable(SeparableComponent<cplx>::from_functions(
      grid, [grid, s, c2](double tp) { return c2 * s(grid.node_index(tp)); },
      [](double) { return cplx(1.0); }));
  sk.add_separable(SeparableComponent<cplx>::from_functions(
      grid, [c2](double) { return -c2; },
      [grid, s](double t) { return s(grid.node_index(t)); }));
  return sk;
}

/// Same sum kernel as heun_build_kernel, with the sandwich K2 decomposed
/// exactly into three separable pieces. F's smooth part is rank one,
/// F~(t',t) = U(t') V(t), so with the cumulative trapezoid integrals
/// IU = int U, IV = int V, W = int U*IV and the (t'-t) term contributed by
/// F's unit delta,
///   (1 * F * 1)(t',t) = (t'-t) + W(t') - W(t) - IV(t) (IU(t') - IU(t))
///     = [W(t')+t']*1 + IU(t')*[-IV(t)] + 1*[IU(t) IV(t) - W(t) - t].
/// Every component resolvent is then closed-form and the whole re-summed
/// machinery stays O(n^2) per product.
inline SumKernel<cplx> heun_build_kernel_separable(const HeunProblem& p) {
  SumKernel<cplx> sk(p.grid);
  const cplx lam = p.lambda();
  sk.add_separable(SeparableComponent<cplx>::from_functions(
      p.grid, [&p, lam](double tp) { return lam * p.f(tp); },
      [](double) { return cplx(1.0); }));
  if (p.nu == 0.0) return sk;

  const cplx c2 = lam * lam * p.nu * p.nu; // = -nu^2/(4 w^2)
  auto rf = resolvent_rank1(heun_F_component(p));
  const int n = p.grid.size();
  const double h = p.grid.step();
  OneVariableFunction<cplx> iu(n), iv(n), w(n);
  iu(0) = iv(0) = w(0) = cplx(0);
  for (int k = 1; k < n; ++k) {
    iu(k) = iu(k - 1) + cplx(h / 2) * (rf.u(k - 1) + rf.u(k));
    iv(k) = iv(k - 1) + cplx(h / 2) * (rf.v(k - 1) + rf.v(k));
    w(k) = w(k - 1) +
           cplx(h / 2) * (rf.u(k - 1) * iv(k - 1) + rf.u(k) * iv(k));
  }
  OneVariableFunction<cplx> a1(n), b1(n), a2(n), b2(n), a3(n), b3(n);
  for (int k = 0; k < n; ++k) {
    const double t = p.grid.node(k);
    a1(k) = c2 * (w(k) + t);
    b1(k) = cplx(1.0);
    a2(k) = c2 * iu(k);
    b2(k) = -iv(k);
    a3(k) = c2;
    b3(k) = iu(k) * iv(k) - w(k) - t;
  }
  sk.add_separable(
      SeparableComponent<cplx>(p.grid, std::move(a1), std::move(b1)));
  sk.add_separable(
      SeparableComponent<cplx>(p.grid, std::move(a2), std::move(b2)));
  sk.add_separable(
      SeparableComponent<cplx>(p.grid, std::move(a3), std::move(b3)));
  return sk;
}

/// sup |R(t',t) - (s(t') - s(t))| with s(x) = R(x, t_min): how far the
/// literal one-variable split is from the true two-variable kernel part.
inline double split_discrepancy(const HeunProblem& p) {
  GeneralizedKernel<cplx> R = sandwich_ones(heun_build_F(p));
  const int n = p.grid.size();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      worst = std::max(worst,
                       std::abs(R.smooth()(i, j) -
                                (R.smooth()(i, 0) - R.smooth()(j, 0))));
  return worst;
}

struct HeunSolveOutput {
  Vector<cplx> a; // a(t) at grid nodes, a(t_min) = 1
  SolveReport report;
};

/// Solves a' = 1_* + K * a' by the re-summed series and integrates from the
/// left edge: a(t) = int_{t_min}^t a'(tau, t_min) dtau with a(t_min) = 1.
/// The default path uses the all-separable kernel form and the column solve,
/// so the whole run is O(n^2); literal_split keeps the (inexact) one-variable
/// split kernel for the discrepancy studies.
inline HeunSolveOutput heun_volterra_solve(const HeunProblem& p, int n_orders,
                                           const SeriesOptions& opts = {},
                                           bool literal_split = false) {
  SumKernel<cplx> sk = literal_split ? heun_build_kernel(p, true)
                                     : heun_build_kernel_separable(p);
  auto g = GeneralizedKernel<cplx>::identity(p.grid);
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  auto ctx = make_resummed_context(sk, opts);
  const double res_s =
      std::chrono::duration<double>(clock::now() - t0).count();
  auto res = solve_resummed_column(ctx, g, n_orders, opts);
  res.report.resolvents_seconds = res_s;

  // a(t) = delta + cumulative trapezoid of the a'(., t_min) samples
  const int n = p.grid.size();
  const double h = p.grid.step();
  Vector<cplx> a(n);
  cplx run = res.f.delta;
  a(0) = run;
  for (int k = 1; k < n; ++k) {
    run += cplx(h / 2) * (res.f.col(k - 1) + res.f.col(k));
    a(k) = run;
  }
  return HeunSolveOutput{std::move(a), std::move(res.report)};
}

/// Classic RK4 on the 2x2 system, sampled at the grid nodes; `substeps`
/// integration steps per grid interval.
inline std::pair<Vector<cplx>, Vector<cplx>> heun_ode_oracle(
    const HeunProblem& p, cplx a0 = cplx(1.0), cplx b0 = cplx(0.0),
    int substeps = 8) {
  if (substeps < 1)
    throw std::invalid_argument("heun_ode_oracle: substeps must be >= 1");
  const int n = p.grid.size();
  Vector<cplx> a(n), b(n);
  const cplx lam = p.lambda();
  auto rhs = [&](double t, cplx av, cplx bv) {
    const double ft = p.f(t);
    return std::pair<cplx, cplx>{lam * (p.nu * bv + ft * av),
                                 lam * (p.nu * av - ft * bv)};
  };
  cplx av = a0, bv = b0;
  a(0) = av;
  b(0) = bv;
  const double hs = p.grid.step() / substeps;
  for (int k = 1; k < n; ++k) {
    double t = p.grid.node(k - 1);
    for (int s = 0; s < substeps; ++s) {
      auto [k1a, k1b] = rhs(t, av, bv);
      auto [k2a, k2b] = rhs(t + hs / 2, av + hs / 2 * k1a, bv + hs / 2 * k1b);
      auto [k3a, k3b] = rhs(t + hs / 2, av + hs / 2 * k2a, bv + hs / 2 * k2b);
      auto [k4a, k4b] = rhs(t + hs, av + hs * k3a, bv + hs * k3b);
      av += hs / 6 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
      bv += hs / 6 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
      t += hs;
    }
    a(k) = av;
    b(k) = bv;
  }
  return {std::move(a), std::move(b)};
}

} // namespace vstar
