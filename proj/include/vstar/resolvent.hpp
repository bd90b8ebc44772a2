#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "vstar/sum_kernel.hpp"

namespace vstar {

struct SeriesOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  bool defect_per_order = false; // one extra *-product per order when on
  int store_partials_up_to = -1; // keep f^(k) for k <= this (enables exact
                                 // per-order remainders in the report)
};

template <class S>
struct NeumannResult {
  GeneralizedKernel<S> resolvent;
  int terms_used = 0;            // highest power included
  bool converged = false;
  double last_term_norm = 0.0;
};

/// Partial Neumann series sum_{k=0}^{m} K^{*k} for a delta-free kernel.
/// Stops at the first k whose term sup-norm falls to tol, or at n_terms - 1.
/// Non-convergence is flagged, never silent: the partial sum is returned.
template <class S>
NeumannResult<S> resolvent_neumann(const GeneralizedKernel<S>& K, int n_terms,
                                   double tol) {
  if (n_terms < 1)
    throw std::invalid_argument("resolvent_neumann: n_terms must be >= 1");
  if (K.delta_coeff() != S(0))
    throw std::invalid_argument(
        "resolvent_neumann: kernel must be delta-free");
  NeumannResult<S> res{GeneralizedKernel<S>::identity(K.grid())};
  GeneralizedKernel<S> term = GeneralizedKernel<S>::identity(K.grid());
  for (int k = 1; k < n_terms; ++k) {
    term = star_product(K, term);
    res.resolvent += term;
    res.terms_used = k;
    res.last_term_norm = sup_norm(term);
    if (res.last_term_norm <= tol) {
      res.converged = true;
      break;
    }
  }
  if (n_terms == 1) res.converged = (sup_norm(K) <= tol);
  return res;
}

/// Quadrature-floor tolerance for running a Neumann series "to floor" on a
/// given grid: O(h^2) scaled by the kernel magnitude, with a hard floor.
template <class S>
double quadrature_floor(const GeneralizedKernel<S>& K, double abs_tol) {
  double h = K.grid().step();
  return std::max(abs_tol, 0.1 * h * h * sup_norm(K));
}

template <class S>
struct ComponentResolvent {
  GeneralizedKernel<S> resolvent;
  bool closed_form = false; // separable route vs Neumann route
  int neumann_terms = 0;
  bool converged = true;
  double c_k = 0.0; // sup-norm of the component kernel
  std::optional<Rank1Kernel<S>> rank1; // set on the separable route
};

/// Resolvent of one sum-kernel component. Separable components take the
/// closed form (kept in rank-1 form for O(n^2) products); numeric ones run
/// the Neumann series to the quadrature floor.
template <class S>
ComponentResolvent<S> component_resolvent(const SumComponent<S>& comp,
                                          const SeriesOptions& opts = {}) {
  if (const auto* sep = std::get_if<SeparableComponent<S>>(&comp)) {
    auto r1 = resolvent_rank1(*sep);
    ComponentResolvent<S> out{materialize(r1), true};
    out.c_k = sup_norm(kernel_of(*sep));
    out.rank1 = std::move(r1);
    return out;
  }
  const auto& K = std::get<GeneralizedKernel<S>>(comp);
  auto nr = resolvent_neumann(K, 256, quadrature_floor(K, opts.abs_tol));
  return ComponentResolvent<S>{std::move(nr.resolvent), false, nr.terms_used,
                               nr.converged, sup_norm(K)};
}

template <class S>
std::vector<ComponentResolvent<S>> compute_resolvents(
    const SumKernel<S>& sk, const SeriesOptions& opts = {}) {
  std::vector<ComponentResolvent<S>> out;
  out.reserve(sk.size());
  for (int i = 0; i < sk.size(); ++i)
    out.push_back(component_resolvent(sk.component(i), opts));
  return out;
}

namespace detail {
inline std::vector<int> identity_permutation(int d) {
  std::vector<int> p(d);
  std::iota(p.begin(), p.end(), 0);
  return p;
}
} // namespace detail

/// Ordered product over the component resolvents. With the identity
/// permutation this is the descending-index convention R_{K_d} * ... * R_{K_1}.
template <class S>
GeneralizedKernel<S> resolvent_product(
    const std::vector<ComponentResolvent<S>>& rs,
    const std::vector<int>& perm) {
  if (perm.size() != rs.size())
    throw std::invalid_argument("resolvent_product: permutation size mismatch");
  GeneralizedKernel<S> P = rs[perm.back()].resolvent;
  for (int i = static_cast<int>(perm.size()) - 2; i >= 0; --i) {
    const auto& r = rs[perm[i]];
    P = r.rank1 ? star_product(P, *r.rank1) : star_product(P, r.resolvent);
  }
  return P;
}

namespace detail {
// P * K_i, exploiting separable structure when the component has it
template <class S>
GeneralizedKernel<S> star_with_component(const GeneralizedKernel<S>& P,
                                         const SumComponent<S>& comp) {
  if (const auto* sep = std::get_if<SeparableComponent<S>>(&comp))
    return star_product(P, rank1_of(*sep));
  return star_product(P, std::get<GeneralizedKernel<S>>(comp));
}
} // namespace detail

template <class S>
GeneralizedKernel<S> build_T_from_product(const SumKernel<S>& sk,
                                          const GeneralizedKernel<S>& P);

/// T = 1_* - (x)_i R_{K_i} * (1_* - K). Its delta part is analytically zero;
/// the computed coefficient is asserted below floor and clamped to exactly 0
/// so that delta dust cannot contaminate T^{*k}.
/// Distributed evaluation T = 1_* - P + sum_i P*K_i; separable components
/// go through the O(n^2) rank-1 product. The delta part cancels exactly.
template <class S>
GeneralizedKernel<S> build_T_distributed(const SumKernel<S>& sk,
                                         const GeneralizedKernel<S>& P) {
  GeneralizedKernel<S> T = GeneralizedKernel<S>::identity(sk.grid()) - P;
  for (int i = 0; i < sk.size(); ++i)
    T += detail::star_with_component(P, sk.component(i));
  const double dust = std::abs(T.delta_coeff());
  if (dust > 1e-10)
    throw std::logic_error("build_T_distributed: delta part exceeds floor (" +
                           std::to_string(dust) + "); algebra bug");
  T.set_delta_coeff(S(0));
  return T;
}

template <class S>
GeneralizedKernel<S> build_T(const SumKernel<S>& sk,
                             const std::vector<ComponentResolvent<S>>& rs,
                             const std::vector<int>& perm) {
  return build_T_distributed(sk, resolvent_product(rs, perm));
}

template <class S>
GeneralizedKernel<S> build_T(const SumKernel<S>& sk,
                             const SeriesOptions& opts = {}) {
  auto rs = compute_resolvents(sk, opts);
  return build_T(sk, rs, detail::identity_permutation(sk.size()));
}

template <class S>
GeneralizedKernel<S> build_T_from_product(const SumKernel<S>& sk,
                                          const GeneralizedKernel<S>& P) {
  GeneralizedKernel<S> M = GeneralizedKernel<S>::identity(sk.grid());
  M = M - sk.total();
  GeneralizedKernel<S> T =
      GeneralizedKernel<S>::identity(sk.grid()) - star_product(P, M);
  const double dust = std::abs(T.delta_coeff());
  if (dust > 1e-10)
    throw std::logic_error("build_T: delta part of T exceeds floor (" +
                           std::to_string(dust) + "); algebra bug");
  T.set_delta_coeff(S(0));
  return T;
}

/// Alternative form of T (used as a cross-check):
///   T = (x)_i R_{K_i} * sum_{n=2}^{d} (-1)^n sum_{i1<...<in} K_{i1}*...*K_{in}.
template <class S>
GeneralizedKernel<S> build_T_alternative(
    const SumKernel<S>& sk, const std::vector<ComponentResolvent<S>>& rs) {
  const int d = sk.size();
  if (d < 2)
    throw std::invalid_argument("build_T_alternative: needs d >= 2 components");
  GeneralizedKernel<S> P =
      resolvent_product(rs, detail::identity_permutation(d));

  // P distributed over the subset sums: each chain P*K_{i1}*...*K_{in} folds
  // left-to-right so separable factors stay O(n^2)
  GeneralizedKernel<S> acc(sk.grid(), S(0));
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size < 2) continue;
    GeneralizedKernel<S> chain = P;
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i))
        chain = detail::star_with_component(chain, sk.component(i));
    if (size % 2 == 0)
      acc += chain;
    else
      acc += S(-1) * chain;
  }
  return acc;
}

struct OrderEntry {
  int order = 0;
  double term_norm = 0.0; // sup-norm of the order-n series term
  double defect = std::numeric_limits<double>::quiet_NaN();
  double remainder =
      std::numeric_limits<double>::quiet_NaN(); // ||f - f^(n-1)||, if recorded
  double bound = 0.0;                           // C_f (C_T |I|)^n / n!
};

struct ComponentReport {
  bool closed_form = false;
  int neumann_terms = 0;
  bool converged = true;
  double c_k = 0.0;              // sup-norm of the component kernel
  double resolvent_sup = 0.0;    // measured sup ||R - 1_*||
  double lemma_bound = 0.0;      // C_K e^{C_K |I|}
};

struct SolveReport {
  double c_k = 0.0;
  double c_t = 0.0;
  double c_f = 0.0; // estimated from the best available converged solution
  double interval_length = 0.0;
  std::vector<OrderEntry> orders;
  std::vector<ComponentReport> components;
  bool converged = false;
  bool defect_stagnated = false;
  double volterra_defect = 0.0; // ||f - g - K*f|| of the returned solution
  double resolvents_seconds = 0.0;
  double series_seconds = 0.0;
};

/// Precomputed machinery shared by the re-summed solves.
template <class S>
struct ResummedContext {
  std::vector<ComponentResolvent<S>> resolvents;
  GeneralizedKernel<S> P; // ordered product of component resolvents
  GeneralizedKernel<S> T;
  GeneralizedKernel<S> K; // total kernel
};

template <class S>
ResummedContext<S> make_resummed_context(const SumKernel<S>& sk,
                                         const SeriesOptions& opts = {},
                                         std::vector<int> perm = {}) {
  if (perm.empty()) perm = detail::identity_permutation(sk.size());
  auto rs = compute_resolvents(sk, opts);
  GeneralizedKernel<S> P = resolvent_product(rs, perm);
  GeneralizedKernel<S> T = build_T_distributed(sk, P);
  return ResummedContext<S>{std::move(rs), std::move(P), std::move(T),
                            sk.total()};
}

template <class S>
struct SolveResult {
  GeneralizedKernel<S> f;
  SolveReport report;
  std::vector<GeneralizedKernel<S>> partials; // f^(k) for recorded k
};

/// Re-summed series solve of f = g + K*f:
///   f^(n-1) = sum_{k=0}^{n-1} T^{*k} * (x)_i R_{K_i} * g.
/// Stops at n_orders or when the order-term sup-norm falls below
/// max(abs_tol, rel_tol * C_f).
template <class S>
SolveResult<S> solve_resummed(const ResummedContext<S>& ctx,
                              const GeneralizedKernel<S>& g, int n_orders,
                              const SeriesOptions& opts = {}) {
  if (n_orders < 1)
    throw std::invalid_argument("solve_resummed: n_orders must be >= 1");
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();

  SolveResult<S> out{star_product(ctx.P, g)};
  SolveReport& rep = out.report;
  const Grid& grid = g.grid();
  rep.interval_length = grid.length();
  rep.c_k = sup_norm(ctx.K);
  rep.c_t = sup_norm(ctx.T);
  for (const auto& r : ctx.resolvents) {
    ComponentReport cr;
    cr.closed_form = r.closed_form;
    cr.neumann_terms = r.neumann_terms;
    cr.converged = r.converged;
    cr.c_k = r.c_k;
    cr.resolvent_sup = sup_norm(r.resolvent);
    cr.lemma_bound = r.c_k * std::exp(r.c_k * grid.length());
    rep.components.push_back(cr);
  }

  GeneralizedKernel<S> term = out.f; // T^{*0} * base
  auto record = [&](int n, double term_norm) {
    OrderEntry e;
    e.order = n;
    e.term_norm = term_norm;
    if (opts.defect_per_order) {
      GeneralizedKernel<S> defect = out.f - g - star_product(ctx.K, out.f);
      e.defect = std::max(sup_norm(defect), std::abs(defect.delta_coeff()));
    }
    rep.orders.push_back(e);
  };
  auto maybe_store = [&](int n) {
    if (n <= opts.store_partials_up_to) out.partials.push_back(out.f);
  };

  record(0, sup_norm(term));
  maybe_store(0);
  rep.converged = false;
  for (int k = 1; k < n_orders; ++k) {
    term = star_product(ctx.T, term);
    out.f += term;
    const double tn = sup_norm(term);
    record(k, tn);
    maybe_store(k);
    if (tn <= std::max(opts.abs_tol, opts.rel_tol * sup_norm(out.f))) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged && n_orders == 1)
    rep.converged =
        sup_norm(ctx.T) <= std::max(opts.abs_tol, opts.rel_tol * sup_norm(out.f));

  rep.c_f = sup_norm(out.f);
  for (auto& e : rep.orders) {
    // remainder bound C_f (C_T |I|)^n / n! after n series terms
    double b = rep.c_f;
    for (int n = 1; n <= e.order; ++n)
      b *= rep.c_t * rep.interval_length / static_cast<double>(n);
    e.bound = b;
    const int idx = e.order - 1;
    if (idx >= 0 && idx < static_cast<int>(out.partials.size()))
      e.remainder = sup_norm(out.f - out.partials[idx]);
    else if (e.order == 0)
      e.remainder = rep.c_f;
  }

  GeneralizedKernel<S> defect = out.f - g - star_product(ctx.K, out.f);
  rep.volterra_defect =
      std::max(sup_norm(defect), std::abs(defect.delta_coeff()));
  if (opts.defect_per_order && rep.orders.size() >= 2) {
    double prev = rep.orders[rep.orders.size() - 2].defect;
    double last = rep.orders.back().defect;
    rep.defect_stagnated =
        !rep.converged && std::isfinite(prev) && last > 0.5 * prev &&
        last > 100 * opts.abs_tol;
  }
  rep.series_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  return out;
}

/// First-column slice X(., t_min) of a generalized kernel: the delta
/// coefficient plus the smooth samples along t = t_min. Star products from
/// the left preserve this slice, so a solve that only needs f(., t_min)
/// can run on columns at O(n^2) per product instead of O(n^3).
template <class S>
struct ColumnState {
  S delta = S(0);
  Vector<S> col;
};

template <class S>
double sup_norm(const ColumnState<S>& x) {
  return x.col.cwiseAbs().maxCoeff();
}

/// Column action y = (f * X)(., t_min), same trapezoid discretization as
/// star_product restricted to its first column (including the exact zero of
/// the quadrature term at the t_min node).
template <class S>
ColumnState<S> star_apply_column(const GeneralizedKernel<S>& f,
                                 const ColumnState<S>& x) {
  const Grid& grid = f.grid();
  const int n = grid.size();
  if (x.col.size() != n)
    throw std::invalid_argument("star_apply_column: sample length mismatch");
  const double h = grid.step();
  const Matrix<S>& F = f.smooth().matrix();
  const S cf = f.delta_coeff();
  ColumnState<S> y{cf * x.delta, Vector<S>(n)};
  for (int i = 0; i < n; ++i) {
    S quad = S(0);
    if (i > 0) {
      const S acc = (F.row(i).head(i + 1) * x.col.head(i + 1))(0);
      quad = S(h) * acc -
             S(h / 2) * (F(i, 0) * x.col(0) + F(i, i) * x.col(i));
    }
    y.col(i) = quad + cf * x.col(i) + x.delta * F(i, 0);
  }
  return y;
}

template <class S>
struct ColumnSolveResult {
  ColumnState<S> f;
  SolveReport report;
};

/// solve_resummed restricted to the solution's first-column slice
/// f(., t_min). The constants, bounds and stop rule are the kernel-level
/// quantities of solve_resummed; only the series terms live on columns.
template <class S>
ColumnSolveResult<S> solve_resummed_column(const ResummedContext<S>& ctx,
                                           const GeneralizedKernel<S>& g,
                                           int n_orders,
                                           const SeriesOptions& opts = {}) {
  if (n_orders < 1)
    throw std::invalid_argument(
        "solve_resummed_column: n_orders must be >= 1");
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();

  const Grid& grid = g.grid();
  ColumnState<S> gc{g.delta_coeff(), g.smooth().matrix().col(0)};
  ColumnSolveResult<S> out{star_apply_column(ctx.P, gc)};
  SolveReport& rep = out.report;
  rep.interval_length = grid.length();
  rep.c_k = sup_norm(ctx.K);
  rep.c_t = sup_norm(ctx.T);
  for (const auto& r : ctx.resolvents) {
    ComponentReport cr;
    cr.closed_form = r.closed_form;
    cr.neumann_terms = r.neumann_terms;
    cr.converged = r.converged;
    cr.c_k = r.c_k;
    cr.resolvent_sup = sup_norm(r.resolvent);
    cr.lemma_bound = r.c_k * std::exp(r.c_k * grid.length());
    rep.components.push_back(cr);
  }

  ColumnState<S> term = out.f;
  rep.orders.push_back(OrderEntry{0, sup_norm(term)});
  rep.converged = false;
  for (int k = 1; k < n_orders; ++k) {
    term = star_apply_column(ctx.T, term);
    out.f.delta += term.delta; // exactly zero: T is delta-free
    out.f.col += term.col;
    const double tn = sup_norm(term);
    rep.orders.push_back(OrderEntry{k, tn});
    if (tn <= std::max(opts.abs_tol, opts.rel_tol * sup_norm(out.f))) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged && n_orders == 1)
    rep.converged =
        rep.c_t <= std::max(opts.abs_tol, opts.rel_tol * sup_norm(out.f));

  rep.c_f = sup_norm(out.f);
  for (auto& e : rep.orders) {
    double b = rep.c_f;
    for (int n = 1; n <= e.order; ++n)
      b *= rep.c_t * rep.interval_length / static_cast<double>(n);
    e.bound = b;
    if (e.order == 0) e.remainder = rep.c_f;
  }

  ColumnState<S> kf = star_apply_column(ctx.K, out.f);
  double worst = std::abs(out.f.delta - gc.delta - kf.delta);
  for (int i = 0; i < grid.size(); ++i)
    worst = std::max(worst,
                     std::abs(out.f.col(i) - gc.col(i) - kf.col(i)));
  rep.volterra_defect = worst;
  rep.series_seconds =
      std::chrono::duration<double>(clock::now() - t0).count();
  return out;
}

template <class S>
SolveResult<S> solve_resummed(const SumKernel<S>& sk,
                              const GeneralizedKernel<S>& g, int n_orders,
                              const SeriesOptions& opts = {},
                              std::vector<int> perm = {}) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  auto ctx = make_resummed_context(sk, opts, std::move(perm));
  double res_s = std::chrono::duration<double>(clock::now() - t0).count();
  auto out = solve_resummed(ctx, g, n_orders, opts);
  out.report.resolvents_seconds = res_s;
  return out;
}

/// Per-order truncation errors ||f_ref - f_N^(n)|| of the plain Neumann
/// series f_N^(n) = sum_{k=0}^{n} K^{*k} * g, for n = 0..n_orders-1.
template <class S>
std::vector<double> neumann_order_errors(const GeneralizedKernel<S>& K,
                                         const GeneralizedKernel<S>& g,
                                         int n_orders,
                                         const GeneralizedKernel<S>& f_ref) {
  std::vector<double> errs;
  errs.reserve(n_orders);
  GeneralizedKernel<S> term = g;
  GeneralizedKernel<S> partial = g;
  for (int n = 0; n < n_orders; ++n) {
    if (n > 0) {
      term = star_product(K, term);
      partial += term;
    }
    GeneralizedKernel<S> diff = f_ref - partial;
    errs.push_back(
        std::max(sup_norm(diff), std::abs(diff.delta_coeff())));
  }
  return errs;
}

/// Residual of the exact truncation identity f - f^(n-1) = T^{*n} * f,
/// measured against a converged reference solution.
template <class S>
double truncation_error_check(const ResummedContext<S>& ctx,
                              const GeneralizedKernel<S>& g, int n,
                              const GeneralizedKernel<S>& f_ref,
                              const GeneralizedKernel<S>& f_truncated) {
  GeneralizedKernel<S> lhs = f_ref - f_truncated;
  GeneralizedKernel<S> rhs = star_product(star_power(ctx.T, n), f_ref);
  GeneralizedKernel<S> diff = lhs - rhs;
  return std::max(sup_norm(diff), std::abs(diff.delta_coeff()));
}

template <class S>
double truncation_error_check(const SumKernel<S>& sk,
                              const GeneralizedKernel<S>& g, int n,
                              const SeriesOptions& opts = {}) {
  auto ctx = make_resummed_context(sk, opts);
  SeriesOptions ref_opts = opts;
  ref_opts.store_partials_up_to = n - 1;
  auto ref = solve_resummed(ctx, g, 256, ref_opts);
  if (static_cast<int>(ref.partials.size()) < n)
    throw std::logic_error("truncation_error_check: series ended before n");
  return truncation_error_check(ctx, g, n, ref.f, ref.partials[n - 1]);
}

struct Lemma1Check {
  double c_k = 0.0;
  double measured = 0.0; // sup ||R_K - 1_*||
  double bound = 0.0;    // C_K e^{C_K |I|}
  bool ok = false;
};

/// Checks sup||R_{K_i} - 1_*|| <= C_{K_i} e^{C_{K_i}|I|} (1 + eps_q) for every
/// component resolvent; eps_q absorbs quadrature error.
template <class S>
std::vector<Lemma1Check> lemma1_checks(
    const SumKernel<S>& sk, const std::vector<ComponentResolvent<S>>& rs,
    double eps_q = 1e-6) {
  std::vector<Lemma1Check> out;
  const double len = sk.grid().length();
  for (const auto& r : rs) {
    Lemma1Check c;
    c.c_k = r.c_k;
    c.measured = sup_norm(r.resolvent); // delta part is exactly 1
    c.bound = r.c_k * std::exp(r.c_k * len);
    c.ok = c.measured <= c.bound * (1.0 + eps_q);
    out.push_back(c);
  }
  return out;
}

} // namespace vstar
