#pragma once

#include <string>
#include <vector>

#include "vstar/resolvent.hpp"

namespace vstar {

struct CheckResult {
  std::string name;
  std::string status; // "pass" | "fail" | "n/a"
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;

  bool failed() const { return status == "fail"; }
};

struct CheckOptions {
  double theta_power_tol = 5e-5; // absolute, grid-sensitive by design
  double identity_tol = 1e-6;
  double permutation_tol = 1e-6;
  double alternative_tol = 1e-6;
  double lemma_slack = 1e-6; // relative headroom above the analytic bound
  int max_error_order = 3;
  int theta_max_power = 5;
};

namespace detail {
inline CheckResult graded(std::string name, double measured, double tol,
                          std::string detail = {}) {
  CheckResult r{std::move(name), measured <= tol ? "pass" : "fail", measured,
                tol, std::move(detail)};
  return r;
}
} // namespace detail

/// Theta^{*k} == (t'-t)^{k-1}/(k-1)! Theta for k up to theta_max_power.
template <class S>
CheckResult check_theta_power(const Grid& grid, const CheckOptions& opts = {}) {
  GeneralizedKernel<S> theta = theta_kernel<S>(grid);
  GeneralizedKernel<S> power = theta;
  double worst = 0.0;
  for (int k = 2; k <= opts.theta_max_power; ++k) {
    power = star_product(theta, power);
    double fact = 1.0;
    for (int m = 2; m < k; ++m) fact *= m;
    auto exact = make_kernel<S>(grid, S(0), [k, fact](double tp, double t) {
      return S(std::pow(tp - t, k - 1) / fact);
    });
    worst = std::max(worst, sup_norm(power - exact));
  }
  return detail::graded("theta_power_law", worst, opts.theta_power_tol,
                        "max over powers 2.." +
                            std::to_string(opts.theta_max_power));
}

/// Exact truncation identity f - f^(n-1) = T^{*n} * f at orders 1..max.
template <class S>
CheckResult check_error_identity(const SumKernel<S>& sk,
                                 const GeneralizedKernel<S>& g,
                                 const CheckOptions& opts = {}) {
  SeriesOptions sopts;
  sopts.store_partials_up_to = opts.max_error_order;
  auto ctx = make_resummed_context(sk, sopts);
  auto ref = solve_resummed(ctx, g, 256, sopts);
  double worst = 0.0;
  int checked = 0;
  for (int n = 1; n <= opts.max_error_order &&
                  n <= static_cast<int>(ref.partials.size());
       ++n) {
    worst = std::max(
        worst, truncation_error_check(ctx, g, n, ref.f, ref.partials[n - 1]));
    ++checked;
  }
  return detail::graded("truncation_error_identity", worst, opts.identity_tol,
                        "orders 1.." + std::to_string(checked));
}

/// Solutions under the default and the reversed resolvent ordering agree.
template <class S>
CheckResult check_permutation_invariance(const SumKernel<S>& sk,
                                         const GeneralizedKernel<S>& g,
                                         const CheckOptions& opts = {}) {
  if (sk.size() < 2)
    return CheckResult{"permutation_invariance", "n/a", 0, 0,
                       "single component"};
  std::vector<int> fwd(sk.size()), rev(sk.size());
  std::iota(fwd.begin(), fwd.end(), 0);
  rev.assign(fwd.rbegin(), fwd.rend());
  auto f1 = solve_resummed(sk, g, 256, {}, fwd);
  auto f2 = solve_resummed(sk, g, 256, {}, rev);
  GeneralizedKernel<S> diff = f1.f - f2.f;
  double worst = std::max(sup_norm(diff), std::abs(diff.delta_coeff()));
  return detail::graded("permutation_invariance", worst, opts.permutation_tol);
}

/// The subset-sum form of T matches the defining form.
template <class S>
CheckResult check_alternative_T(const SumKernel<S>& sk,
                                const CheckOptions& opts = {}) {
  if (sk.size() < 2)
    return CheckResult{"alternative_T", "n/a", 0, 0, "single component"};
  auto rs = compute_resolvents(sk);
  auto T = build_T(sk, rs, detail::identity_permutation(sk.size()));
  auto Talt = build_T_alternative(sk, rs);
  GeneralizedKernel<S> diff = T - Talt;
  double worst = std::max(sup_norm(diff), std::abs(diff.delta_coeff()));
  return detail::graded("alternative_T", worst, opts.alternative_tol);
}

/// sup||R_K - 1_*|| <= C_K e^{C_K |I|} per component, with quadrature slack.
template <class S>
CheckResult check_lemma1(const SumKernel<S>& sk,
                         const CheckOptions& opts = {}) {
  auto rs = compute_resolvents(sk);
  auto checks = lemma1_checks(sk, rs, opts.lemma_slack);
  double worst = 0.0; // worst relative excess over the bound
  for (const auto& c : checks)
    if (c.bound > 0) worst = std::max(worst, c.measured / c.bound - 1.0);
  return detail::graded("lemma1_resolvent_bound", worst, opts.lemma_slack,
                        std::to_string(checks.size()) + " component(s)");
}

template <class S>
std::vector<CheckResult> run_all_checks(const SumKernel<S>& sk,
                                        const GeneralizedKernel<S>& g,
                                        const CheckOptions& opts = {}) {
  std::vector<CheckResult> out;
  out.push_back(check_theta_power<S>(sk.grid(), opts));
  out.push_back(check_error_identity(sk, g, opts));
  out.push_back(check_permutation_invariance(sk, g, opts));
  out.push_back(check_alternative_T(sk, opts));
  out.push_back(check_lemma1(sk, opts));
  return out;
}

} // namespace vstar
