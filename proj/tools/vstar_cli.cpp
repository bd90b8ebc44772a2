// Command-line front end: solve problems from JSON files, emit solution and
// convergence tables, run the invariant suite, or reproduce the worked
// examples. All outputs are byte-deterministic for a fixed input.

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "vstar/checks.hpp"
#include "vstar/problem.hpp"
#include "vstar/report_io.hpp"

namespace fs = std::filesystem;
using namespace vstar;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNoConvergence = 3;

struct RunConfig {
  std::string input;
  std::string out_dir;
  bool want_csv = true;
  bool want_json = true;
};

void apply_formats(RunConfig& cfg, const std::string& formats) {
  cfg.want_csv = formats.find("csv") != std::string::npos;
  cfg.want_json = formats.find("json") != std::string::npos;
  if (!cfg.want_csv && !cfg.want_json)
    throw ProblemError("--format must mention csv and/or json");
}

void ensure_out_dir(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
}

std::string out_path(const RunConfig& cfg, const char* name) {
  return (fs::path(cfg.out_dir) / name).string();
}

template <class S>
int run_solve(const ProblemSpec& spec, const RunConfig& cfg) {
  auto built = build_problem<S>(spec);
  bool converged = false;
  ordered_json report;

  GeneralizedKernel<S> f = built.g;
  if (spec.method == "neumann") {
    const auto K = built.kernel.total();
    auto nr = resolvent_neumann(K, spec.n_orders,
                                quadrature_floor(K, spec.series.abs_tol));
    f = star_product(nr.resolvent, built.g);
    converged = nr.converged;
    GeneralizedKernel<S> defect = f - built.g - star_product(K, f);
    report["method"] = "neumann";
    report["terms_used"] = nr.terms_used;
    report["converged"] = nr.converged;
    report["last_term_norm"] = nr.last_term_norm;
    report["volterra_defect"] =
        std::max(sup_norm(defect), std::abs(defect.delta_coeff()));
  } else {
    auto res = solve_resummed(built.kernel, built.g, spec.n_orders,
                              spec.series);
    f = std::move(res.f);
    converged = res.report.converged;
    report = report_to_json(res.report);
    report["method"] = spec.method;
  }

  ensure_out_dir(cfg);
  if (cfg.want_csv) {
    std::ostringstream os;
    write_field_csv(os, f);
    write_text_file(out_path(cfg, "solution.csv"), os.str());
  }
  if (cfg.want_json) write_json_file(out_path(cfg, "report.json"), report);
  if (!converged) {
    std::cerr << "warning: series did not converge within "
              << spec.n_orders << " orders; outputs written anyway\n";
    return kExitNoConvergence;
  }
  return 0;
}

template <class S>
int run_convergence(const ProblemSpec& spec, const RunConfig& cfg) {
  if (spec.method != "both")
    throw ProblemError("convergence requires $.solver.method == \"both\"");
  auto built = build_problem<S>(spec);
  const auto K = built.kernel.total();

  SeriesOptions sopts = spec.series;
  sopts.store_partials_up_to = spec.n_orders - 1;
  auto ctx = make_resummed_context(built.kernel, sopts);
  auto ref = solve_resummed(ctx, built.g, 256, sopts);

  std::vector<double> resummed_err;
  for (int n = 0; n < spec.n_orders &&
                  n < static_cast<int>(ref.partials.size());
       ++n) {
    GeneralizedKernel<S> diff = ref.f - ref.partials[n];
    resummed_err.push_back(
        std::max(sup_norm(diff), std::abs(diff.delta_coeff())));
  }
  auto neumann_err =
      neumann_order_errors(K, built.g, spec.n_orders, ref.f);

  ensure_out_dir(cfg);
  if (cfg.want_csv) {
    std::ostringstream os;
    write_convergence_csv(os, neumann_err, resummed_err, ref.report.c_k,
                          ref.report.c_t, ref.report.c_f,
                          ref.report.interval_length);
    write_text_file(out_path(cfg, "convergence.csv"), os.str());
  }
  if (cfg.want_json) {
    ordered_json j = report_to_json(ref.report);
    j["neumann_error"] = neumann_err;
    j["resummed_error"] = resummed_err;
    write_json_file(out_path(cfg, "convergence.json"), j);
  }
  return ref.report.converged ? 0 : kExitNoConvergence;
}

template <class S>
int run_verify(const ProblemSpec& spec, const RunConfig& cfg) {
  auto built = build_problem<S>(spec);
  auto results = run_all_checks(built.kernel, built.g);

  ordered_json j;
  bool all_ok = true;
  ordered_json checks = ordered_json::array();
  for (const auto& r : results) {
    checks.push_back({{"name", r.name},
                      {"status", r.status},
                      {"measured", r.measured},
                      {"tolerance", r.tolerance},
                      {"detail", r.detail}});
    all_ok = all_ok && !r.failed();
    std::cout << r.name << ": " << r.status << " (measured " << r.measured
              << ", tolerance " << r.tolerance << ")\n";
  }
  j["all_passed"] = all_ok;
  j["checks"] = std::move(checks);
  ensure_out_dir(cfg);
  write_json_file(out_path(cfg, "verify.json"), j);
  return all_ok ? 0 : 1;
}

int run_example_constant(const RunConfig& cfg) {
  const double a = 1.0, b = 2.0;
  Grid grid(0.0, 1.0, 801);
  SumKernel<double> sk(grid);
  sk.add_separable(constant_component<double>(grid, a));
  sk.add_separable(constant_component<double>(grid, b));
  auto g = GeneralizedKernel<double>::identity(grid);
  auto res = solve_resummed(sk, g, 64);

  double max_rel = 0.0;
  std::ostringstream os;
  os << "k,t,solver,oracle,abs_err\n";
  for (int k = 0; k < grid.size(); ++k) {
    const double solver = res.f.smooth()(k, 0);
    const double oracle = constant_exact(a, b, grid.node(k));
    max_rel = std::max(max_rel,
                       std::abs(solver - oracle) / std::abs(oracle));
    os << k << ',' << detail::fmt17(grid.node(k)) << ','
       << detail::fmt17(solver) << ',' << detail::fmt17(oracle) << ','
       << detail::fmt17(std::abs(solver - oracle)) << "\n";
  }
  ensure_out_dir(cfg);
  if (cfg.want_csv)
    write_text_file(out_path(cfg, "example_constant.csv"), os.str());
  if (cfg.want_json) {
    ordered_json j;
    j["example"] = "constant";
    j["a"] = a;
    j["b"] = b;
    j["max_relative_deviation"] = max_rel;
    j["report"] = report_to_json(res.report);
    write_json_file(out_path(cfg, "summary.json"), j);
  }
  return 0;
}

int run_example_heun(const RunConfig& cfg) {
  HeunProblem p; // defaults: f1=0.5, nu=0.5, omega=1, horizon 2*pi
  auto out = heun_volterra_solve(p, 64);
  auto [a_rk4, b_rk4] = heun_ode_oracle(p);

  double sup_diff = 0.0;
  std::ostringstream os;
  os << "k,t,volterra_re,volterra_im,rk4_re,rk4_im,abs_err\n";
  for (int k = 0; k < p.grid.size(); ++k) {
    sup_diff = std::max(sup_diff, std::abs(out.a(k) - a_rk4(k)));
    os << k << ',' << detail::fmt17(p.grid.node(k)) << ','
       << detail::fmt17(out.a(k).real()) << ','
       << detail::fmt17(out.a(k).imag()) << ','
       << detail::fmt17(a_rk4(k).real()) << ','
       << detail::fmt17(a_rk4(k).imag()) << ','
       << detail::fmt17(std::abs(out.a(k) - a_rk4(k))) << "\n";
  }
  ensure_out_dir(cfg);
  if (cfg.want_csv)
    write_text_file(out_path(cfg, "example_heun.csv"), os.str());
  if (cfg.want_json) {
    ordered_json j;
    j["example"] = "heun";
    j["f1"] = p.f1;
    j["nu"] = p.nu;
    j["omega"] = p.omega;
    j["sup_abs_diff_vs_rk4"] = sup_diff;
    j["split_discrepancy"] = split_discrepancy(p);
    j["report"] = report_to_json(out.report);
    write_json_file(out_path(cfg, "summary.json"), j);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volterra sum-kernel solver"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string formats = "csv,json";
  std::string example_name;

  auto add_common = [&](CLI::App* sub, bool needs_input) {
    if (needs_input)
      sub->add_option("--input", cfg.input, "problem JSON file")->required();
    sub->add_option("--out", cfg.out_dir, "output directory")->required();
    sub->add_option("--format", formats, "comma list of csv,json");
  };
  auto* solve = app.add_subcommand("solve", "solve f = g + K*f");
  add_common(solve, true);
  auto* conv = app.add_subcommand(
      "convergence", "order-by-order Neumann vs re-summed comparison");
  add_common(conv, true);
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  add_common(verify, true);
  auto* example =
      app.add_subcommand("example", "reproduce a worked example");
  example->add_option("--name", example_name, "constant | heun")->required();
  add_common(example, false);

  CLI11_PARSE(app, argc, argv);

  try {
    apply_formats(cfg, formats);
    if (example->parsed()) {
      if (example_name == "constant") return run_example_constant(cfg);
      if (example_name == "heun") return run_example_heun(cfg);
      std::cerr << "error: unknown example '" << example_name << "'\n";
      return kExitConfig;
    }
    ProblemSpec spec = load_problem(cfg.input);
    auto dispatch = [&](auto tag) -> int {
      using S = decltype(tag);
      if (solve->parsed()) return run_solve<S>(spec, cfg);
      if (conv->parsed()) return run_convergence<S>(spec, cfg);
      return run_verify<S>(spec, cfg);
    };
    return spec.complex_field ? dispatch(cplx{}) : dispatch(double{});
  } catch (const ProblemError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
