#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vstar/examples/constant_kernel.hpp"
#include "vstar/examples/heun.hpp"
#include "vstar/expr.hpp"
#include "vstar/resolvent.hpp"

namespace vstar {

struct ProblemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SeparableSpec {
  std::string a_src, b_src;
  ExprPtr a, b;
};
struct NumericSpec {
  std::string k_src;
  ExprPtr k;
};
struct BuiltinSpec {
  std::string name; // "constant_ab" | "heun"
};
using ComponentSpec = std::variant<SeparableSpec, NumericSpec, BuiltinSpec>;

struct ProblemSpec {
  double t_min = 0, t_max = 1;
  int n = 0;
  bool complex_field = false;
  double g_delta = 0;
  std::string g_src;
  ExprPtr g;
  std::vector<ComponentSpec> components;
  int n_orders = 8;
  std::string method = "resummed"; // neumann | resummed | both
  SeriesOptions series;
  std::map<std::string, double> params;
};

namespace detail {

using nlohmann::json;

inline const json& need(const json& j, const char* key,
                        const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    throw ProblemError("missing field " + path + "." + key);
  return j.at(key);
}

inline double need_number(const json& j, const char* key,
                          const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_number())
    throw ProblemError("field " + path + "." + key + " must be a number");
  return v.get<double>();
}

inline std::string need_string(const json& j, const char* key,
                               const std::string& path) {
  const json& v = need(j, key, path);
  if (!v.is_string())
    throw ProblemError("field " + path + "." + key + " must be a string");
  return v.get<std::string>();
}

inline ExprPtr parse_at(const std::string& src, bool complex_mode,
                        const std::string& path) {
  try {
    return parse_expr(src, complex_mode);
  } catch (const SyntaxError& e) {
    throw ProblemError(path + ": " + e.what());
  }
}

} // namespace detail

inline ProblemSpec parse_problem(const nlohmann::json& j) {
  using detail::need;
  ProblemSpec spec;

  const auto& grid = need(j, "grid", "$");
  spec.t_min = detail::need_number(grid, "t_min", "$.grid");
  spec.t_max = detail::need_number(grid, "t_max", "$.grid");
  double n = detail::need_number(grid, "n", "$.grid");
  spec.n = static_cast<int>(n);
  if (spec.n < 2 || spec.n != n)
    throw ProblemError("field $.grid.n must be an integer >= 2");
  if (!(spec.t_max > spec.t_min))
    throw ProblemError("field $.grid: t_max must exceed t_min");

  std::string field = detail::need_string(j, "field", "$");
  if (field == "complex")
    spec.complex_field = true;
  else if (field != "real")
    throw ProblemError("field $.field must be \"real\" or \"complex\"");

  if (j.contains("params")) {
    const auto& p = j.at("params");
    if (!p.is_object()) throw ProblemError("field $.params must be an object");
    for (auto it = p.begin(); it != p.end(); ++it) {
      if (!it.value().is_number())
        throw ProblemError("field $.params." + it.key() +
                           " must be a number");
      spec.params[it.key()] = it.value().get<double>();
    }
  }

  const auto& g = need(j, "g", "$");
  spec.g_delta = detail::need_number(g, "delta", "$.g");
  spec.g_src = detail::need_string(g, "smooth", "$.g");
  spec.g = detail::parse_at(spec.g_src, spec.complex_field, "$.g.smooth");

  const auto& comps = need(j, "components", "$");
  if (!comps.is_array() || comps.empty())
    throw ProblemError("field $.components must be a non-empty array");
  for (size_t idx = 0; idx < comps.size(); ++idx) {
    const auto& c = comps[idx];
    const std::string path = "$.components[" + std::to_string(idx) + "]";
    if (c.contains("separable")) {
      SeparableSpec s;
      const auto& sc = c.at("separable");
      s.a_src = detail::need_string(sc, "a", path + ".separable");
      s.b_src = detail::need_string(sc, "b", path + ".separable");
      s.a = detail::parse_at(s.a_src, spec.complex_field,
                             path + ".separable.a");
      s.b = detail::parse_at(s.b_src, spec.complex_field,
                             path + ".separable.b");
      spec.components.push_back(std::move(s));
    } else if (c.contains("numeric")) {
      NumericSpec s;
      s.k_src = detail::need_string(c.at("numeric"), "k", path + ".numeric");
      s.k = detail::parse_at(s.k_src, spec.complex_field, path + ".numeric.k");
      spec.components.push_back(std::move(s));
    } else if (c.contains("builtin")) {
      BuiltinSpec s;
      const auto& b = c.at("builtin");
      s.name = b.is_string() ? b.get<std::string>()
                             : detail::need_string(b, "name", path + ".builtin");
      if (s.name != "constant_ab" && s.name != "heun")
        throw ProblemError(path + ".builtin: unknown builtin '" + s.name +
                           "'");
      spec.components.push_back(std::move(s));
    } else {
      throw ProblemError(path +
                         ": expected one of separable / numeric / builtin");
    }
  }

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    if (s.contains("orders"))
      spec.n_orders = static_cast<int>(detail::need_number(s, "orders",
                                                           "$.solver"));
    if (spec.n_orders < 1)
      throw ProblemError("field $.solver.orders must be >= 1");
    if (s.contains("method")) {
      spec.method = detail::need_string(s, "method", "$.solver");
      if (spec.method != "neumann" && spec.method != "resummed" &&
          spec.method != "both")
        throw ProblemError(
            "field $.solver.method must be neumann, resummed or both");
    }
    if (s.contains("abs_tol"))
      spec.series.abs_tol = detail::need_number(s, "abs_tol", "$.solver");
    if (s.contains("rel_tol"))
      spec.series.rel_tol = detail::need_number(s, "rel_tol", "$.solver");
  }

  // every free expression name must be covered by params (t/tp are bound
  // at evaluation)
  auto check_names = [&spec](const ExprPtr& e, const std::string& path,
                             bool allow_t, bool allow_tp) {
    std::map<std::string, int> names;
    collect_names(e, names);
    for (const auto& [name, cnt] : names) {
      if (name == "t") {
        if (!allow_t)
          throw ProblemError(path + ": variable t not allowed here");
        continue;
      }
      if (name == "tp") {
        if (!allow_tp)
          throw ProblemError(path + ": variable tp not allowed here");
        continue;
      }
      if (!spec.params.count(name))
        throw ProblemError(path + ": parameter '" + name +
                           "' missing from $.params");
    }
  };
  check_names(spec.g, "$.g.smooth", true, true);
  for (size_t idx = 0; idx < spec.components.size(); ++idx) {
    const std::string path = "$.components[" + std::to_string(idx) + "]";
    if (const auto* s = std::get_if<SeparableSpec>(&spec.components[idx])) {
      check_names(s->a, path + ".separable.a", false, true);
      check_names(s->b, path + ".separable.b", true, false);
    } else if (const auto* nu = std::get_if<NumericSpec>(&spec.components[idx])) {
      check_names(nu->k, path + ".numeric.k", true, true);
    } else {
      const auto& b = std::get<BuiltinSpec>(spec.components[idx]);
      const char* const* req;
      static const char* const ab[] = {"a", "b", nullptr};
      static const char* const heun[] = {"f1", "nu", "omega", nullptr};
      req = (b.name == "constant_ab") ? ab : heun;
      for (; *req; ++req)
        if (!spec.params.count(*req))
          throw ProblemError(path + ".builtin: parameter '" +
                             std::string(*req) + "' missing from $.params");
      if (b.name == "heun" && !spec.complex_field)
        throw ProblemError(path + ".builtin: heun requires field complex");
    }
  }
  return spec;
}

inline ProblemSpec load_problem(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ProblemError("cannot open problem file: " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ProblemError("invalid JSON in " + path + ": " + e.what());
  }
  return parse_problem(j);
}

template <class S>
struct BuiltProblem {
  Grid grid;
  GeneralizedKernel<S> g;
  SumKernel<S> kernel;
};

/// Instantiates the spec on its grid: samples expressions, expands builtins.
template <class S>
BuiltProblem<S> build_problem(const ProblemSpec& spec) {
  if (spec.complex_field != is_complex_v<S>)
    throw ProblemError("field/scalar type mismatch in build_problem");
  Grid grid(spec.t_min, spec.t_max, spec.n);

  Bindings<S> env;
  for (const auto& [k, v] : spec.params) env.values[k] = S(v);
  auto eval2 = [&env](const ExprPtr& e, double tp, double t) {
    Bindings<S> b = env;
    b.values["tp"] = S(tp);
    b.values["t"] = S(t);
    return eval_expr(e, b);
  };

  BuiltProblem<S> out{grid,
                      make_kernel<S>(grid, S(spec.g_delta),
                                     [&](double tp, double t) {
                                       return eval2(spec.g, tp, t);
                                     }),
                      SumKernel<S>(grid)};

  for (const auto& comp : spec.components) {
    if (const auto* s = std::get_if<SeparableSpec>(&comp)) {
      out.kernel.add_separable(SeparableComponent<S>::from_functions(
          grid, [&](double tp) { return eval2(s->a, tp, 0.0); },
          [&](double t) { return eval2(s->b, 0.0, t); }));
    } else if (const auto* nk = std::get_if<NumericSpec>(&comp)) {
      out.kernel.add_numeric(make_kernel<S>(
          grid, S(0),
          [&](double tp, double t) { return eval2(nk->k, tp, t); }));
    } else {
      const auto& b = std::get<BuiltinSpec>(comp);
      if (b.name == "constant_ab") {
        out.kernel.add_separable(
            constant_component<S>(grid, S(spec.params.at("a"))));
        out.kernel.add_separable(
            constant_component<S>(grid, S(spec.params.at("b"))));
      } else { // heun
        if constexpr (is_complex_v<S>) {
          HeunProblem p(spec.params.at("f1"), spec.params.at("nu"),
                        spec.params.at("omega"), grid);
          SumKernel<cplx> hk = heun_build_kernel(p);
          for (int i = 0; i < hk.size(); ++i) {
            if (const auto* sep =
                    std::get_if<SeparableComponent<cplx>>(&hk.component(i)))
              out.kernel.add_separable(*sep);
            else
              out.kernel.add_numeric(
                  std::get<GeneralizedKernel<cplx>>(hk.component(i)));
          }
        }
      }
    }
  }
  return out;
}

} // namespace vstar
