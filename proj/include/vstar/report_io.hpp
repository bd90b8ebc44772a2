#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "vstar/resolvent.hpp"

namespace vstar {

using ordered_json = nlohmann::ordered_json;

namespace detail {

// 17 significant digits, round-trip exact for doubles
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

template <class S>
double re_part(S v) {
  if constexpr (is_complex_v<S>)
    return v.real();
  else
    return v;
}
template <class S>
double im_part(S v) {
  if constexpr (is_complex_v<S>)
    return v.imag();
  else
    return 0.0;
}

} // namespace detail

/// Lower-triangle CSV dump: header carries the delta coefficient, rows are
/// "i,j,t_i,t_j,re,im" over i >= j.
template <class S>
void write_field_csv(std::ostream& os, const GeneralizedKernel<S>& f) {
  os << "# delta_re=" << detail::fmt17(detail::re_part(f.delta_coeff()))
     << " delta_im=" << detail::fmt17(detail::im_part(f.delta_coeff()))
     << "\n";
  os << "i,j,t_i,t_j,re,im\n";
  const Grid& grid = f.grid();
  const auto& m = f.smooth().matrix();
  for (int i = 0; i < grid.size(); ++i)
    for (int j = 0; j <= i; ++j) {
      const S v = m(i, j);
      os << i << ',' << j << ',' << detail::fmt17(grid.node(i)) << ','
         << detail::fmt17(grid.node(j)) << ','
         << detail::fmt17(detail::re_part(v)) << ','
         << detail::fmt17(detail::im_part(v)) << "\n";
    }
}

/// One-variable samples, "k,t,re,im".
template <class S>
void write_samples_csv(std::ostream& os, const Grid& grid,
                       const Vector<S>& values,
                       const std::string& value_name = "value") {
  os << "k,t," << value_name << "_re," << value_name << "_im\n";
  for (int k = 0; k < grid.size(); ++k)
    os << k << ',' << detail::fmt17(grid.node(k)) << ','
       << detail::fmt17(detail::re_part(S(values(k)))) << ','
       << detail::fmt17(detail::im_part(S(values(k)))) << "\n";
}

inline ordered_json report_to_json(const SolveReport& rep) {
  ordered_json j;
  j["constants"] = {{"c_k", rep.c_k},
                    {"c_t", rep.c_t},
                    {"c_f_estimated", rep.c_f},
                    {"interval_length", rep.interval_length}};
  j["converged"] = rep.converged;
  j["defect_stagnated"] = rep.defect_stagnated;
  j["volterra_defect"] = rep.volterra_defect;
  ordered_json orders = ordered_json::array();
  for (const auto& e : rep.orders) {
    ordered_json o;
    o["order"] = e.order;
    o["term_norm"] = e.term_norm;
    o["bound"] = e.bound;
    if (std::isfinite(e.defect)) o["defect"] = e.defect;
    if (std::isfinite(e.remainder)) o["remainder"] = e.remainder;
    orders.push_back(o);
  }
  j["orders"] = std::move(orders);
  ordered_json comps = ordered_json::array();
  for (const auto& c : rep.components)
    comps.push_back({{"closed_form", c.closed_form},
                     {"neumann_terms", c.neumann_terms},
                     {"converged", c.converged},
                     {"c_k", c.c_k},
                     {"resolvent_sup", c.resolvent_sup},
                     {"lemma_bound", c.lemma_bound}});
  j["components"] = std::move(comps);
  // wall-clock timings deliberately excluded: outputs must be byte-identical
  // across runs of the same config
  return j;
}

/// Order-by-order comparison table of the plain Neumann series vs the
/// re-summed series, with their factorial bounds.
inline void write_convergence_csv(std::ostream& os,
                                  const std::vector<double>& neumann_err,
                                  const std::vector<double>& resummed_err,
                                  double c_k, double c_t, double c_f,
                                  double interval_length) {
  os << "# c_k=" << detail::fmt17(c_k) << " c_t=" << detail::fmt17(c_t)
     << " c_f=" << detail::fmt17(c_f)
     << " interval=" << detail::fmt17(interval_length) << "\n";
  os << "order,neumann_error,resummed_error,bound_neumann,bound_resummed\n";
  const size_t n = std::max(neumann_err.size(), resummed_err.size());
  double bk = c_f, bt = c_f;
  for (size_t i = 0; i < n; ++i) {
    if (i > 0) {
      bk *= c_k * interval_length / static_cast<double>(i);
      bt *= c_t * interval_length / static_cast<double>(i);
    }
    os << i << ',';
    os << (i < neumann_err.size() ? detail::fmt17(neumann_err[i]) : "") << ',';
    os << (i < resummed_err.size() ? detail::fmt17(resummed_err[i]) : "")
       << ',';
    os << detail::fmt17(bk) << ',' << detail::fmt17(bt) << "\n";
  }
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
}

inline void write_json_file(const std::string& path, const ordered_json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

} // namespace vstar
