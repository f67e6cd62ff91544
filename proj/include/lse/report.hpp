#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lse/solver.hpp"
#include "lse/verify.hpp"

namespace lse {

namespace detail {

// JSON has no infinities; emit null for non-finite values.
inline nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

inline nlohmann::json point_json(const Point& p, int dim) {
  nlohmann::json a = nlohmann::json::array();
  for (int k = 0; k < dim; ++k) a.push_back(p[k]);
  return a;
}

inline nlohmann::json counts_json(const IdentityCounts& c) {
  return {{"passed", c.passed}, {"total", c.total}, {"ok", c.ok()}};
}

}  // namespace detail

/// Deterministic JSON rendering of an audit. Wells are numbered from 1.
inline nlohmann::json report_json(const VerificationReport& rep, int dim) {
  using nlohmann::json;
  json wells = json::array();
  for (const WellAudit& w : rep.wells) {
    wells.push_back({
        {"well", w.well + 1},
        {"status", to_string(w.status)},
        {"level", w.level},
        {"barycenter", detail::point_json(w.barycenter, dim)},
        {"distance_to_well", w.distance_to_well},
        {"region", to_string(w.region.kind)},
        {"localized", w.localized},
        {"weak_res", w.weak_res},
        {"nehari_res", w.nehari_res},
        {"level_gap", w.level_gap},
        {"grad_norm", w.grad_norm},
        {"R_final", w.R_final},
        {"positivity", {{"ok", w.positivity.ok},
                        {"min_interior", detail::number_or_null(w.positivity.min_interior)},
                        {"zero_nodes", w.positivity.zero_nodes}}},
        {"nehari_ok", w.nehari_ok},
        {"separation_ok", w.separation_ok},
        {"log_sobolev_gap", w.log_sobolev_gap},
        {"scaling_error", w.scaling_error},
        {"note", w.note},
    });
  }
  json pairs = json::array();
  for (const PairAudit& p : rep.pairs) {
    pairs.push_back({{"wells", {p.i + 1, p.j + 1}},
                     {"disjoint_balls", p.disjoint_balls},
                     {"relative_l2", p.relative_l2},
                     {"distinct", p.distinct}});
  }
  const AuditTolerances& t = rep.tolerances;
  return {
      {"schema_version", VerificationReport::kSchemaVersion},
      {"passed", rep.passed()},
      {"eps", rep.eps},
      {"levels", {{"c0", rep.c0}, {"c_inf", rep.c_inf}, {"gamma", rep.gamma}, {"c0_plus_gamma", rep.c0 + rep.gamma}}},
      {"all_converged", rep.all_converged},
      {"gap_ok", rep.gap_ok},
      {"separation_ok", rep.separation_ok},
      {"positivity_ok", rep.positivity_ok},
      {"nehari_ok", rep.nehari_ok},
      {"distinct_ok", rep.distinct_ok},
      {"localization_ok", rep.localization_ok},
      {"identity_suite",
       {{"splitting", detail::counts_json(rep.splitting)},
        {"seam", detail::counts_json(rep.seam)},
        {"scaling", detail::counts_json(rep.scaling)},
        {"log_sobolev", detail::counts_json(rep.log_sobolev)},
        {"f2_growth", detail::counts_json(rep.f2_growth)}}},
      {"tolerances",
       {{"grad_tol", t.grad_tol},
        {"nehari_tol", t.nehari_tol},
        {"distinct_l2", t.distinct_l2},
        {"boundary_band", t.boundary_band},
        {"scaling_rel", t.scaling_rel},
        {"log_sobolev_floor", t.log_sobolev_floor},
        {"split_rel", t.split_rel},
        {"seam_abs", t.seam_abs},
        {"negligible_tail", t.negligible_tail},
        {"probes", t.probes}}},
      {"wells", wells},
      {"pairs", pairs},
      {"failures", rep.failures},
  };
}

/// One row per well: well, level, barycenter, residuals, R_final, status.
inline void write_levels_csv(std::ostream& os, const VerificationReport& rep, const std::vector<SolveResult>& results,
                             int dim) {
  os << "well,level," << (dim == 2 ? "Q_x,Q_y" : "Q") << ",distance_to_well,region,weak_res,nehari_res,grad_norm,"
     << "R_final,iterations,status\n";
  for (std::size_t k = 0; k < rep.wells.size(); ++k) {
    const WellAudit& w = rep.wells[k];
    const int iters = k < results.size() ? results[k].iterations : 0;
    os << w.well + 1 << ',' << format_shortest(w.level) << ',' << format_shortest(w.barycenter[0]) << ',';
    if (dim == 2) os << format_shortest(w.barycenter[1]) << ',';
    os << format_shortest(w.distance_to_well) << ',' << to_string(w.region.kind) << ','
       << format_shortest(w.weak_res) << ',' << format_shortest(w.nehari_res) << ',' << format_shortest(w.grad_norm)
       << ',' << format_shortest(w.R_final) << ',' << iters << ',' << to_string(w.status) << '\n';
  }
}

inline void write_history_csv(std::ostream& os, const SolveResult& r, int dim) {
  os << "iter,level,nehari_res,grad_norm," << (dim == 2 ? "Q_x,Q_y" : "Q") << ",step,log_sobolev_gap\n";
  for (const IterateRecord& h : r.history) {
    os << h.iter << ',' << format_shortest(h.level) << ',' << format_shortest(h.nehari_res) << ','
       << format_shortest(h.grad_norm) << ',' << format_shortest(h.barycenter[0]) << ',';
    if (dim == 2) os << format_shortest(h.barycenter[1]) << ',';
    os << format_shortest(h.step) << ',' << format_shortest(h.log_sobolev_gap) << '\n';
  }
}

}  // namespace lse
