#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lse/barycenter.hpp"
#include "lse/energy.hpp"
#include "lse/error.hpp"
#include "lse/grid.hpp"
#include "lse/potential.hpp"
#include "lse/weak_form.hpp"

namespace lse {

struct StepRule {
  double initial = 1e-3;
  double min_step = 1e-6;
  double max_step = 10.0;
  double backtrack = 0.5;
  int max_halvings = 40;
};

struct SolverConfig {
  double grad_tol = 1e-8;
  double nehari_tol = 1e-10;
  int max_iters = 100000;
  StepRule step;
  /// Level-separation margin; when unset the pipeline uses (c_inf - c0)/4.
  std::optional<double> gamma;
  std::vector<double> R_schedule{30.0, 60.0};
  WellGeometry localization;
  /// Consecutive iterations with a barycenter-driven step rejection after
  /// which the descent is declared pinned against the region boundary.
  int boundary_patience = 200;
  bool record_history = false;
  std::size_t probes = 50;
  std::uint64_t probe_seed = 20240901;
};

enum class SolveStatus { Converged, BoundaryHit, IterationCap, SeedFailed };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::BoundaryHit: return "BoundaryHit";
    case SolveStatus::IterationCap: return "IterationCap";
    case SolveStatus::SeedFailed: return "SeedFailed";
  }
  return "?";
}

struct IterateRecord {
  int iter = 0;
  double level = 0.0;
  double nehari_res = 0.0;
  double grad_norm = 0.0;
  Point barycenter{0.0, 0.0};
  double step = 0.0;
  double log_sobolev_gap = 0.0;
};

struct SolveResult {
  std::shared_ptr<const Grid> grid;
  Field u;
  double level = 0.0;
  double mass = 0.0;
  Point barycenter{0.0, 0.0};
  std::size_t well_index = 0;  // 0-based
  double nehari_res = 0.0;
  double level_gap = 0.0;  // |J(u) - 1/2 ∫u^2|
  double grad_norm = 0.0;
  double weak_res = 0.0;
  double R_final = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::IterationCap;
  std::string note;
  Positivity positivity;
  double min_log_sobolev_gap = std::numeric_limits<double>::infinity();
  int localization_rejections = 0;
  std::vector<IterateRecord> history;
  std::vector<double> R_visited;
  std::vector<double> level_by_R;
  bool continuation_stable = false;
  double continuation_gap = std::numeric_limits<double>::infinity();
};

/// Smooth radial cutoff: 1 on [0, 1/2], 0 on [1, inf), quintic (C^2) in between.
inline double cutoff(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  const double s = (t - 0.5) / 0.5;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

inline double gausson_amplitude(int dim, double omega) { return std::exp(0.5 * (dim + omega)); }

/// Closed-form level 1/2 ∫u^2 of the Gausson: 1/2 e^{N+ω} π^{N/2}.
inline double gausson_level(int dim, double omega) {
  return 0.5 * std::exp(dim + omega) * std::pow(std::numbers::pi, 0.5 * dim);
}

/// Exact positive solution of -Δu + ωu = u log u^2 on R^N,
/// e^{(N+ω)/2} e^{-|x-c|^2/2}, sampled with zero boundary values.
inline Field gausson(const Grid& g, double omega, Point center = {0.0, 0.0}) {
  const double amp = gausson_amplitude(g.dim(), omega);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (g.interior(j)) continue;
    const double d = distance(g.node(j), center);
    if (amp * std::exp(-0.5 * d * d) > 1e-12) {
      throw Error(ErrorCode::DomainTooSmall, "Gausson tail exceeds 1e-12 on the boundary");
    }
  }
  return sample(g, [&](const Point& x) {
    const double d = distance(x, center);
    return amp * std::exp(-0.5 * d * d);
  });
}

namespace detail {

inline double residual_norm(const Grid& g, const Field& r) {
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) s += g.weight(j) * r[j] * r[j];
  return std::sqrt(s);
}

struct Projected {
  Field u;
  EnergyBreakdown e;
};

inline Projected project(const Functional& J, Field u) {
  u *= J.nehari_scale(u);
  EnergyBreakdown e = J.energy(u);
  return {std::move(u), e};
}

inline std::vector<Point> localization_wells(const EnergyParams& params) {
  if (params.potential) return params.potential->wells();
  return {Point{0.0, 0.0}};
}

}  // namespace detail

/// Translated Gausson (ω = 1) times the cutoff φ(|x|/R), projected on the
/// Nehari set. i is 0-based.
inline Field seed_well(std::size_t i, double eps, const EnergyParams& params, const SolverConfig& config,
                       const Grid& g) {
  if (!(eps > 0.0)) throw Error(ErrorCode::NonPositiveEpsilon, "eps must be positive");
  const std::vector<Point> wells = detail::localization_wells(params);
  if (i >= wells.size()) throw Error(ErrorCode::InvalidConfig, "well index out of range");
  const Point center{wells[i][0] / eps, wells[i][1] / eps};
  const double reach = std::max(std::abs(center[0]), std::abs(center[1]));
  if (g.radius() - reach < 5.0) {
    throw Error(ErrorCode::DomainTooSmall, "grid does not cover z_i/eps with a margin of 5");
  }
  const double amp = gausson_amplitude(g.dim(), 1.0);
  const double R = g.radius();
  Field u = sample(g, [&](const Point& x) {
    const double d = distance(x, center);
    return cutoff(norm(x) / R) * amp * std::exp(-0.5 * d * d);
  });
  EnergyParams p = params;
  p.eps = eps;
  const Functional J(g, p);
  u *= J.nehari_scale(u);
  const Point q = q_eps(u, eps, BarycenterParams{config.localization.R0}, g);
  if (!region_of(q, config.localization, wells).interior_of(i)) {
    throw Error(ErrorCode::SeedOutsideRegion,
                "seed barycenter (" + format_shortest(q[0]) + ", " + format_shortest(q[1]) +
                    ") is not inside the ball around well " + std::to_string(i + 1));
  }
  return u;
}

/// Nehari-projected descent confined to the region around well i.
///
/// Each step takes u - τ r with r the L^2 gradient (strong residual), folds
/// the result to |·| (the discrete Dirichlet form does not increase under
/// |·|, so the Nehari level does not either) and rescales it onto the Nehari
/// set. τ starts from a Barzilai-Borwein estimate and is halved until the
/// level decreases and the barycenter stays strictly inside B_rho0(z_i).
inline SolveResult minimize_localized(const Field& seed, std::size_t i, double eps, const EnergyParams& params,
                                      const SolverConfig& config, std::shared_ptr<const Grid> grid) {
  const Grid& g = *grid;
  EnergyParams p = params;
  p.eps = eps;
  const Functional J(g, p);
  const BarycenterParams bary{config.localization.R0};
  const std::vector<Point> wells = detail::localization_wells(params);
  const StepRule& rule = config.step;

  SolveResult res;
  res.grid = grid;
  res.well_index = i;
  res.R_final = g.radius();

  auto take_abs = [&](Field& u) {
    for (std::size_t j = 0; j < g.size(); ++j) u[j] = g.interior(j) ? std::abs(u[j]) : 0.0;
  };

  Field start = seed;
  take_abs(start);
  detail::Projected cur = detail::project(J, std::move(start));
  Point q = q_eps(cur.u, eps, bary, g);
  Field r = J.residual(cur.u);
  double gn = detail::residual_norm(g, r);

  auto record = [&](int it, double step) {
    if (!config.record_history) return;
    IterateRecord rec;
    rec.iter = it;
    rec.level = cur.e.total;
    rec.nehari_res = J.nehari_residual(cur.u).residual;
    rec.grad_norm = gn;
    rec.barycenter = q;
    rec.step = step;
    rec.log_sobolev_gap = log_sobolev_gap(cur.u, g);
    res.min_log_sobolev_gap = std::min(res.min_log_sobolev_gap, rec.log_sobolev_gap);
    res.history.push_back(rec);
  };

  auto finish = [&](SolveStatus status, int iters) {
    res.u = std::move(cur.u);
    res.level = cur.e.total;
    res.mass = cur.e.mass;
    res.barycenter = q;
    const NehariResidual nr = J.nehari_residual(res.u);
    res.nehari_res = nr.residual;
    res.level_gap = nr.level_gap;
    res.grad_norm = gn;
    res.iterations = iters;
    res.positivity = check_positivity(g, res.u);
    res.min_log_sobolev_gap = std::min(res.min_log_sobolev_gap, log_sobolev_gap(res.u, g));
    res.status = status;
    return res;
  };

  if (!region_of(q, config.localization, wells).interior_of(i)) {
    res.note = "seed is not inside the localization ball";
    return finish(SolveStatus::BoundaryHit, 0);
  }
  record(0, 0.0);

  Field prev_u;
  Field prev_r;
  double tau = rule.initial;
  int pinned = 0;
  for (int it = 0; it < config.max_iters; ++it) {
    if (gn <= config.grad_tol && J.nehari_residual(cur.u).residual <= config.nehari_tol) {
      return finish(SolveStatus::Converged, it);
    }
    if (it > 0) {
      double ss = 0.0;
      double sy = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double w = g.weight(j);
        const double s = cur.u[j] - prev_u[j];
        ss += w * s * s;
        sy += w * s * (r[j] - prev_r[j]);
      }
      tau = sy > 0.0 ? ss / sy : rule.max_step;
    }
    tau = std::clamp(tau, rule.min_step, rule.max_step);

    bool accepted = false;
    bool blocked = false;
    detail::Projected next;
    Point q_next{};
    for (int k = 0; k <= rule.max_halvings; ++k) {
      Field trial = cur.u;
      for (std::size_t j = 0; j < g.size(); ++j) trial[j] -= tau * r[j];
      take_abs(trial);
      next = detail::project(J, std::move(trial));
      if (J.energy_difference(next.u, cur.u) <= 0.0) {
        q_next = q_eps(next.u, eps, bary, g);
        if (region_of(q_next, config.localization, wells).interior_of(i)) {
          accepted = true;
          break;
        }
        blocked = true;
        ++res.localization_rejections;
      }
      tau *= rule.backtrack;
    }
    if (!accepted) {
      res.note = blocked ? "no admissible step keeps the barycenter inside the region"
                         : "line search stalled before reaching grad_tol";
      return finish(blocked ? SolveStatus::BoundaryHit : SolveStatus::IterationCap, it);
    }
    pinned = blocked ? pinned + 1 : 0;
    prev_u = std::move(cur.u);
    prev_r = std::move(r);
    cur = std::move(next);
    q = q_next;
    r = J.residual(cur.u);
    gn = detail::residual_norm(g, r);
    record(it + 1, tau);
    if (pinned >= config.boundary_patience) {
      res.note = "barycenter pinned against the region boundary";
      return finish(SolveStatus::BoundaryHit, it + 1);
    }
  }
  res.note = "iteration cap reached";
  return finish(SolveStatus::IterationCap, config.max_iters);
}

inline SolveResult minimize_localized(const Field& seed, std::size_t i, double eps, const EnergyParams& params,
                                      const SolverConfig& config, const Grid& g) {
  return minimize_localized(seed, i, eps, params, config, std::make_shared<const Grid>(g));
}

/// Zero-extends a converged result through the remaining entries of the R
/// schedule, re-minimizing on each larger domain, until the level moves by
/// at most grad_tol and the barycenter by at most 1e-4.
inline SolveResult continue_in_R(SolveResult result, double eps, const EnergyParams& params,
                                 const SolverConfig& config) {
  if (result.R_visited.empty()) {
    result.R_visited.push_back(result.R_final);
    result.level_by_R.push_back(result.level);
  }
  if (result.status != SolveStatus::Converged) return result;
  for (double R : config.R_schedule) {
    if (R <= result.R_final) continue;
    auto g_new = std::make_shared<const Grid>(build_grid(result.grid->dim(), R, result.grid->spacing()));
    const Field extended = zero_extend(result.u, *result.grid, *g_new);
    SolveResult next = minimize_localized(extended, result.well_index, eps, params, config, g_new);
    next.iterations += result.iterations;
    next.localization_rejections += result.localization_rejections;
    next.min_log_sobolev_gap = std::min(next.min_log_sobolev_gap, result.min_log_sobolev_gap);
    if (config.record_history) {
      std::vector<IterateRecord> merged = std::move(result.history);
      merged.insert(merged.end(), next.history.begin(), next.history.end());
      next.history = std::move(merged);
    }
    next.R_visited = std::move(result.R_visited);
    next.level_by_R = std::move(result.level_by_R);
    next.R_visited.push_back(R);
    next.level_by_R.push_back(next.level);
    next.continuation_gap = std::abs(next.level - result.level);
    const double dq = distance(next.barycenter, result.barycenter);
    result = std::move(next);
    if (result.status != SolveStatus::Converged) return result;
    if (result.continuation_gap <= config.grad_tol && dq <= 1e-4) {
      result.continuation_stable = true;
      return result;
    }
  }
  if (!result.continuation_stable && result.R_visited.size() == 1) {
    result.note = "R schedule has no entry beyond the initial radius";
  } else if (!result.continuation_stable) {
    result.note = "R schedule exhausted before the level stabilized (gap " +
                  format_shortest(result.continuation_gap) + ")";
  }
  return result;
}

/// Ground-state level of the constant-coefficient problem -Δu + ωu = u log u^2
/// on g, minimized from the Gausson seed.
inline SolveResult ground_state(double omega, const Grid& g, const SolverConfig& config) {
  EnergyParams params = EnergyParams::constant(omega);
  SolverConfig cfg = config;
  cfg.localization = WellGeometry{g.radius(), 2.0 * g.radius()};
  const Field seed = gausson(g, omega);
  return minimize_localized(seed, 0, 1.0, params, cfg, g);
}

inline double ground_level(double omega, const Grid& g, const SolverConfig& config) {
  const SolveResult r = ground_state(omega, g, config);
  if (r.status != SolveStatus::Converged) {
    throw Error(ErrorCode::NotConverged,
                std::string("ground-state solve did not converge: ") + to_string(r.status));
  }
  return r.level;
}

/// Discretization and physical setup of a multiplicity run.
struct Problem {
  int dim = 1;
  double h = 0.05;
  /// Radius of the grid used for the constant-coefficient levels c0, c_inf.
  double ground_radius = 10.0;
  EnergyParams params;  // params.potential must be set; params.eps is ε
};

struct MultiplicityRun {
  double c0 = 0.0;
  double c_inf = 0.0;
  double gamma = 0.0;
  std::vector<SolveResult> results;  // one per well, in well order
  std::vector<std::string> failures;
  bool all_converged = false;
};

/// Original-coordinate field v(x) = u(x/ε): same nodal values on the grid
/// scaled by ε.
struct RescaledField {
  Grid grid;
  Field v;
};

inline RescaledField rescale_to_original(const SolveResult& r, double eps) {
  const Grid& g = *r.grid;
  Grid scaled = build_grid(g.dim(), eps * g.radius(), eps * g.spacing());
  std::vector<double> values(r.u.values().begin(), r.u.values().end());
  Field v(scaled, std::move(values));
  return {std::move(scaled), std::move(v)};
}

inline void validate_schedule(const SolverConfig& config) {
  if (config.R_schedule.empty()) throw Error(ErrorCode::InvalidConfig, "R_schedule is empty");
  for (std::size_t k = 1; k < config.R_schedule.size(); ++k) {
    if (!(config.R_schedule[k] > config.R_schedule[k - 1])) {
      throw Error(ErrorCode::InvalidConfig, "R_schedule must be strictly increasing");
    }
  }
  if (!(config.R_schedule.front() > config.localization.R0)) {
    throw Error(ErrorCode::InvalidConfig, "first R_schedule entry must exceed R0");
  }
}

/// Seeds, minimizes and continues one solution per well. Wells are solved
/// independently, on up to `jobs` threads; results are returned in well order.
inline MultiplicityRun solve_multiplicity(const Problem& problem, const SolverConfig& config, unsigned jobs = 1) {
  if (!problem.params.potential) throw Error(ErrorCode::InvalidConfig, "multiplicity run needs a potential");
  problem.params.validate();
  validate_schedule(config);
  const PotentialSpec& V = *problem.params.potential;
  const double eps = problem.params.eps;

  MultiplicityRun run;
  const Grid ground_grid = build_grid(problem.dim, problem.ground_radius, problem.h);
  run.c0 = ground_level(1.0, ground_grid, config);
  run.c_inf = ground_level(V.v_inf(), ground_grid, config);
  run.gamma = config.gamma.value_or(0.25 * (run.c_inf - run.c0));
  if (config.gamma && !(*config.gamma < 0.5 * (run.c_inf - run.c0))) {
    throw Error(ErrorCode::InvalidConfig, "gamma must lie in (0, (c_inf - c0)/2) = (0, " +
                                              format_shortest(0.5 * (run.c_inf - run.c0)) + ")");
  }

  const std::size_t l = V.count();
  run.results.resize(l);
  auto solve_one = [&](std::size_t i) {
    try {
      auto g = std::make_shared<const Grid>(build_grid(problem.dim, config.R_schedule.front(), problem.h));
      const Field seed = seed_well(i, eps, problem.params, config, *g);
      SolveResult r = minimize_localized(seed, i, eps, problem.params, config, g);
      r = continue_in_R(std::move(r), eps, problem.params, config);
      if (r.status == SolveStatus::Converged) {
        EnergyParams p = problem.params;
        p.eps = eps;
        const Functional J(*r.grid, p);
        r.weak_res = weak_residual(r.u, J, support_probes(*r.grid, r.u, config.probes, config.probe_seed + i))
                         .normalized;
      }
      run.results[i] = std::move(r);
    } catch (const Error& e) {
      SolveResult r;
      r.well_index = i;
      r.status = SolveStatus::SeedFailed;
      r.note = e.what();
      run.results[i] = std::move(r);
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(l)));
  if (workers == 1) {
    for (std::size_t i = 0; i < l; ++i) solve_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < l; i = next++) solve_one(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  run.all_converged = true;
  for (std::size_t i = 0; i < l; ++i) {
    const SolveResult& r = run.results[i];
    if (r.status != SolveStatus::Converged) {
      run.all_converged = false;
      run.failures.push_back("well " + std::to_string(i + 1) + ": " + to_string(r.status) +
                             (r.note.empty() ? "" : " (" + r.note + ")"));
    }
  }
  return run;
}

}  // namespace lse
