#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "lse/barycenter.hpp"
#include "lse/energy.hpp"
#include "lse/grid.hpp"
#include "lse/potential.hpp"
#include "lse/solver.hpp"
#include "lse/weak_form.hpp"

namespace lse {

/// Minimum relative L^2 distance for two solutions to count as distinct.
inline constexpr double kDistinctL2 = 1e-2;

// ---------------------------------------------------------------------------
// Random test fields
// ---------------------------------------------------------------------------

/// Sum of 1-4 Gaussian bumps with widths in [0.7, 2], centers at least three
/// widths inside the domain, signed amplitudes in [0.2, 3]. Boundary nodes 0.
inline Field random_smooth_field(const Grid& g, std::mt19937_64& rng, bool positive = false) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int bumps = 1 + static_cast<int>(unit(rng) * 4.0);
  struct Bump {
    Point c;
    double sigma;
    double amp;
  };
  std::vector<Bump> list;
  for (int b = 0; b < bumps; ++b) {
    Bump bump;
    bump.sigma = 0.7 + 1.3 * unit(rng);
    const double span = std::max(0.0, g.radius() - 3.0 * bump.sigma);
    bump.c = {span * (2.0 * unit(rng) - 1.0), g.dim() == 2 ? span * (2.0 * unit(rng) - 1.0) : 0.0};
    bump.amp = 0.2 + 2.8 * unit(rng);
    if (!positive && unit(rng) < 0.3) bump.amp = -bump.amp;
    list.push_back(bump);
  }
  return sample(g, [&](const Point& x) {
    double v = 0.0;
    for (const Bump& b : list) {
      const double d = distance(x, b.c);
      v += b.amp * std::exp(-0.5 * d * d / (b.sigma * b.sigma));
    }
    return v;
  });
}

/// v = u * rho with rho a smooth random modulation, |rho| <= 1. Keeps u + t v
/// sign-definite wherever u is, for |t| < 1.
inline Field random_modulation(const Grid& g, const Field& u, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double k0 = 0.2 + 0.8 * unit(rng);
  const double k1 = 0.2 + 0.8 * unit(rng);
  const double ph0 = 2.0 * std::numbers::pi * unit(rng);
  const double ph1 = 2.0 * std::numbers::pi * unit(rng);
  Field v(g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const Point& x = g.node(j);
    const double rho = 0.5 * std::sin(k0 * x[0] + ph0) + 0.5 * std::cos(k1 * x[1] + ph1);
    v[j] = u[j] * rho;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Identity suite
// ---------------------------------------------------------------------------

struct SuiteCheck {
  std::string name;
  bool pass = false;
  std::size_t samples = 0;
  std::size_t failures = 0;
  double worst = 0.0;      // worst observed margin (meaning is per check)
  double tolerance = 0.0;  // the threshold the margin is compared against
  std::string detail;
  double seconds = 0.0;
};

using SplitFn = std::function<FSplit(double, double)>;

struct SuiteOptions {
  std::size_t split_samples = 1'000'000;
  std::size_t random_fields = 100;
  std::size_t gradient_fields = 20;
  std::uint64_t seed = 7;
  double delta = kDefaultDelta;
  /// Splitting under test; replaced by fixtures that corrupt a branch.
  SplitFn split = [](double s, double delta) { return f_split(s, delta); };
  bool include_solves = true;
};

namespace detail {

template <class F>
SuiteCheck timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteCheck c = f();
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

inline double rel_err(double a, double b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); }

}  // namespace detail

/// F2 - F1 = 1/2 s^2 log s^2 on uniform samples in [-1e3, 1e3]. The error is
/// relative to |F1| + |F2| + |1/2 s^2 log s^2|, the magnitude the floating
/// point difference is formed from.
inline SuiteCheck check_splitting_identity(const SuiteOptions& opt) {
  SuiteCheck c;
  c.name = "splitting identity F2 - F1 = s^2 log s^2 / 2";
  c.tolerance = 1e-10;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> dist(-1e3, 1e3);
  for (std::size_t k = 0; k < opt.split_samples; ++k) {
    const double s = dist(rng);
    const FSplit f = opt.split(s, opt.delta);
    const double target = 0.5 * s2_log_s2(s);
    const double err = detail::rel_err(f.f2 - f.f1, target, std::abs(f.f1) + std::abs(f.f2) + std::abs(target));
    c.worst = std::max(c.worst, err);
    if (!(err <= c.tolerance)) ++c.failures;
    ++c.samples;
  }
  c.pass = c.failures == 0;
  return c;
}

/// Values and derivatives of F1, F2 agree across |s| = delta.
inline SuiteCheck check_seam(const SuiteOptions& opt) {
  SuiteCheck c;
  c.name = "C1 seam of F1/F2 at |s| = delta";
  c.tolerance = 1e-13;
  for (double delta : {opt.delta, kDeltaCap, 0.1, 0.05, 0.01}) {
    for (double sign : {1.0, -1.0}) {
      const double s = sign * delta;
      const double below = std::nextafter(s, 0.0);
      const FSplit at = opt.split(s, delta);
      const FSplit in = opt.split(below, delta);
      // The inner branch evaluated one ulp inside; differences are O(ulp).
      for (double e : {std::abs(at.f1 - in.f1), std::abs(at.f2 - in.f2), std::abs(at.df1 - in.df1),
                       std::abs(at.df2 - in.df2)}) {
        c.worst = std::max(c.worst, e);
        if (!(e <= c.tolerance)) ++c.failures;
        ++c.samples;
      }
      const double expected_df1 = -s_log_s2(s) - s;
      const double e = std::abs(at.df1 - expected_df1);
      c.worst = std::max(c.worst, e);
      if (!(e <= c.tolerance)) ++c.failures;
      ++c.samples;
    }
  }
  c.pass = c.failures == 0;
  return c;
}

/// F1 >= 0, F1'(s) s >= 0, F1 even, F1 convex (nonnegative second differences).
inline SuiteCheck check_f1_properties(const SuiteOptions& opt) {
  SuiteCheck c;
  c.name = "F1 >= 0, F1'(s)s >= 0, even, convex";
  c.tolerance = 0.0;
  std::mt19937_64 rng(opt.seed + 1);
  std::uniform_real_distribution<double> dist(-1e3, 1e3);
  std::uniform_real_distribution<double> near(-1.0, 1.0);
  const std::size_t n = std::max<std::size_t>(opt.split_samples / 10, 1000);
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = (k % 2 == 0) ? dist(rng) : near(rng);
    const FSplit f = opt.split(s, opt.delta);
    const FSplit m = opt.split(-s, opt.delta);
    worst = std::min({worst, f.f1, f.df1 * s});
    if (f.f1 < 0.0 || f.df1 * s < 0.0 || std::abs(f.f1 - m.f1) > 1e-15 * std::abs(f.f1)) ++c.failures;
    ++c.samples;
  }
  // Convexity on a dense grid through the seam; second differences are
  // compared to the rounding floor of the three evaluations.
  const double step = 1e-4;
  for (double s = -1.0; s <= 1.0; s += step) {
    const double a = opt.split(s - step, opt.delta).f1;
    const double b = opt.split(s, opt.delta).f1;
    const double d = opt.split(s + step, opt.delta).f1;
    const double second = a - 2.0 * b + d;
    const double floor = 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(a) + std::abs(b) + std::abs(d));
    if (second < -floor) ++c.failures;
    ++c.samples;
  }
  c.worst = worst;
  c.pass = c.failures == 0;
  return c;
}

/// The double-well test problem the field checks run on.
inline EnergyParams suite_params(double delta = kDefaultDelta) {
  EnergyParams p;
  p.eps = 0.1;
  p.delta = delta;
  p.potential = make_multiwell({{0.0, 0.0}, {2.0, 0.0}}, 2.0, 0.25);
  return p;
}

/// J(su) = s^2 [J(u) - log s ∫u^2] for s in {1/2, e, 10}.
inline SuiteCheck check_scaling_identity(const SuiteOptions& opt) {
  SuiteCheck c;
  c.name = "scaling identity J(su) = s^2 (J(u) - log s |u|^2)";
  c.tolerance = 1e-10;
  const Grid g = build_grid(1, 30.0, 0.05);
  const Grid g2 = build_grid(2, 6.0, 0.2);
  const EnergyParams p = suite_params(opt.delta);
  const Functional J1(g, p);
  const Functional J2(g2, p);
  std::mt19937_64 rng(opt.seed + 2);
  for (std::size_t k = 0; k < opt.random_fields; ++k) {
    const Functional& J = (k % 4 == 3) ? J2 : J1;
    const Field u = random_smooth_field(J.grid(), rng);
    const EnergyBreakdown e = J.energy(u);
    for (double s : {0.5, std::numbers::e, 10.0}) {
      const double lhs = J.energy(s * u).total;
      const double rhs = s * s * (e.total - std::log(s) * e.mass);
      const double scale = s * s * (std::abs(e.total) + std::abs(std::log(s)) * e.mass);
      const double err = detail::rel_err(lhs, rhs, scale);
      c.worst = std::max(c.worst, err);
      if (!(err <= c.tolerance)) ++c.failures;
      ++c.samples;
    }
  }
  c.pass = c.failures == 0;
  return c;
}

/// nehari_scale(s* u) = 1 and J = 1/2 ∫u^2 after projection.
inline SuiteCheck check_nehari_idempotence(const SuiteOptions& opt) {
  SuiteCheck c;
  c.name = "Nehari projection idempotence";
  c.tolerance = 1e-12;
  const Grid g = build_grid(1, 30.0, 0.05);
  const Functional J(g, suite_params(opt.delta));
  std::mt19937_64 rng(opt.seed + 3);
  for (std::size_t k = 0; k < opt.random_fields; ++k) {
    const Field u = random_smooth_field(g, rng);
    const Field v = nehari_project(J, u);
    const double err = std::max(std::abs(J.nehari_scale(v) - 1.0), J.nehari_residual(v).residual);
    c.worst = std::max(c.worst, err);
    if (!(err <= c.tolerance)) ++c.failures;
    ++c.samples;
  }
  c.pass = c.failures == 0;
  return c;
}

/// Log-Sobolev gap with a^2/π = 1/4 on random fields, >= -1e-8.
inline SuiteCheck check_log_sobolev(const SuiteOptions& opt) {
  SuiteCheck c;
  c.name = "log-Sobolev inequality (a^2/pi = 1/4)";
  c.tolerance = -1e-8;
  const Grid g = build_grid(1, 15.0, 0.025);
  const Grid g2 = build_grid(2, 8.0, 0.1);
  std::mt19937_64 rng(opt.seed + 4);
  c.worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < opt.random_fields; ++k) {
    const Grid& gg = (k % 4 == 3) ? g2 : g;
    const Field u = random_smooth_field(gg, rng);
    const double gap = log_sobolev_gap(u, gg);
    c.worst = std::min(c.worst, gap);
    if (!(gap >= c.tolerance)) ++c.failures;
    ++c.samples;
  }
  c.pass = c.failures == 0;
  return c;
}

/// |F2'(s)| <= C |s|^{p-1} with a finite, uniform C for p = 3.
inline SuiteCheck check_f2_growth(const SuiteOptions& opt) {
  SuiteCheck c;
  c.name = "F2' growth bound (p = 3)";
  EnergyParams p;
  p.delta = opt.delta;
  p.p = 3.0;
  const std::vector<double> s = log_samples(opt.delta / 10.0, 1e3, 2000);
  const GrowthFit fit = f2_growth_check(p, s);
  c.samples = s.size();
  c.worst = fit.C;
  c.pass = std::isfinite(fit.C) && fit.uniform;
  c.failures = c.pass ? 0 : 1;
  c.detail = "C = " + format_shortest(fit.C);
  return c;
}

/// Central differences of J along random directions converge at order >= 1.8
/// in t for t in {1e-2, 5e-3, 2.5e-3}.
inline SuiteCheck check_gradient_consistency(const SuiteOptions& opt) {
  SuiteCheck c;
  c.name = "gradient consistency (central-difference order)";
  c.tolerance = 1.8;
  const Grid g = build_grid(1, 30.0, 0.05);
  const Functional J(g, suite_params(opt.delta));
  std::mt19937_64 rng(opt.seed + 5);
  c.worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < opt.gradient_fields; ++k) {
    const Field u = random_smooth_field(g, rng, true);
    const Field v = random_modulation(g, u, rng);
    const Field grad = J.gradient(u);
    double exact = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) exact += grad[j] * v[j];
    std::vector<double> err;
    for (double t : {1e-2, 5e-3, 2.5e-3}) {
      Field plus = u;
      Field minus = u;
      for (std::size_t j = 0; j < g.size(); ++j) {
        plus[j] += t * v[j];
        minus[j] -= t * v[j];
      }
      err.push_back(std::abs(exact - J.energy_difference(plus, minus) / (2.0 * t)));
    }
    for (std::size_t m = 0; m + 1 < err.size(); ++m) {
      const double order = std::log2(err[m] / err[m + 1]);
      c.worst = std::min(c.worst, order);
      if (!(order >= c.tolerance)) ++c.failures;
      ++c.samples;
    }
  }
  c.pass = c.failures == 0;
  return c;
}

/// The exact Gausson solves the discrete problem up to O(h^2): weak residual
/// <= 1e-3 at h = 0.01.
inline SuiteCheck check_gausson_residual() {
  SuiteCheck c;
  c.name = "Gausson weak-form residual (1D, h = 0.01)";
  c.tolerance = 1e-3;
  const Grid g = build_grid(1, 10.0, 0.01);
  const Functional J(g, EnergyParams::constant(1.0));
  const Field u = gausson(g, 1.0);
  const WeakResidual w = weak_residual(u, J, support_probes(g, u, 50, 11));
  c.worst = w.normalized;
  c.samples = w.probes;
  c.pass = w.normalized <= c.tolerance;
  c.failures = c.pass ? 0 : 1;
  return c;
}

/// c0 < c_inf from two constant-coefficient solves (1D, V = 1 and V = 2).
inline SuiteCheck check_level_gap() {
  SuiteCheck c;
  c.name = "ground-level gap c0 < c_inf";
  const Grid g = build_grid(1, 10.0, 0.05);
  SolverConfig cfg;
  const double c0 = ground_level(1.0, g, cfg);
  const double c_inf = ground_level(2.0, g, cfg);
  c.samples = 2;
  c.worst = c_inf - c0;
  c.pass = c0 < c_inf;
  c.failures = c.pass ? 0 : 1;
  c.detail = "c0 = " + format_shortest(c0) + ", c_inf = " + format_shortest(c_inf);
  return c;
}

inline std::vector<SuiteCheck> run_identity_suite(const SuiteOptions& opt = {}) {
  std::vector<SuiteCheck> out;
  out.push_back(detail::timed([&] { return check_splitting_identity(opt); }));
  out.push_back(detail::timed([&] { return check_seam(opt); }));
  out.push_back(detail::timed([&] { return check_f1_properties(opt); }));
  out.push_back(detail::timed([&] { return check_f2_growth(opt); }));
  out.push_back(detail::timed([&] { return check_scaling_identity(opt); }));
  out.push_back(detail::timed([&] { return check_nehari_idempotence(opt); }));
  out.push_back(detail::timed([&] { return check_log_sobolev(opt); }));
  out.push_back(detail::timed([&] { return check_gradient_consistency(opt); }));
  if (opt.include_solves) {
    out.push_back(detail::timed([&] { return check_gausson_residual(); }));
    out.push_back(detail::timed([&] { return check_level_gap(); }));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Audit
// ---------------------------------------------------------------------------

struct WellAudit {
  std::size_t well = 0;  // 0-based
  SolveStatus status = SolveStatus::IterationCap;
  double level = 0.0;
  Point barycenter{0.0, 0.0};
  double distance_to_well = 0.0;
  Region region;
  double weak_res = 0.0;
  double nehari_res = 0.0;
  double level_gap = 0.0;
  double grad_norm = 0.0;
  double R_final = 0.0;
  Positivity positivity;
  bool nehari_ok = false;
  bool separation_ok = false;  // level < c0 + gamma
  bool localized = false;      // barycenter Interior(well)
  double log_sobolev_gap = 0.0;
  double scaling_error = 0.0;
  std::string note;
};

struct PairAudit {
  std::size_t i = 0;
  std::size_t j = 0;
  bool disjoint_balls = false;
  double relative_l2 = 0.0;
  bool distinct = false;
};

struct IdentityCounts {
  std::size_t passed = 0;
  std::size_t total = 0;
  void add(bool ok) {
    ++total;
    if (ok) ++passed;
  }
  bool ok() const { return passed == total; }
};

struct AuditTolerances {
  double grad_tol = 0.0;
  double nehari_tol = 0.0;
  double distinct_l2 = kDistinctL2;
  double boundary_band = kBoundaryBand;
  double scaling_rel = 1e-10;
  double log_sobolev_floor = -1e-8;
  double split_rel = 1e-10;
  double seam_abs = 1e-13;
  double negligible_tail = kNegligibleTail;
  std::size_t probes = 0;
};

struct VerificationReport {
  static constexpr int kSchemaVersion = 1;
  double eps = 0.0;
  double c0 = 0.0;
  double c_inf = 0.0;
  double gamma = 0.0;
  std::vector<WellAudit> wells;
  std::vector<PairAudit> pairs;
  bool all_converged = false;
  bool gap_ok = false;
  bool separation_ok = false;
  bool positivity_ok = false;
  bool nehari_ok = false;
  bool distinct_ok = false;
  bool localization_ok = false;
  IdentityCounts splitting;
  IdentityCounts seam;
  IdentityCounts scaling;
  IdentityCounts log_sobolev;
  IdentityCounts f2_growth;
  AuditTolerances tolerances;
  std::vector<std::string> failures;

  /// Checks on Converged results only; statuses are reported separately.
  bool checks_pass() const {
    return gap_ok && separation_ok && positivity_ok && nehari_ok && distinct_ok && splitting.ok() &&
           seam.ok() && scaling.ok() && log_sobolev.ok() && f2_growth.ok();
  }
  bool passed() const { return all_converged && localization_ok && checks_pass(); }
  int status() const { return passed() ? 0 : 1; }
};

struct AuditContext {
  double eps = 0.0;
  EnergyParams params;
  SolverConfig config;
  double c0 = 0.0;
  double c_inf = 0.0;
  double gamma = 0.0;
};

namespace detail {

inline double relative_l2_distance(const SolveResult& a, const SolveResult& b) {
  const Grid& ga = *a.grid;
  const Grid& gb = *b.grid;
  const bool a_large = ga.radius() >= gb.radius();
  const Grid& big = a_large ? ga : gb;
  const Field ua = a_large ? a.u : zero_extend(a.u, ga, gb);
  const Field ub = a_large ? zero_extend(b.u, gb, ga) : b.u;
  double diff = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t j = 0; j < big.size(); ++j) {
    const double w = big.weight(j);
    diff += w * (ua[j] - ub[j]) * (ua[j] - ub[j]);
    na += w * ua[j] * ua[j];
    nb += w * ub[j] * ub[j];
  }
  return std::sqrt(diff / std::max({na, nb, 1e-300}));
}

}  // namespace detail

/// Post-hoc audit of a set of solver results. Pure: same inputs, same report.
inline VerificationReport audit(const std::vector<SolveResult>& results, const AuditContext& ctx) {
  VerificationReport rep;
  rep.eps = ctx.eps;
  rep.c0 = ctx.c0;
  rep.c_inf = ctx.c_inf;
  rep.gamma = ctx.gamma;
  rep.tolerances.grad_tol = ctx.config.grad_tol;
  rep.tolerances.nehari_tol = ctx.config.nehari_tol;
  rep.tolerances.probes = ctx.config.probes;
  rep.gap_ok = ctx.c0 < ctx.c_inf;
  if (!rep.gap_ok) rep.failures.push_back("c0 >= c_inf");

  const std::vector<Point> wells = detail::localization_wells(ctx.params);
  rep.all_converged = !results.empty();
  rep.separation_ok = true;
  rep.positivity_ok = true;
  rep.nehari_ok = true;
  rep.localization_ok = true;
  const double threshold = ctx.c0 + ctx.gamma;
  EnergyParams params = ctx.params;
  params.eps = ctx.eps;

  for (const SolveResult& r : results) {
    WellAudit w;
    w.well = r.well_index;
    w.status = r.status;
    w.note = r.note;
    const std::string tag = "well " + std::to_string(r.well_index + 1);
    if (r.status == SolveStatus::BoundaryHit) rep.localization_ok = false;
    if (r.status != SolveStatus::Converged) {
      rep.all_converged = false;
      rep.failures.push_back(tag + ": " + to_string(r.status) + (r.note.empty() ? "" : " (" + r.note + ")"));
    }
    if (!r.grid || r.u.size() == 0) {
      rep.localization_ok = false;
      rep.wells.push_back(w);
      continue;
    }
    const Grid& g = *r.grid;
    const Functional J(g, params);
    const EnergyBreakdown e = J.energy(r.u);
    w.level = e.total;
    w.barycenter = q_eps(r.u, ctx.eps, BarycenterParams{ctx.config.localization.R0}, g);
    w.distance_to_well = r.well_index < wells.size() ? distance(w.barycenter, wells[r.well_index]) : 0.0;
    w.region = region_of(w.barycenter, ctx.config.localization, wells);
    w.localized = w.region.interior_of(r.well_index);
    const NehariResidual nr = J.nehari_residual(r.u);
    w.nehari_res = nr.residual;
    w.level_gap = nr.level_gap;
    w.grad_norm = r.grad_norm;
    w.R_final = g.radius();
    w.weak_res = weak_residual(r.u, J, support_probes(g, r.u, ctx.config.probes,
                                                      ctx.config.probe_seed + r.well_index))
                     .normalized;
    w.positivity = check_positivity(g, r.u);
    w.nehari_ok = w.nehari_res <= ctx.config.nehari_tol && w.level_gap <= ctx.config.nehari_tol;
    w.separation_ok = w.level < threshold;

    if (!w.localized) {
      rep.localization_ok = false;
      rep.failures.push_back(tag + ": barycenter " + to_string(w.region.kind) + " (distance " +
                             format_shortest(w.distance_to_well) + ", rho0 " +
                             format_shortest(ctx.config.localization.rho0) + ")");
    }

    // Identities evaluated on the solution itself.
    w.log_sobolev_gap = log_sobolev_gap(r.u, g);
    rep.log_sobolev.add(w.log_sobolev_gap >= rep.tolerances.log_sobolev_floor);
    for (double s : {0.5, std::numbers::e, 10.0}) {
      const double lhs = J.energy(s * r.u).total;
      const double rhs = s * s * (e.total - std::log(s) * e.mass);
      const double err =
          detail::rel_err(lhs, rhs, s * s * (std::abs(e.total) + std::abs(std::log(s)) * e.mass));
      w.scaling_error = std::max(w.scaling_error, err);
      rep.scaling.add(err <= rep.tolerances.scaling_rel);
    }
    const double delta = ctx.params.delta;
    for (std::size_t j = 0; j < g.size(); j += std::max<std::size_t>(1, g.size() / 512)) {
      const double s = r.u[j];
      const FSplit f = f_split(s, delta);
      const double target = 0.5 * s2_log_s2(s);
      const double err = detail::rel_err(f.f2 - f.f1, target, std::abs(f.f1) + std::abs(f.f2) + std::abs(target));
      rep.splitting.add(err <= rep.tolerances.split_rel);
    }
    for (double sign : {1.0, -1.0}) {
      const FSplit at = f_split(sign * delta, delta);
      const FSplit in = f_split(std::nextafter(sign * delta, 0.0), delta);
      rep.seam.add(std::abs(at.f1 - in.f1) <= rep.tolerances.seam_abs &&
                   std::abs(at.df1 - in.df1) <= rep.tolerances.seam_abs &&
                   std::abs(at.f2 - in.f2) <= rep.tolerances.seam_abs &&
                   std::abs(at.df2 - in.df2) <= rep.tolerances.seam_abs);
    }
    double peak = 0.0;
    for (double x : r.u.values()) peak = std::max(peak, std::abs(x));
    if (peak > delta) {
      const GrowthFit fit = f2_growth_check(params, log_samples(delta / 10.0, std::max(1e3, peak), 400));
      rep.f2_growth.add(std::isfinite(fit.C) && fit.uniform);
    }

    if (r.status == SolveStatus::Converged) {
      if (!w.positivity.ok) {
        rep.positivity_ok = false;
        rep.failures.push_back(tag + ": positivity violated (min interior " +
                               format_shortest(w.positivity.min_interior) + ")");
      }
      if (!w.nehari_ok) {
        rep.nehari_ok = false;
        rep.failures.push_back(tag + ": off the Nehari set (residual " + format_shortest(w.nehari_res) + ")");
      }
      if (!w.separation_ok) {
        rep.separation_ok = false;
        rep.failures.push_back(tag + ": level " + format_shortest(w.level) + " >= c0 + gamma = " +
                               format_shortest(threshold));
      }
    }
    rep.wells.push_back(w);
  }

  rep.distinct_ok = true;
  for (std::size_t a = 0; a < results.size(); ++a) {
    for (std::size_t b = a + 1; b < results.size(); ++b) {
      const SolveResult& ra = results[a];
      const SolveResult& rb = results[b];
      if (ra.status != SolveStatus::Converged || rb.status != SolveStatus::Converged) continue;
      PairAudit p;
      p.i = ra.well_index;
      p.j = rb.well_index;
      const Region qa = rep.wells[a].region;
      const Region qb = rep.wells[b].region;
      p.disjoint_balls = qa.kind == RegionKind::Interior && qb.kind == RegionKind::Interior && qa.well != qb.well;
      p.relative_l2 = detail::relative_l2_distance(ra, rb);
      p.distinct = p.disjoint_balls && p.relative_l2 > kDistinctL2;
      if (!p.distinct) {
        rep.distinct_ok = false;
        rep.failures.push_back("wells " + std::to_string(p.i + 1) + " and " + std::to_string(p.j + 1) +
                               " are not distinct (relative L2 " + format_shortest(p.relative_l2) + ")");
      }
      rep.pairs.push_back(p);
    }
  }
  return rep;
}

inline VerificationReport audit(const MultiplicityRun& run, const Problem& problem, const SolverConfig& config) {
  AuditContext ctx;
  ctx.eps = problem.params.eps;
  ctx.params = problem.params;
  ctx.config = config;
  ctx.c0 = run.c0;
  ctx.c_inf = run.c_inf;
  ctx.gamma = run.gamma;
  return audit(run.results, ctx);
}

}  // namespace lse
