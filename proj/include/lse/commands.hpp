#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lse/config.hpp"
#include "lse/report.hpp"
#include "lse/solver.hpp"
#include "lse/verify.hpp"

namespace lse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct CommandOptions {
  unsigned jobs = 1;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

/// Applies command-line overrides on top of a parsed config.
inline RunConfig apply_overrides(RunConfig cfg, const CommandOptions& opt) {
  if (opt.out_dir) cfg.outputs.dir = *opt.out_dir;
  if (opt.seed) {
    cfg.rng_seed = *opt.seed;
    cfg.solver.probe_seed = *opt.seed;
  }
  if (opt.verbose) cfg.outputs.verbosity = std::max(cfg.outputs.verbosity, 2);
  return cfg;
}

/// Checks the potential's hypotheses on the physical grid covered by the
/// largest truncation radius. Throws InvalidConfig on a violation.
inline void validate_potential(const RunConfig& cfg, std::ostream& log) {
  const PotentialSpec& V = *cfg.problem.params.potential;
  const double eps = cfg.problem.params.eps;
  const Grid phys = build_grid(cfg.problem.dim, eps * cfg.solver.R_schedule.back(), eps * cfg.problem.h);
  const ValidationReport rep = validate(V, cfg.solver.localization, phys);
  for (const std::string& m : rep.messages) {
    if (!rep.ok() || cfg.outputs.verbosity >= 2) log << "potential: " << m << '\n';
  }
  if (!rep.ok()) throw Error(ErrorCode::InvalidConfig, "potential fails its hypotheses on the grid");
}

struct SolveOutcome {
  MultiplicityRun run;
  VerificationReport report;
  int exit_code = kExitFailure;
};

/// Runs the multiplicity pipeline and its audit without touching the filesystem.
inline SolveOutcome solve_and_audit(const RunConfig& cfg, unsigned jobs) {
  SolveOutcome out;
  out.run = solve_multiplicity(cfg.problem, cfg.solver, jobs);
  out.report = audit(out.run, cfg.problem, cfg.solver);
  out.exit_code = out.report.status();
  return out;
}

/// Writes levels.csv, report.json and the field dumps. All writes happen here,
/// after every solve has finished.
inline void write_solve_outputs(const RunConfig& cfg, const SolveOutcome& o) {
  namespace fs = std::filesystem;
  const fs::path dir(cfg.outputs.dir);
  fs::create_directories(dir);
  const int dim = cfg.problem.dim;
  {
    std::ofstream os(dir / "levels.csv");
    write_levels_csv(os, o.report, o.run.results, dim);
  }
  {
    std::ofstream os(dir / "report.json");
    os << report_json(o.report, dim).dump(2) << '\n';
  }
  for (const SolveResult& r : o.run.results) {
    if (!r.grid || r.u.size() == 0) continue;
    const std::string tag = std::to_string(r.well_index + 1);
    if (cfg.outputs.dump_fields) {
      fs::create_directories(dir / "fields");
      write_field_csv((dir / "fields" / ("u_well" + tag + ".csv")).string(), *r.grid, r.u);
      const RescaledField v = rescale_to_original(r, cfg.problem.params.eps);
      write_field_csv((dir / "fields" / ("v_well" + tag + ".csv")).string(), v.grid, v.v);
    }
    if (cfg.outputs.log_iterations) {
      fs::create_directories(dir / "history");
      std::ofstream os(dir / "history" / ("well" + tag + ".csv"));
      write_history_csv(os, r, dim);
    }
  }
}

inline void print_summary(const SolveOutcome& o, std::ostream& log) {
  const VerificationReport& rep = o.report;
  log << "eps " << format_shortest(rep.eps) << ": c0 = " << format_shortest(rep.c0)
      << ", c_inf = " << format_shortest(rep.c_inf) << ", gamma = " << format_shortest(rep.gamma) << '\n';
  for (const WellAudit& w : rep.wells) {
    log << "  well " << w.well + 1 << ": " << to_string(w.status) << ", level " << format_shortest(w.level)
        << ", |Q - z| " << format_shortest(w.distance_to_well) << " (" << to_string(w.region.kind) << ")\n";
  }
  for (const std::string& f : rep.failures) log << "  failure: " << f << '\n';
  log << (rep.passed() ? "PASS" : "FAIL") << '\n';
}

inline int cmd_solve(const RunConfig& base, const CommandOptions& opt, std::ostream& log) {
  const RunConfig cfg = apply_overrides(base, opt);
  try {
    validate_potential(cfg, log);
    const SolveOutcome o = solve_and_audit(cfg, opt.jobs);
    write_solve_outputs(cfg, o);
    if (cfg.outputs.verbosity >= 1) print_summary(o, log);
    return o.exit_code;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidConfig ? kExitUsage : kExitFailure;
  }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

inline int cmd_verify(const SuiteOptions& suite, bool verbose, std::ostream& log) {
  const std::vector<SuiteCheck> checks = run_identity_suite(suite);
  bool all = true;
  for (const SuiteCheck& c : checks) {
    all = all && c.pass;
    log << (c.pass ? "PASS  " : "FAIL  ") << c.name;
    if (verbose || !c.pass) {
      log << "  [samples " << c.samples << ", failures " << c.failures << ", worst " << format_shortest(c.worst)
          << ", tolerance " << format_shortest(c.tolerance) << ", " << std::fixed << std::setprecision(2)
          << c.seconds << " s" << std::defaultfloat << ']';
      if (!c.detail.empty()) log << "  " << c.detail;
    }
    log << '\n';
  }
  log << (all ? "all checks passed" : "some checks failed") << '\n';
  return all ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepRow {
  double eps = 0.0;
  std::size_t well = 0;  // 0-based
  double level = 0.0;
  double distance = 0.0;  // |Q_eps - z_i|
  SolveStatus status = SolveStatus::IterationCap;
  bool separation_ok = false;
};

struct SweepResult {
  std::vector<double> eps;
  std::vector<SolveOutcome> outcomes;  // one per eps
  std::vector<SweepRow> rows;
  /// Largest swept eps from which every smaller swept eps has all wells Converged.
  std::optional<double> onset;
  bool trend_ok = true;
  std::vector<std::string> trend_violations;
};

/// |Q_eps - z_i| must not grow as eps decreases, for wells Converged at both
/// consecutive eps. Differences below the barycenter resolution band are ties.
inline void check_trend(SweepResult& s) {
  s.trend_ok = true;
  s.trend_violations.clear();
  for (std::size_t k = 1; k < s.outcomes.size(); ++k) {
    const auto& prev = s.outcomes[k - 1].report.wells;
    const auto& cur = s.outcomes[k].report.wells;
    for (std::size_t i = 0; i < std::min(prev.size(), cur.size()); ++i) {
      if (prev[i].status != SolveStatus::Converged || cur[i].status != SolveStatus::Converged) continue;
      if (cur[i].distance_to_well > prev[i].distance_to_well + kBoundaryBand) {
        s.trend_ok = false;
        s.trend_violations.push_back("well " + std::to_string(i + 1) + ": |Q - z| grows from " +
                                     format_shortest(prev[i].distance_to_well) + " at eps " +
                                     format_shortest(s.eps[k - 1]) + " to " +
                                     format_shortest(cur[i].distance_to_well) + " at eps " +
                                     format_shortest(s.eps[k]));
      }
    }
  }
}

inline void validate_sweep_list(const std::vector<double>& eps) {
  if (eps.empty()) throw Error(ErrorCode::InvalidConfig, "sweep needs a nonempty eps list");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) throw Error(ErrorCode::InvalidConfig, "sweep eps values must be positive");
    if (k > 0 && !(eps[k] < eps[k - 1])) {
      throw Error(ErrorCode::InvalidConfig, "sweep eps list must be strictly decreasing");
    }
  }
}

/// One multiplicity run per eps. Throws InvalidConfig before solving anything
/// if the list or any per-eps potential check is invalid.
inline SweepResult run_sweep(const RunConfig& base, const std::vector<double>& eps, unsigned jobs,
                             std::ostream& log) {
  validate_sweep_list(eps);
  std::vector<RunConfig> configs;
  for (double e : eps) {
    RunConfig cfg = base;
    cfg.problem.params.eps = e;
    validate_potential(cfg, log);
    configs.push_back(std::move(cfg));
  }
  SweepResult s;
  s.eps = eps;
  for (const RunConfig& cfg : configs) {
    s.outcomes.push_back(solve_and_audit(cfg, jobs));
    const SolveOutcome& o = s.outcomes.back();
    if (cfg.outputs.verbosity >= 1) print_summary(o, log);
    for (const WellAudit& w : o.report.wells) {
      s.rows.push_back({cfg.problem.params.eps, w.well, w.level, w.distance_to_well, w.status, w.separation_ok});
    }
  }
  for (std::size_t k = s.outcomes.size(); k-- > 0;) {
    if (!s.outcomes[k].run.all_converged) break;
    s.onset = s.eps[k];
  }
  check_trend(s);
  return s;
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& s) {
  os << "eps,well,level,distance_to_well,status,separation_ok\n";
  for (const SweepRow& r : s.rows) {
    os << format_shortest(r.eps) << ',' << r.well + 1 << ',' << format_shortest(r.level) << ','
       << format_shortest(r.distance) << ',' << to_string(r.status) << ',' << (r.separation_ok ? "true" : "false")
       << '\n';
  }
}

inline int sweep_exit_code(const SweepResult& s) {
  bool ok = s.trend_ok;
  for (const SolveOutcome& o : s.outcomes) ok = ok && o.report.passed();
  return ok ? kExitOk : kExitFailure;
}

inline int cmd_sweep(const RunConfig& base, std::vector<double> eps, const CommandOptions& opt, std::ostream& log) {
  const RunConfig cfg = apply_overrides(base, opt);
  if (eps.empty()) eps = cfg.sweep_eps;
  try {
    const SweepResult s = run_sweep(cfg, eps, opt.jobs, log);
    std::filesystem::create_directories(cfg.outputs.dir);
    std::ofstream os(std::filesystem::path(cfg.outputs.dir) / "sweep.csv");
    write_sweep_csv(os, s);
    if (s.onset) {
      log << "localization onset: all wells Converged for every swept eps <= " << format_shortest(*s.onset) << '\n';
    } else {
      log << "localization onset: not reached at the smallest swept eps\n";
    }
    for (const std::string& v : s.trend_violations) log << "trend violation: " << v << '\n';
    return sweep_exit_code(s);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidConfig ? kExitUsage : kExitFailure;
  }
}

}  // namespace lse
