#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lse/energy.hpp"
#include "lse/error.hpp"
#include "lse/potential.hpp"
#include "lse/solver.hpp"

namespace lse {

struct OutputOptions {
  std::string dir = "out";
  bool dump_fields = true;
  bool log_iterations = false;
  int verbosity = 1;
};

/// Everything a batch run needs. The file schema is documented in README.md.
struct RunConfig {
  static constexpr int kSchemaVersion = 1;
  Problem problem;
  SolverConfig solver;
  OutputOptions outputs;
  std::uint64_t rng_seed = 20240901;
  std::vector<double> sweep_eps;
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void config_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::InvalidConfig, "config field '" + path + "': " + msg);
}

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) config_error(path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      config_error(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
  }
}

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline double number(const json& obj, const std::string& path, const char* key, std::optional<double> fallback) {
  const json* v = find(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    config_error(join(path, key), "missing required number");
  }
  if (!v->is_number()) config_error(join(path, key), "expected a number");
  return v->get<double>();
}

inline long long integer(const json& obj, const std::string& path, const char* key, long long fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) config_error(join(path, key), "expected an integer");
  return v->get<long long>();
}

inline bool boolean(const json& obj, const std::string& path, const char* key, bool fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) config_error(join(path, key), "expected true or false");
  return v->get<bool>();
}

inline std::vector<double> number_list(const json& obj, const std::string& path, const char* key) {
  const json* v = find(obj, key);
  if (!v) config_error(join(path, key), "missing required list");
  if (!v->is_array()) config_error(join(path, key), "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number()) config_error(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back((*v)[i].get<double>());
  }
  return out;
}

inline void require(bool ok, const std::string& path, const std::string& msg) {
  if (!ok) config_error(path, msg);
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& root) {
  using detail::require;
  using nlohmann::json;
  RunConfig cfg;
  detail::reject_unknown(root, "", {"schema_version", "problem", "numerics", "solver", "outputs", "sweep", "rng_seed"});
  const long long version = detail::integer(root, "", "schema_version", RunConfig::kSchemaVersion);
  require(version == RunConfig::kSchemaVersion, "schema_version", "unsupported version " + std::to_string(version));

  // problem
  const json* problem = detail::find(root, "problem");
  if (!problem) detail::config_error("problem", "missing section");
  detail::reject_unknown(*problem, "problem", {"dim", "eps", "potential"});
  const long long dim = detail::integer(*problem, "problem", "dim", 1);
  require(dim == 1 || dim == 2, "problem.dim", "must be 1 or 2");
  cfg.problem.dim = static_cast<int>(dim);
  const double eps = detail::number(*problem, "problem", "eps", std::nullopt);
  require(eps > 0.0, "problem.eps", "must be positive");
  cfg.problem.params.eps = eps;

  const json* pot = detail::find(*problem, "potential");
  if (!pot) detail::config_error("problem.potential", "missing section");
  detail::reject_unknown(*pot, "problem.potential", {"wells", "v_inf", "width"});
  const json* wells = detail::find(*pot, "wells");
  if (!wells || !wells->is_array() || wells->empty()) {
    detail::config_error("problem.potential.wells", "expected a nonempty list of coordinate tuples");
  }
  std::vector<Point> centers;
  for (std::size_t i = 0; i < wells->size(); ++i) {
    const std::string path = "problem.potential.wells[" + std::to_string(i) + "]";
    const json& w = (*wells)[i];
    Point z{0.0, 0.0};
    if (w.is_number() && dim == 1) {
      z[0] = w.get<double>();
    } else if (w.is_array() && w.size() == static_cast<std::size_t>(dim)) {
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (!w[k].is_number()) detail::config_error(path, "coordinates must be numbers");
        z[k] = w[k].get<double>();
      }
    } else {
      detail::config_error(path, "expected a tuple of " + std::to_string(dim) + " coordinates");
    }
    centers.push_back(z);
  }
  const double v_inf = detail::number(*pot, "problem.potential", "v_inf", std::nullopt);
  const double width = detail::number(*pot, "problem.potential", "width", std::nullopt);
  try {
    cfg.problem.params.potential = make_multiwell(centers, v_inf, width);
  } catch (const Error& e) {
    detail::config_error("problem.potential", e.what());
  }

  // numerics
  const json* num = detail::find(root, "numerics");
  if (!num) detail::config_error("numerics", "missing section");
  detail::reject_unknown(*num, "numerics", {"h", "R_schedule", "delta", "p", "ground_R"});
  cfg.problem.h = detail::number(*num, "numerics", "h", std::nullopt);
  require(cfg.problem.h > 0.0, "numerics.h", "must be positive");
  cfg.solver.R_schedule = detail::number_list(*num, "numerics", "R_schedule");
  require(!cfg.solver.R_schedule.empty(), "numerics.R_schedule", "must not be empty");
  for (std::size_t k = 0; k < cfg.solver.R_schedule.size(); ++k) {
    const std::string path = "numerics.R_schedule[" + std::to_string(k) + "]";
    require(cfg.solver.R_schedule[k] > 0.0, path, "must be positive");
    if (k > 0) require(cfg.solver.R_schedule[k] > cfg.solver.R_schedule[k - 1], path, "schedule must be strictly increasing");
  }
  cfg.problem.params.delta = detail::number(*num, "numerics", "delta", kDefaultDelta);
  require(cfg.problem.params.delta > 0.0 && cfg.problem.params.delta <= kDeltaCap, "numerics.delta",
          format_shortest(cfg.problem.params.delta) +
              " is outside (0, e^{-3/2} = 0.22313...]; F1 is convex only up to the e^{-3/2} cap");
  cfg.problem.params.p = detail::number(*num, "numerics", "p", 3.0);
  require(cfg.problem.params.p > 2.0 && std::isfinite(cfg.problem.params.p), "numerics.p", "must be finite and > 2");
  cfg.problem.ground_radius = detail::number(*num, "numerics", "ground_R", 10.0);
  require(cfg.problem.ground_radius > 0.0, "numerics.ground_R", "must be positive");
  for (double R : cfg.solver.R_schedule) {
    const double n = 2.0 * R / cfg.problem.h;
    require(std::abs(n - std::round(n)) <= 1e-9 * n && R / cfg.problem.h >= 8.0, "numerics.h",
            "must divide 2R for every R in the schedule with R/h >= 8");
  }

  // solver
  SolverConfig& s = cfg.solver;
  s.localization = default_geometry(*cfg.problem.params.potential);
  if (const json* sol = detail::find(root, "solver")) {
    detail::reject_unknown(*sol, "solver",
                           {"grad_tol", "nehari_tol", "max_iters", "initial_step", "min_step", "max_step", "backtrack",
                            "max_halvings", "boundary_patience", "gamma", "rho0", "R0", "probes"});
    s.grad_tol = detail::number(*sol, "solver", "grad_tol", s.grad_tol);
    s.nehari_tol = detail::number(*sol, "solver", "nehari_tol", s.nehari_tol);
    s.max_iters = static_cast<int>(detail::integer(*sol, "solver", "max_iters", s.max_iters));
    s.step.initial = detail::number(*sol, "solver", "initial_step", s.step.initial);
    s.step.min_step = detail::number(*sol, "solver", "min_step", s.step.min_step);
    s.step.max_step = detail::number(*sol, "solver", "max_step", s.step.max_step);
    s.step.backtrack = detail::number(*sol, "solver", "backtrack", s.step.backtrack);
    s.step.max_halvings = static_cast<int>(detail::integer(*sol, "solver", "max_halvings", s.step.max_halvings));
    s.boundary_patience =
        static_cast<int>(detail::integer(*sol, "solver", "boundary_patience", s.boundary_patience));
    if (const json* g = detail::find(*sol, "gamma"); g && !g->is_null()) {
      s.gamma = detail::number(*sol, "solver", "gamma", std::nullopt);
      require(*s.gamma > 0.0, "solver.gamma", "must be positive");
    }
    if (const json* r = detail::find(*sol, "rho0"); r && !r->is_null()) {
      s.localization.rho0 = detail::number(*sol, "solver", "rho0", std::nullopt);
    }
    if (const json* r = detail::find(*sol, "R0"); r && !r->is_null()) {
      s.localization.R0 = detail::number(*sol, "solver", "R0", std::nullopt);
    }
    const long long probes = detail::integer(*sol, "solver", "probes", static_cast<long long>(s.probes));
    require(probes > 0, "solver.probes", "must be positive");
    s.probes = static_cast<std::size_t>(probes);
  }
  require(s.grad_tol > 0.0, "solver.grad_tol", "must be positive");
  require(s.nehari_tol > 0.0, "solver.nehari_tol", "must be positive");
  require(s.max_iters > 0, "solver.max_iters", "must be positive");
  require(s.step.min_step > 0.0 && s.step.max_step >= s.step.min_step, "solver.min_step",
          "need 0 < min_step <= max_step");
  require(s.step.initial > 0.0, "solver.initial_step", "must be positive");
  require(s.step.backtrack > 0.0 && s.step.backtrack < 1.0, "solver.backtrack", "must lie in (0, 1)");
  require(s.step.max_halvings >= 0, "solver.max_halvings", "must be nonnegative");
  require(s.boundary_patience > 0, "solver.boundary_patience", "must be positive");
  const GeometryCheck geo = check_geometry(s.localization, cfg.problem.params.potential->wells());
  require(geo.balls_disjoint, "solver.rho0", "balls B_rho0(z_i) must be pairwise disjoint");
  require(geo.balls_inside_R0, "solver.R0", "balls B_rho0(z_i) must lie inside B_R0(0)");
  require(s.R_schedule.front() > s.localization.R0, "numerics.R_schedule[0]", "first radius must exceed R0");

  // outputs
  if (const json* out = detail::find(root, "outputs")) {
    detail::reject_unknown(*out, "outputs", {"dir", "dump_fields", "log_iterations", "verbosity"});
    if (const json* d = detail::find(*out, "dir")) {
      if (!d->is_string()) detail::config_error("outputs.dir", "expected a string");
      cfg.outputs.dir = d->get<std::string>();
    }
    cfg.outputs.dump_fields = detail::boolean(*out, "outputs", "dump_fields", cfg.outputs.dump_fields);
    cfg.outputs.log_iterations = detail::boolean(*out, "outputs", "log_iterations", cfg.outputs.log_iterations);
    cfg.outputs.verbosity = static_cast<int>(detail::integer(*out, "outputs", "verbosity", cfg.outputs.verbosity));
  }
  s.record_history = cfg.outputs.log_iterations;

  if (const json* sw = detail::find(root, "sweep")) {
    detail::reject_unknown(*sw, "sweep", {"eps"});
    cfg.sweep_eps = detail::number_list(*sw, "sweep", "eps");
    for (std::size_t k = 0; k < cfg.sweep_eps.size(); ++k) {
      require(cfg.sweep_eps[k] > 0.0, "sweep.eps[" + std::to_string(k) + "]", "must be positive");
    }
  }

  const long long seed = detail::integer(root, "", "rng_seed", static_cast<long long>(cfg.rng_seed));
  require(seed >= 0, "rng_seed", "must be nonnegative");
  cfg.rng_seed = static_cast<std::uint64_t>(seed);
  s.probe_seed = cfg.rng_seed;
  return cfg;
}

inline RunConfig parse_run_config(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    // Translate the byte offset into a line number.
    std::size_t line = 1;
    for (std::size_t k = 0; k < std::min<std::size_t>(e.byte, text.size()); ++k) {
      if (text[k] == '\n') ++line;
    }
    throw Error(ErrorCode::InvalidConfig, "config parse error at line " + std::to_string(line) + ": " + e.what());
  }
  return parse_run_config(root);
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::InvalidConfig, "cannot read config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace lse
