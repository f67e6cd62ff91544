#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "lse/error.hpp"
#include "lse/grid.hpp"
#include "lse/potential.hpp"

namespace lse {

/// Upper limit on the splitting threshold: F1 is convex iff delta <= e^{-3/2}.
inline constexpr double kDeltaCap = 0.22313016014842982;
/// e^{-2}
inline constexpr double kDefaultDelta = 0.1353352832366127;

/// s^2 log s^2 with 0 log 0 = 0. Written as 2 s^2 log|s| so that an
/// underflowing s^2 still yields 0 instead of 0 * (-inf).
inline double s2_log_s2(double s) {
  return s == 0.0 ? 0.0 : 2.0 * s * s * std::log(std::abs(s));
}

/// s log s^2 with the same convention.
inline double s_log_s2(double s) { return s == 0.0 ? 0.0 : 2.0 * s * std::log(std::abs(s)); }

struct EnergyParams {
  double eps = 1.0;
  double delta = kDefaultDelta;
  double p = 3.0;
  /// When empty the functional uses the constant coefficient V = constant_v.
  std::optional<PotentialSpec> potential;
  double constant_v = 1.0;

  static EnergyParams constant(double v) {
    EnergyParams params;
    params.constant_v = v;
    return params;
  }

  void validate() const {
    if (!(eps > 0.0)) throw Error(ErrorCode::NonPositiveEpsilon, "eps must be positive");
    if (!(delta > 0.0) || delta > kDeltaCap) {
      throw Error(ErrorCode::InvalidDelta, "delta must lie in (0, e^{-3/2} ~ 0.22313]");
    }
    if (!(p > 2.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::InvalidExponent, "p must be finite and greater than 2");
    }
  }
};

struct FSplit {
  double f1 = 0.0;
  double f2 = 0.0;
  double df1 = 0.0;
  double df2 = 0.0;
};

/// The convex / controlled-growth decomposition (1/2) s^2 log s^2 = F2(s) - F1(s).
inline FSplit f_split(double s, double delta) {
  if (!(delta > 0.0) || delta > kDeltaCap) {
    throw Error(ErrorCode::InvalidDelta, "delta must lie in (0, e^{-3/2}]");
  }
  FSplit out;
  if (s == 0.0) return out;
  const double a = std::abs(s);
  const double sgn = s > 0.0 ? 1.0 : -1.0;
  const double log_d2 = 2.0 * std::log(delta);
  if (a < delta) {
    out.f1 = -0.5 * s2_log_s2(s);
    out.df1 = -s_log_s2(s) - s;
    return out;
  }
  out.f1 = -0.5 * s * s * (log_d2 + 3.0) + 2.0 * delta * a - 0.5 * delta * delta;
  out.df1 = -s * (log_d2 + 3.0) + 2.0 * delta * sgn;
  const double log_ratio = 2.0 * (std::log(a) - std::log(delta));
  out.f2 = 0.5 * s * s * log_ratio + 2.0 * delta * a - 1.5 * s * s - 0.5 * delta * delta;
  out.df2 = s * log_ratio - 2.0 * s + 2.0 * delta * sgn;
  return out;
}

/// Pieces of J(u) = 1/2 ∫(|∇u|^2 + (V(εx)+1) u^2) - 1/2 ∫ u^2 log u^2.
struct EnergyBreakdown {
  double total = 0.0;
  double kinetic = 0.0;         // 1/2 ∫|∇u|^2
  double potential_term = 0.0;  // 1/2 ∫(V+1) u^2
  double entropy = 0.0;         // 1/2 ∫ u^2 log u^2
  double mass = 0.0;            // ∫ u^2
  double norm_eps = 0.0;        // ||u||_eps
};

struct NehariResidual {
  double residual = 0.0;    // |J'(u)u| / max(1, ||u||_eps^2)
  double level_gap = 0.0;   // |J(u) - 1/2 ∫u^2|
};

/// The discrete functional on a fixed grid with V(εx) tabulated once.
/// The grid must outlive the functional.
class Functional {
 public:
  Functional(const Grid& g, const EnergyParams& params) : grid_(&g), params_(params) {
    params_.validate();
    if (params_.potential) {
      v_ = eval_scaled(*params_.potential, params_.eps, g);
    } else {
      v_.assign(g.size(), params_.constant_v);
    }
  }

  const Grid& grid() const { return *grid_; }
  const EnergyParams& params() const { return params_; }
  std::span<const double> potential_table() const { return v_; }

  EnergyBreakdown energy(const Field& u) const {
    grid_->check(u);
    const Field lap = laplacian_apply(*grid_, u);
    const auto w = grid_->weights();
    double grad2 = 0.0;
    double pot = 0.0;
    double ent = 0.0;
    double mass = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double x = u[j];
      grad2 += w[j] * x * lap[j];
      pot += w[j] * (v_[j] + 1.0) * x * x;
      ent += w[j] * s2_log_s2(x);
      mass += w[j] * x * x;
    }
    EnergyBreakdown e;
    e.kinetic = 0.5 * grad2;
    e.potential_term = 0.5 * pot;
    e.entropy = 0.5 * ent;
    e.mass = mass;
    e.total = e.kinetic + e.potential_term - e.entropy;
    e.norm_eps = std::sqrt(std::max(0.0, grad2 + pot));
    return e;
  }

  /// Strong-form residual -Δ_h u + V u - u log u^2 at interior nodes, 0 on the boundary.
  Field residual(const Field& u) const {
    Field r = laplacian_apply(*grid_, u);
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (!grid_->interior(j)) continue;
      r[j] += v_[j] * u[j] - s_log_s2(u[j]);
    }
    return r;
  }

  /// Nodal gradient of J: quadrature weight times the strong residual.
  Field gradient(const Field& u) const {
    Field r = residual(u);
    const auto w = grid_->weights();
    for (std::size_t j = 0; j < r.size(); ++j) r[j] *= w[j];
    return r;
  }

  /// J'(u)u = ∫|∇u|^2 + V u^2 - u^2 log u^2.
  double nehari_form(const Field& u) const {
    const EnergyBreakdown e = energy(u);
    return nehari_form(e);
  }

  /// J(next) - J(prev), accumulated node by node from differences so that the
  /// result is accurate relative to ∫|u||next - prev| rather than to J itself.
  double energy_difference(const Field& next, const Field& prev) const {
    grid_->check(next);
    grid_->check(prev);
    Field sum = next;
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += prev[j];
    const Field lap_sum = laplacian_apply(*grid_, sum);
    const auto w = grid_->weights();
    double acc = 0.0;
    for (std::size_t j = 0; j < sum.size(); ++j) {
      const double d = next[j] - prev[j];
      if (d == 0.0) continue;
      // 1/2 d (-Δ)(next + prev) is the kinetic difference by symmetry of -Δ_h.
      const double quad = 0.5 * d * (lap_sum[j] + (v_[j] + 1.0) * sum[j]);
      acc += w[j] * (quad - 0.5 * entropy_difference(next[j], prev[j]));
    }
    return acc;
  }

  /// The unique s > 0 with J'(su)(su) = 0.
  double nehari_scale(const Field& u) const {
    const EnergyBreakdown e = energy(u);
    if (!(e.mass > 0.0)) throw Error(ErrorCode::ZeroField, "cannot project the zero field");
    return std::exp(nehari_form(e) / (2.0 * e.mass));
  }

  NehariResidual nehari_residual(const Field& u) const {
    const EnergyBreakdown e = energy(u);
    if (!(e.mass > 0.0)) throw Error(ErrorCode::ZeroField, "zero field has no Nehari residual");
    NehariResidual r;
    r.residual = std::abs(nehari_form(e)) / std::max(1.0, e.norm_eps * e.norm_eps);
    r.level_gap = std::abs(e.total - 0.5 * e.mass);
    return r;
  }

 private:
  // a^2 log a^2 - b^2 log b^2 without cancellation between the two terms.
  static double entropy_difference(double a, double b) {
    const double x = std::abs(a);
    const double y = std::abs(b);
    // Far apart there is no cancellation, and the log1p ratio could overflow.
    if (x == 0.0 || y == 0.0 || x > 2.0 * y || y > 2.0 * x) return s2_log_s2(a) - s2_log_s2(b);
    return (x - y) * (x + y) * 2.0 * std::log(x) + 2.0 * y * y * std::log1p((x - y) / y);
  }

  static double nehari_form(const EnergyBreakdown& e) {
    // ∫|∇u|^2 + ∫V u^2 = 2 (kinetic + potential_term) - mass
    return 2.0 * (e.kinetic + e.potential_term) - e.mass - 2.0 * e.entropy;
  }

  const Grid* grid_;
  EnergyParams params_;
  std::vector<double> v_;
};

inline EnergyBreakdown energy(const Field& u, const EnergyParams& params, const Grid& g) {
  return Functional(g, params).energy(u);
}

inline Field gradient(const Field& u, const EnergyParams& params, const Grid& g) {
  return Functional(g, params).gradient(u);
}

inline double nehari_scale(const Field& u, const EnergyParams& params, const Grid& g) {
  return Functional(g, params).nehari_scale(u);
}

inline NehariResidual nehari_residual(const Field& u, const EnergyParams& params, const Grid& g) {
  return Functional(g, params).nehari_residual(u);
}

/// Scales u onto the discrete Nehari set.
inline Field nehari_project(const Functional& J, Field u) {
  u *= J.nehari_scale(u);
  return u;
}

inline double default_log_sobolev_a() { return std::sqrt(std::numbers::pi) / 2.0; }

/// RHS - LHS of the log-Sobolev inequality
///   ∫u^2 log u^2 <= (a^2/π)|∇u|_2^2 + (log|u|_2^2 - N(1 + log a))|u|_2^2.
/// Nonnegative means the inequality holds for this field.
inline double log_sobolev_gap(const Field& u, const Grid& g, double a = default_log_sobolev_a()) {
  g.check(u);
  const Field lap = laplacian_apply(g, u);
  const auto w = g.weights();
  double grad2 = 0.0;
  double mass = 0.0;
  double ent = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    grad2 += w[j] * u[j] * lap[j];
    mass += w[j] * u[j] * u[j];
    ent += w[j] * s2_log_s2(u[j]);
  }
  if (!(mass > 0.0)) throw Error(ErrorCode::ZeroField, "log-Sobolev gap of the zero field");
  const double n = static_cast<double>(g.dim());
  const double rhs = (a * a / std::numbers::pi) * grad2 + (std::log(mass) - n * (1.0 + std::log(a))) * mass;
  return rhs - ent;
}

struct GrowthFit {
  double C = 0.0;
  /// False when the worst ratio sits in the top decade of the samples, i.e.
  /// the bound keeps growing with s and no finite C covers all of R.
  bool uniform = true;
};

/// Smallest C with |F2'(s)| <= C |s|^{p-1} over the samples.
inline GrowthFit f2_growth_check(const EnergyParams& params, std::span<const double> samples) {
  GrowthFit fit;
  double s_max = 0.0;
  for (double s : samples) s_max = std::max(s_max, std::abs(s));
  double arg = 0.0;
  for (double s : samples) {
    if (s == 0.0) continue;
    const double ratio = std::abs(f_split(s, params.delta).df2) / std::pow(std::abs(s), params.p - 1.0);
    if (ratio > fit.C) {
      fit.C = ratio;
      arg = std::abs(s);
    }
  }
  fit.uniform = std::isfinite(fit.C) && arg < 0.1 * s_max;
  return fit;
}

/// Log-spaced samples in [lo, hi].
inline std::vector<double> log_samples(double lo, double hi, std::size_t count) {
  std::vector<double> s(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    s[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return s;
}

}  // namespace lse
