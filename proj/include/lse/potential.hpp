#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lse/error.hpp"
#include "lse/grid.hpp"

namespace lse {

/// Multi-well potential V(x) = V_inf - (V_inf - 1) * max_i exp(-|x - z_i|^2 / w).
///
/// V equals 1 exactly at every well center, stays strictly below V_inf, and
/// tends to V_inf at infinity. The first well is pinned to the origin.
class PotentialSpec {
 public:
  const std::vector<Point>& wells() const { return wells_; }
  double v_inf() const { return v_inf_; }
  double width() const { return width_; }
  std::size_t count() const { return wells_.size(); }

  /// V_inf - V(x), computed without cancellation so the strict upper bound
  /// can be checked where V itself rounds to V_inf.
  double deficit(const Point& x) const {
    double best = 0.0;
    for (const Point& z : wells_) {
      const double d2 = (x[0] - z[0]) * (x[0] - z[0]) + (x[1] - z[1]) * (x[1] - z[1]);
      best = std::max(best, std::exp(-d2 / width_));
    }
    return (v_inf_ - 1.0) * best;
  }

  double operator()(const Point& x) const { return v_inf_ - deficit(x); }

 private:
  friend PotentialSpec make_multiwell(std::vector<Point>, double, double);

  std::vector<Point> wells_;
  double v_inf_ = 2.0;
  double width_ = 1.0;
};

inline PotentialSpec make_multiwell(std::vector<Point> wells, double v_inf, double width) {
  if (wells.empty() || wells.front()[0] != 0.0 || wells.front()[1] != 0.0) {
    throw Error(ErrorCode::MissingOriginWell, "the first well must sit at the origin");
  }
  if (!(v_inf > 1.0)) {
    throw Error(ErrorCode::FlatPotential, "v_inf must exceed min V = 1");
  }
  if (!(width > 0.0)) {
    throw Error(ErrorCode::InvalidWidth, "well width must be positive");
  }
  for (std::size_t i = 0; i < wells.size(); ++i) {
    for (std::size_t j = i + 1; j < wells.size(); ++j) {
      if (wells[i] == wells[j]) {
        throw Error(ErrorCode::DuplicateWells, "well centers must be pairwise distinct");
      }
    }
  }
  PotentialSpec spec;
  spec.wells_ = std::move(wells);
  spec.v_inf_ = v_inf;
  spec.width_ = width;
  return spec;
}

/// Localization radii: rho0 for the balls around each well, R0 for the
/// barycenter truncation.
struct WellGeometry {
  double rho0 = 1.0;
  double R0 = 2.0;
};

inline double min_well_separation(const std::vector<Point>& wells) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < wells.size(); ++i) {
    for (std::size_t j = i + 1; j < wells.size(); ++j) {
      best = std::min(best, distance(wells[i], wells[j]));
    }
  }
  return best;
}

inline double max_well_radius(const std::vector<Point>& wells) {
  double r = 0.0;
  for (const Point& z : wells) r = std::max(r, norm(z));
  return r;
}

/// rho0 = 1/4 of the closest well spacing (1 for a single well),
/// R0 = 2 max(1, max |z_i|).
inline WellGeometry default_geometry(const PotentialSpec& spec) {
  WellGeometry geo;
  geo.rho0 = spec.count() > 1 ? 0.25 * min_well_separation(spec.wells()) : 1.0;
  geo.R0 = 2.0 * std::max(1.0, max_well_radius(spec.wells()));
  return geo;
}

struct GeometryCheck {
  bool balls_disjoint = true;
  bool balls_inside_R0 = true;
  bool ok() const { return balls_disjoint && balls_inside_R0; }
};

inline GeometryCheck check_geometry(const WellGeometry& geo, const std::vector<Point>& wells) {
  GeometryCheck c;
  if (wells.size() > 1) c.balls_disjoint = geo.rho0 < 0.5 * min_well_separation(wells);
  c.balls_inside_R0 = geo.rho0 > 0.0 && max_well_radius(wells) + geo.rho0 <= geo.R0;
  return c;
}

struct ValidationReport {
  double min_value = 0.0;
  bool min_ok = false;             // min V >= 1 - 1e-12
  bool minima_at_wells = false;    // a node within h*sqrt(dim) of every well is near 1
  bool strictly_below_v_inf = false;
  bool tail_ok = false;            // |V - V_inf| < 0.01 (V_inf - 1) on the boundary
  bool wells_inside_domain = false;
  GeometryCheck geometry;
  std::vector<std::string> messages;

  /// Tail tightness is only a warning.
  bool ok() const {
    return min_ok && minima_at_wells && strictly_below_v_inf && wells_inside_domain &&
           geometry.ok();
  }
};

namespace detail {
inline double nearest_exponent(const PotentialSpec& spec, const Point& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const Point& z : spec.wells()) {
    const double d = distance(x, z);
    best = std::min(best, d * d / spec.width());
  }
  return best;
}
}  // namespace detail

/// Audits the potential's hypotheses on the nodes of g (physical coordinates).
inline ValidationReport validate(const PotentialSpec& spec, const WellGeometry& geo, const Grid& g) {
  ValidationReport rep;
  rep.min_value = std::numeric_limits<double>::infinity();
  bool strict = true;
  double worst_tail = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const Point& x = g.node(j);
    const double deficit = spec.deficit(x);
    rep.min_value = std::min(rep.min_value, spec.v_inf() - deficit);
    // A zero deficit far from every well is underflow of exp, not V = V_inf.
    if (deficit < 0.0 || (deficit == 0.0 && detail::nearest_exponent(spec, x) < 700.0)) strict = false;
    if (!g.interior(j)) worst_tail = std::max(worst_tail, deficit);
  }
  rep.min_ok = rep.min_value >= 1.0 - 1e-12;
  rep.strictly_below_v_inf = strict;
  rep.tail_ok = worst_tail < 0.01 * (spec.v_inf() - 1.0);

  const double reach = g.spacing() * std::sqrt(static_cast<double>(g.dim()));
  // Largest V a node within `reach` of a well center can take.
  const double near_bound =
      1.0 + (spec.v_inf() - 1.0) * (1.0 - std::exp(-reach * reach / spec.width())) + 1e-12;
  rep.wells_inside_domain = true;
  rep.minima_at_wells = true;
  for (std::size_t i = 0; i < spec.count(); ++i) {
    const Point& z = spec.wells()[i];
    const bool inside = std::abs(z[0]) <= g.radius() && std::abs(z[1]) <= g.radius();
    if (!inside) {
      rep.wells_inside_domain = false;
      rep.minima_at_wells = false;
      rep.messages.push_back("well " + std::to_string(i + 1) + " lies outside the grid");
      continue;
    }
    const std::size_t j = g.nearest(z);
    if (distance(g.node(j), z) > reach + 1e-12 || spec(g.node(j)) > near_bound) {
      rep.minima_at_wells = false;
      rep.messages.push_back("no near-minimal node next to well " + std::to_string(i + 1));
    }
  }
  rep.geometry = check_geometry(geo, spec.wells());
  if (!rep.min_ok) rep.messages.push_back("V drops below 1");
  if (!rep.strictly_below_v_inf) rep.messages.push_back("V reaches V_inf on the grid");
  if (!rep.tail_ok) rep.messages.push_back("warning: domain truncates the potential tail");
  if (!rep.geometry.balls_disjoint) rep.messages.push_back("localization balls overlap");
  if (!rep.geometry.balls_inside_R0) rep.messages.push_back("localization balls leave B_R0");
  return rep;
}

/// V(eps * x_j) at every node.
inline std::vector<double> eval_scaled(const PotentialSpec& spec, double eps, const Grid& g) {
  if (!(eps > 0.0)) throw Error(ErrorCode::NonPositiveEpsilon, "eps must be positive");
  std::vector<double> out(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const Point& x = g.node(j);
    out[j] = spec({eps * x[0], eps * x[1]});
  }
  return out;
}

}  // namespace lse
