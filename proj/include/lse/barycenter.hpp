#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "lse/error.hpp"
#include "lse/grid.hpp"
#include "lse/potential.hpp"

namespace lse {

/// Radial truncation chi and weight g of the barycenter map. g is 1 on
/// |x| <= R0 and decays like exp(-(|x| - R0)) outside.
struct BarycenterParams {
  double R0 = 2.0;

  Point chi(const Point& x) const {
    const double r = norm(x);
    if (r <= R0) return x;
    return {R0 * x[0] / r, R0 * x[1] / r};
  }

  double weight(const Point& x) const {
    const double r = norm(x);
    return r <= R0 ? 1.0 : std::exp(-(r - R0));
  }
};

/// Q_eps(u) = ∫ chi(εx) g(εx) u^2 / ∫ g(εx) u^2.
inline Point q_eps(const Field& u, double eps, const BarycenterParams& params, const Grid& g) {
  if (!(eps > 0.0)) throw Error(ErrorCode::NonPositiveEpsilon, "eps must be positive");
  g.check(u);
  double num0 = 0.0;
  double num1 = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double m = g.weight(j) * u[j] * u[j];
    if (m == 0.0) continue;
    const Point& x = g.node(j);
    const Point y{eps * x[0], eps * x[1]};
    const double wg = params.weight(y) * m;
    const Point c = params.chi(y);
    num0 += c[0] * wg;
    num1 += c[1] * wg;
    den += wg;
  }
  if (!(den > 0.0)) throw Error(ErrorCode::ZeroField, "barycenter of the zero field");
  return {num0 / den, num1 / den};
}

enum class RegionKind { Interior, Boundary, Outside };

struct Region {
  RegionKind kind = RegionKind::Outside;
  std::size_t well = 0;  // 0-based; meaningless when Outside
  bool core = false;     // within rho0/2 of the well

  bool interior_of(std::size_t i) const { return kind == RegionKind::Interior && well == i; }
};

inline constexpr double kBoundaryBand = 1e-9;

/// Classifies a barycenter against the balls B_rho0(z_i). Boundary wins
/// over Interior inside the 1e-9 band.
inline Region region_of(const Point& q, const WellGeometry& geo, const std::vector<Point>& wells) {
  Region r;
  for (std::size_t i = 0; i < wells.size(); ++i) {
    const double d = distance(q, wells[i]);
    if (std::abs(d - geo.rho0) <= kBoundaryBand) {
      r.kind = RegionKind::Boundary;
      r.well = i;
      return r;
    }
    if (d < geo.rho0) {
      r.kind = RegionKind::Interior;
      r.well = i;
      r.core = d <= 0.5 * geo.rho0;
      return r;
    }
  }
  return r;
}

inline const char* to_string(RegionKind k) {
  switch (k) {
    case RegionKind::Interior: return "Interior";
    case RegionKind::Boundary: return "Boundary";
    case RegionKind::Outside: return "Outside";
  }
  return "?";
}

}  // namespace lse
