#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "lse/energy.hpp"
#include "lse/grid.hpp"

namespace lse {

/// Cubic B-spline bump, support [-2, 2].
inline double cubic_bspline(double t) {
  const double a = std::abs(t);
  if (a < 1.0) return 2.0 / 3.0 - a * a + 0.5 * a * a * a;
  if (a < 2.0) {
    const double b = 2.0 - a;
    return b * b * b / 6.0;
  }
  return 0.0;
}

/// Tensor-product B-spline test function B((x-c)/a) with support radius 2a.
struct Probe {
  Point center{0.0, 0.0};
  double scale = 1.0;

  double operator()(const Point& x, int dim) const {
    double v = cubic_bspline((x[0] - center[0]) / scale);
    if (dim == 2) v *= cubic_bspline((x[1] - center[1]) / scale);
    return v;
  }
};

/// Deterministic random probes with centers in the box [lo, hi]^dim and
/// support radius 2a, a in [a_min, a_max]. Probes are clipped to stay
/// inside a domain of the given radius.
inline std::vector<Probe> random_probes(int dim, Point lo, Point hi, double domain_radius,
                                        std::size_t count, std::uint64_t seed,
                                        double a_min = 0.25, double a_max = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Probe> probes(count);
  for (Probe& p : probes) {
    p.scale = a_min + (a_max - a_min) * unit(rng);
    const double limit = std::max(0.0, domain_radius - 2.0 * p.scale);
    for (int k = 0; k < 2; ++k) {
      const double c = lo[k] + (hi[k] - lo[k]) * unit(rng);
      p.center[k] = k < dim ? std::clamp(c, -limit, limit) : 0.0;
    }
  }
  return probes;
}

/// Probe centers drawn over the numerical support of u (nodes with
/// |u| >= 1e-6 max|u|), with the box rounded outward to whole length units
/// so that the same seed yields the same probes on refined grids.
inline std::vector<Probe> support_probes(const Grid& g, const Field& u, std::size_t count,
                                         std::uint64_t seed) {
  double peak = 0.0;
  for (double x : u.values()) peak = std::max(peak, std::abs(x));
  Point lo{g.radius(), g.radius()};
  Point hi{-g.radius(), -g.radius()};
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (std::abs(u[j]) < 1e-6 * peak) continue;
    for (int k = 0; k < g.dim(); ++k) {
      lo[k] = std::min(lo[k], g.node(j)[k]);
      hi[k] = std::max(hi[k], g.node(j)[k]);
    }
  }
  for (int k = 0; k < 2; ++k) {
    if (lo[k] > hi[k]) {
      lo[k] = -g.radius();
      hi[k] = g.radius();
    }
    lo[k] = std::floor(lo[k]);
    hi[k] = std::ceil(hi[k]);
  }
  return random_probes(g.dim(), lo, hi, g.radius(), count, seed);
}

struct WeakResidual {
  double max_abs = 0.0;     // max_v |<J'(u), v>| over unit-H^1 probes
  double normalized = 0.0;  // max_abs / ||u||_eps
  std::size_t probes = 0;
};

/// Max over the probe family of |∫(∇u·∇v + V u v) - ∫ u v log u^2| with each
/// probe scaled to unit discrete H^1 norm. A finite family only bounds the
/// residual a probe of this shape can detect.
inline WeakResidual weak_residual(const Field& u, const Functional& J, const std::vector<Probe>& probes) {
  const Grid& g = J.grid();
  const EnergyBreakdown e = J.energy(u);
  if (!(e.mass > 0.0)) throw Error(ErrorCode::ZeroField, "weak residual of the zero field");
  const Field r = J.residual(u);
  WeakResidual out;
  out.probes = probes.size();
  for (const Probe& p : probes) {
    const Field v = sample(g, [&](const Point& x) { return p(x, g.dim()); });
    const Field lap = laplacian_apply(g, v);
    double h1 = 0.0;
    double pair = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double w = g.weight(j);
      h1 += w * (v[j] * lap[j] + v[j] * v[j]);
      pair += w * v[j] * r[j];
    }
    if (!(h1 > 0.0)) continue;
    out.max_abs = std::max(out.max_abs, std::abs(pair) / std::sqrt(h1));
  }
  out.normalized = out.max_abs / e.norm_eps;
  return out;
}

inline WeakResidual weak_residual(const Field& u, double eps, const EnergyParams& params, const Grid& g,
                                  std::size_t probes = 50, std::uint64_t seed = 20240901) {
  EnergyParams p = params;
  p.eps = eps;
  const Functional J(g, p);
  return weak_residual(u, J, support_probes(g, u, probes, seed));
}

/// Relative magnitude below which a zero node is treated as an underflowed
/// tail rather than a nodal zero.
inline constexpr double kNegligibleTail = 1e-12;

struct Positivity {
  bool ok = false;
  double min_interior = 0.0;
  std::size_t zero_nodes = 0;  // interior nodes equal to 0 (underflowed tail)
};

/// Sign check for a computed solution: no interior node is negative, the
/// field is not identically zero, and every interior zero lies in the
/// negligible tail (all neighbors below 1e-12 of the peak), which is where
/// double precision underflows a Gaussian-decaying profile.
inline Positivity check_positivity(const Grid& g, const Field& u) {
  g.check(u);
  Positivity pos;
  double peak = 0.0;
  pos.min_interior = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < g.size(); ++j) {
    peak = std::max(peak, u[j]);
    if (g.interior(j)) pos.min_interior = std::min(pos.min_interior, u[j]);
  }
  if (!(peak > 0.0) || pos.min_interior < 0.0) return pos;
  const std::size_t n = g.per_axis();
  const double tail = kNegligibleTail * peak;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!g.interior(j) || u[j] > 0.0) continue;
    ++pos.zero_nodes;
    double nb = std::max(std::abs(u[j - 1]), std::abs(u[j + 1]));
    if (g.dim() == 2) nb = std::max({nb, std::abs(u[j - n]), std::abs(u[j + n])});
    if (nb > tail) return pos;
  }
  pos.ok = true;
  return pos;
}

}  // namespace lse
