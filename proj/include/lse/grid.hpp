#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "lse/error.hpp"

namespace lse {

/// A point in the (at most two-dimensional) physical domain. In 1D only the
/// first coordinate is meaningful and the second is kept at zero.
using Point = std::array<double, 2>;

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

inline double norm(const Point& a) { return std::hypot(a[0], a[1]); }

/// Identifies the grid a field was sampled on.
struct GridSignature {
  int dim = 0;
  std::size_t per_axis = 0;
  double radius = 0.0;
  double spacing = 0.0;

  friend bool operator==(const GridSignature&, const GridSignature&) = default;
};

class Grid;

/// Real-valued nodal function on a Grid, stored in the grid's node order.
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& g);
  Field(const Grid& g, std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t j) { return values_[j]; }
  double operator[](std::size_t j) const { return values_[j]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  const GridSignature& signature() const { return signature_; }

  Field& operator*=(double c) {
    for (double& x : values_) x *= c;
    return *this;
  }

  friend Field operator*(double c, Field u) {
    u *= c;
    return u;
  }

 private:
  GridSignature signature_;
  std::vector<double> values_;
};

/// Uniform tensor grid over [-R, R]^dim with homogeneous Dirichlet boundary.
/// Nodes are ordered row-major: j = iy * per_axis + ix.
class Grid {
 public:
  static Grid build(int dim, double radius, double spacing) {
    if (!(spacing > 0.0) || !(radius > 0.0)) {
      throw Error(ErrorCode::NonPositiveSpacing, "R and h must be positive");
    }
    if (dim != 1 && dim != 2) {
      throw Error(ErrorCode::InvalidConfig, "dimension must be 1 or 2");
    }
    const double intervals = 2.0 * radius / spacing;
    const double rounded = std::round(intervals);
    if (std::abs(intervals - rounded) > 1e-9 * intervals) {
      throw Error(ErrorCode::NonConformingSpacing, "h does not divide 2R");
    }
    if (radius / spacing < 8.0) {
      throw Error(ErrorCode::DomainTooCoarse, "R/h must be at least 8");
    }
    Grid g;
    g.dim_ = dim;
    g.radius_ = radius;
    g.intervals_ = static_cast<std::size_t>(rounded);
    g.spacing_ = 2.0 * radius / static_cast<double>(g.intervals_);
    const std::size_t n = g.intervals_ + 1;
    const std::size_t total = dim == 1 ? n : n * n;
    g.nodes_.resize(total);
    g.interior_.resize(total);
    g.weights_.resize(total);
    const double cell = dim == 1 ? g.spacing_ : g.spacing_ * g.spacing_;
    for (std::size_t j = 0; j < total; ++j) {
      const std::size_t ix = j % n;
      const std::size_t iy = dim == 1 ? 0 : j / n;
      g.nodes_[j] = {g.coordinate(ix), dim == 1 ? 0.0 : g.coordinate(iy)};
      const bool edge_x = ix == 0 || ix == g.intervals_;
      const bool edge_y = dim == 2 && (iy == 0 || iy == g.intervals_);
      g.interior_[j] = !edge_x && !edge_y;
      double w = cell;
      if (edge_x) w *= 0.5;
      if (edge_y) w *= 0.5;
      g.weights_[j] = w;
    }
    return g;
  }

  int dim() const { return dim_; }
  double radius() const { return radius_; }
  double spacing() const { return spacing_; }
  std::size_t per_axis() const { return intervals_ + 1; }
  std::size_t size() const { return nodes_.size(); }

  const Point& node(std::size_t j) const { return nodes_[j]; }
  std::span<const Point> nodes() const { return nodes_; }
  bool interior(std::size_t j) const { return interior_[j] != 0; }
  double weight(std::size_t j) const { return weights_[j]; }
  std::span<const double> weights() const { return weights_; }

  /// Per-axis coordinate of index i.
  double coordinate(std::size_t i) const {
    // Exactly antisymmetric about the center: coordinate(n - i) == -coordinate(i).
    const auto k = 2 * static_cast<long long>(i) - static_cast<long long>(intervals_);
    return radius_ * static_cast<double>(k) / static_cast<double>(intervals_);
  }

  /// Index of the node nearest to p (clamped to the grid).
  std::size_t nearest(const Point& p) const {
    auto axis = [&](double x) {
      const double k = std::round((x + radius_) / spacing_);
      if (k < 0.0) return std::size_t{0};
      if (k > static_cast<double>(intervals_)) return intervals_;
      return static_cast<std::size_t>(k);
    };
    const std::size_t ix = axis(p[0]);
    return dim_ == 1 ? ix : axis(p[1]) * per_axis() + ix;
  }

  GridSignature signature() const { return {dim_, per_axis(), radius_, spacing_}; }

  void check(const Field& u) const {
    if (u.signature() != signature() || u.size() != size()) {
      throw Error(ErrorCode::GridMismatch, "field does not live on this grid");
    }
  }

  void check_values(std::span<const double> values) const {
    if (values.size() != size()) {
      throw Error(ErrorCode::GridMismatch, "value count does not match node count");
    }
  }

 private:
  Grid() = default;

  int dim_ = 1;
  double radius_ = 0.0;
  double spacing_ = 0.0;
  std::size_t intervals_ = 0;
  std::vector<Point> nodes_;
  std::vector<unsigned char> interior_;
  std::vector<double> weights_;
};

inline Field::Field(const Grid& g) : signature_(g.signature()), values_(g.size(), 0.0) {}

inline Field::Field(const Grid& g, std::vector<double> values)
    : signature_(g.signature()), values_(std::move(values)) {
  g.check_values(values_);
}

inline Grid build_grid(int dim, double radius, double spacing) {
  return Grid::build(dim, radius, spacing);
}

/// Samples f at every node; boundary nodes are set to zero.
template <class F>
Field sample(const Grid& g, F&& f) {
  Field u(g);
  for (std::size_t j = 0; j < g.size(); ++j) {
    u[j] = g.interior(j) ? f(g.node(j)) : 0.0;
  }
  return u;
}

inline void enforce_dirichlet(const Grid& g, Field& u) {
  g.check(u);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!g.interior(j)) u[j] = 0.0;
  }
}

/// Returns -Δ_h u with the second-order central stencil; boundary rows are 0.
inline Field laplacian_apply(const Grid& g, const Field& u) {
  g.check(u);
  Field out(g);
  const std::size_t n = g.per_axis();
  const double inv_h2 = 1.0 / (g.spacing() * g.spacing());
  const auto v = u.values();
  if (g.dim() == 1) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      out[i] = (2.0 * v[i] - v[i - 1] - v[i + 1]) * inv_h2;
    }
    return out;
  }
  for (std::size_t iy = 1; iy + 1 < n; ++iy) {
    for (std::size_t ix = 1; ix + 1 < n; ++ix) {
      const std::size_t j = iy * n + ix;
      out[j] = (4.0 * v[j] - v[j - 1] - v[j + 1] - v[j - n] - v[j + n]) * inv_h2;
    }
  }
  return out;
}

inline double integrate(const Grid& g, std::span<const double> values) {
  g.check_values(values);
  double sum = 0.0;
  const auto w = g.weights();
  for (std::size_t j = 0; j < values.size(); ++j) sum += w[j] * values[j];
  return sum;
}

inline double integrate(const Grid& g, const Field& u) {
  g.check(u);
  return integrate(g, u.values());
}

/// ∫ u v over the grid.
inline double inner(const Grid& g, const Field& u, const Field& v) {
  g.check(u);
  g.check(v);
  double sum = 0.0;
  const auto w = g.weights();
  for (std::size_t j = 0; j < g.size(); ++j) sum += w[j] * u[j] * v[j];
  return sum;
}

namespace detail {

inline void require_nested(const Grid& small, const Grid& large) {
  if (small.dim() != large.dim()) {
    throw Error(ErrorCode::GridMismatch, "grids differ in dimension");
  }
  if (std::abs(small.spacing() - large.spacing()) > 1e-12 * small.spacing()) {
    throw Error(ErrorCode::SpacingMismatch, "grids differ in spacing");
  }
  if (large.radius() < small.radius() - 1e-12 * small.radius()) {
    throw Error(ErrorCode::ShrinkingDomain, "target domain is smaller than the source");
  }
}

// Index offset of the small grid's first node inside the large grid, per axis.
inline std::size_t nested_offset(const Grid& small, const Grid& large) {
  return (large.per_axis() - small.per_axis()) / 2;
}

}  // namespace detail

/// Embeds u from g_old into the larger g_new by zero extension.
inline Field zero_extend(const Field& u, const Grid& g_old, const Grid& g_new) {
  g_old.check(u);
  detail::require_nested(g_old, g_new);
  Field out(g_new);
  const std::size_t off = detail::nested_offset(g_old, g_new);
  const std::size_t n_old = g_old.per_axis();
  const std::size_t n_new = g_new.per_axis();
  if (g_old.dim() == 1) {
    for (std::size_t i = 0; i < n_old; ++i) out[i + off] = u[i];
    return out;
  }
  for (std::size_t iy = 0; iy < n_old; ++iy) {
    for (std::size_t ix = 0; ix < n_old; ++ix) {
      out[(iy + off) * n_new + ix + off] = u[iy * n_old + ix];
    }
  }
  return out;
}

/// Inverse of zero_extend: samples u (on g_large) at the nodes of g_small.
inline Field restrict_to(const Field& u, const Grid& g_large, const Grid& g_small) {
  g_large.check(u);
  detail::require_nested(g_small, g_large);
  Field out(g_small);
  const std::size_t off = detail::nested_offset(g_small, g_large);
  const std::size_t n_s = g_small.per_axis();
  const std::size_t n_l = g_large.per_axis();
  if (g_small.dim() == 1) {
    for (std::size_t i = 0; i < n_s; ++i) out[i] = u[i + off];
    return out;
  }
  for (std::size_t iy = 0; iy < n_s; ++iy) {
    for (std::size_t ix = 0; ix < n_s; ++ix) {
      out[iy * n_s + ix] = u[(iy + off) * n_l + ix + off];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV serialization
//
//   dim,R,h
//   <dim>,<R>,<h>
//   x[,y],value
//   one row per node, in node order
// ---------------------------------------------------------------------------

/// Shortest decimal string that round-trips to the same double.
inline std::string format_shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// 17 significant digits.
inline std::string format_full(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline void write_field_csv(std::ostream& os, const Grid& g, const Field& u) {
  g.check(u);
  os << "dim,R,h\n"
     << g.dim() << ',' << format_full(g.radius()) << ',' << format_full(g.spacing()) << '\n';
  os << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
  for (std::size_t j = 0; j < g.size(); ++j) {
    const Point& p = g.node(j);
    os << format_full(p[0]) << ',';
    if (g.dim() == 2) os << format_full(p[1]) << ',';
    os << format_full(u[j]) << '\n';
  }
}

inline void write_field_csv(const std::string& path, const Grid& g, const Field& u) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  write_field_csv(os, g, u);
}

struct LoadedField {
  Grid grid;
  Field field;
};

inline LoadedField read_field_csv(std::istream& is) {
  std::string line;
  auto fail = [](const std::string& msg) { return Error(ErrorCode::Io, "field csv: " + msg); };
  if (!std::getline(is, line) || line != "dim,R,h") throw fail("missing dim,R,h header");
  if (!std::getline(is, line)) throw fail("missing grid parameters");
  int dim = 0;
  double radius = 0.0;
  double spacing = 0.0;
  {
    std::istringstream ss(line);
    char c1 = 0;
    char c2 = 0;
    if (!(ss >> dim >> c1 >> radius >> c2 >> spacing) || c1 != ',' || c2 != ',') {
      throw fail("malformed grid parameters");
    }
  }
  Grid g = build_grid(dim, radius, spacing);
  if (!std::getline(is, line)) throw fail("missing column header");
  std::vector<double> values;
  values.reserve(g.size());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto pos = line.rfind(',');
    if (pos == std::string::npos) throw fail("malformed row");
    values.push_back(std::stod(line.substr(pos + 1)));
  }
  if (values.size() != g.size()) throw fail("row count does not match grid");
  Field u(g, std::move(values));
  return {std::move(g), std::move(u)};
}

}  // namespace lse
