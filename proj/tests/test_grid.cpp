#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "lse/grid.hpp"

namespace lse {
namespace {

double weight_sum(const Grid& g) {
  double s = 0.0;
  for (double w : g.weights()) s += w;
  return s;
}

Field random_dirichlet(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double a = n(rng), b = n(rng), c = n(rng);
  return sample(g, [&](const Point& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return a * std::exp(-0.3 * r2) + b * x[0] * std::exp(-0.5 * r2) + c * std::sin(x[0]) * std::exp(-0.1 * r2);
  });
}

TEST(BuildGrid, OneDimensionalNodeCountAndWeights) {
  const Grid g = build_grid(1, 10.0, 0.1);
  EXPECT_EQ(g.size(), 201u);
  EXPECT_NEAR(weight_sum(g), 20.0, 20.0 * 1e-12);
  EXPECT_FALSE(g.interior(0));
  EXPECT_FALSE(g.interior(200));
  EXPECT_TRUE(g.interior(1));
  EXPECT_DOUBLE_EQ(g.node(0)[0], -10.0);
  EXPECT_DOUBLE_EQ(g.node(200)[0], 10.0);
}

TEST(BuildGrid, TwoDimensionalNodeCountAndWeights) {
  const Grid g = build_grid(2, 5.0, 0.5);
  EXPECT_EQ(g.per_axis(), 21u);
  EXPECT_EQ(g.size(), 21u * 21u);
  EXPECT_NEAR(weight_sum(g), 100.0, 100.0 * 1e-12);
  std::size_t interior = 0;
  for (std::size_t j = 0; j < g.size(); ++j) interior += g.interior(j) ? 1 : 0;
  EXPECT_EQ(interior, 19u * 19u);
}

TEST(BuildGrid, Errors) {
  try {
    build_grid(1, 10.0, 3.0);
    FAIL() << "expected NonConformingSpacing";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConformingSpacing);
  }
  try {
    build_grid(1, 10.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveSpacing);
  }
  try {
    build_grid(1, 1.0, 0.25);  // R/h = 4
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainTooCoarse);
  }
}

TEST(BuildGrid, WeightSumAcrossShapes) {
  for (int dim : {1, 2}) {
    for (double R : {4.0, 7.5, 12.0}) {
      const Grid g = build_grid(dim, R, 0.25);
      const double expected = std::pow(2.0 * R, dim);
      EXPECT_NEAR(weight_sum(g), expected, expected * 1e-12);
    }
  }
}

TEST(Sample, BoundaryIsZero) {
  const Grid g = build_grid(2, 4.0, 0.5);
  const Field u = sample(g, [](const Point&) { return 1.0; });
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_EQ(u[j], g.interior(j) ? 1.0 : 0.0);
}

TEST(Laplacian, ConstantAnnihilatedAwayFromBoundary) {
  for (int dim : {1, 2}) {
    const Grid g = build_grid(dim, 4.0, 0.25);
    const Field u = sample(g, [](const Point&) { return 3.0; });
    const Field lap = laplacian_apply(g, u);
    const double h = g.spacing();
    for (std::size_t j = 0; j < g.size(); ++j) {
      const Point& x = g.node(j);
      const bool far = std::abs(x[0]) < 4.0 - 1.5 * h && (dim == 1 || std::abs(x[1]) < 4.0 - 1.5 * h);
      if (far) {
        EXPECT_NEAR(lap[j], 0.0, 1e-10);
      }
      if (!g.interior(j)) {
        EXPECT_EQ(lap[j], 0.0);
      }
    }
  }
}

TEST(Laplacian, SineOracle) {
  const double R = 1.0;
  const Grid g = build_grid(1, R, 0.01);
  const double k = std::numbers::pi / R;
  const Field u = sample(g, [&](const Point& x) { return std::sin(k * x[0]); });
  const Field lap = laplacian_apply(g, u);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!g.interior(j)) continue;
    EXPECT_NEAR(lap[j], k * k * std::sin(k * g.node(j)[0]), 1e-3);
  }
}

TEST(Laplacian, GridMismatch) {
  const Grid a = build_grid(1, 4.0, 0.5);
  const Grid b = build_grid(1, 4.0, 0.25);
  const Field u(a);
  try {
    laplacian_apply(b, u);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(Laplacian, ConvergenceOrder) {
  // Truncation error of -u'' for u = exp(-x^2) and its 2D analogue.
  for (int dim : {1, 2}) {
    double prev = 0.0;
    for (double h : {0.2, 0.1, 0.05}) {
      const Grid g = build_grid(dim, 6.0, h);
      const Field u = sample(g, [](const Point& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1])); });
      const Field lap = laplacian_apply(g, u);
      double err = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (!g.interior(j)) continue;
        const Point& x = g.node(j);
        const double r2 = x[0] * x[0] + x[1] * x[1];
        const double exact = (2.0 * dim - 4.0 * r2) * std::exp(-r2);
        err = std::max(err, std::abs(lap[j] - exact));
      }
      if (prev > 0.0) {
        EXPECT_GE(prev / err, 3.5) << "dim " << dim << " h " << h;
      }
      prev = err;
    }
  }
}

TEST(Laplacian, SummationByPartsAndPositivity) {
  std::mt19937_64 rng(3);
  for (int dim : {1, 2}) {
    const Grid g = build_grid(dim, 5.0, dim == 1 ? 0.05 : 0.25);
    for (int trial = 0; trial < 10; ++trial) {
      const Field u = random_dirichlet(g, rng);
      const Field v = random_dirichlet(g, rng);
      const double uv = inner(g, u, laplacian_apply(g, v));
      const double vu = inner(g, v, laplacian_apply(g, u));
      EXPECT_NEAR(uv, vu, 1e-10 * std::max(std::abs(uv), 1.0));
      EXPECT_GT(inner(g, u, laplacian_apply(g, u)), 0.0);
    }
    EXPECT_EQ(inner(g, Field(g), laplacian_apply(g, Field(g))), 0.0);
  }
}

TEST(Integrate, Oracles) {
  {
    const Grid g = build_grid(1, 10.0, 0.1);
    std::vector<double> ones(g.size(), 1.0);
    EXPECT_NEAR(integrate(g, ones), 20.0, 1e-12);
  }
  const Grid g = build_grid(1, 10.0, 0.01);
  const Field gauss = sample(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  EXPECT_NEAR(integrate(g, gauss), std::sqrt(std::numbers::pi), 1e-8);
  // u^2 for the 1D Gausson e * exp(-x^2/2).
  const Field u2 = sample(g, [](const Point& x) { return std::exp(2.0) * std::exp(-x[0] * x[0]); });
  EXPECT_NEAR(integrate(g, u2), std::exp(2.0) * std::sqrt(std::numbers::pi), 1e-6);
}

TEST(Integrate, GridMismatch) {
  const Grid g = build_grid(1, 4.0, 0.5);
  std::vector<double> wrong(g.size() + 1, 1.0);
  try {
    integrate(g, wrong);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
  }
}

TEST(ZeroExtend, PreservesMassAndRoundTrips) {
  std::mt19937_64 rng(5);
  for (int dim : {1, 2}) {
    const Grid small = build_grid(dim, 5.0, 0.25);
    const Grid large = build_grid(dim, 10.0, 0.25);
    const Field u = random_dirichlet(small, rng);
    const Field ext = zero_extend(u, small, large);
    const double m0 = inner(small, u, u);
    EXPECT_NEAR(inner(large, ext, ext), m0, 1e-12 * m0);
    const Field back = restrict_to(ext, large, small);
    for (std::size_t j = 0; j < small.size(); ++j) EXPECT_EQ(back[j], u[j]);
    // Coinciding nodes carry the same value.
    for (std::size_t j = 0; j < small.size(); ++j) EXPECT_EQ(ext[large.nearest(small.node(j))], u[j]);
  }
}

TEST(ZeroExtend, Errors) {
  const Grid small = build_grid(1, 5.0, 0.25);
  const Grid large = build_grid(1, 10.0, 0.25);
  const Grid other = build_grid(1, 10.0, 0.5);
  try {
    zero_extend(Field(large), large, small);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShrinkingDomain);
  }
  try {
    zero_extend(Field(small), small, other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SpacingMismatch);
  }
}

TEST(FieldCsv, RoundTripIsExact) {
  std::mt19937_64 rng(9);
  for (int dim : {1, 2}) {
    const Grid g = build_grid(dim, 3.0, 0.25);
    const Field u = random_dirichlet(g, rng);
    std::stringstream ss;
    write_field_csv(ss, g, u);
    const std::string text = ss.str();
    EXPECT_EQ(text.rfind("dim,R,h\n", 0), 0u);
    const LoadedField back = read_field_csv(ss);
    EXPECT_EQ(back.grid.size(), g.size());
    for (std::size_t j = 0; j < g.size(); ++j) EXPECT_EQ(back.field[j], u[j]);
  }
}

TEST(Format, ShortestAndFull) {
  EXPECT_EQ(format_shortest(0.1), "0.1");
  EXPECT_EQ(std::stod(format_full(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(std::stod(format_shortest(6.54783)), 6.54783);
}

}  // namespace
}  // namespace lse
