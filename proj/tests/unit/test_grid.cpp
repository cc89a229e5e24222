#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "medrec/error.hpp"
#include "medrec/grid.hpp"

namespace medrec {
namespace {

using testing::Gen;
using testing::rel_diff;

TEST(Grid, RejectsTooFewCells) {
  EXPECT_THROW(StaggeredGrid(3), InvalidArgument);
  EXPECT_NO_THROW(StaggeredGrid(4));
}

TEST(Grid, SpacingTimesCellsIsOne) {
  for (int n : {4, 7, 10, 50, 128}) EXPECT_EQ(StaggeredGrid(n).spacing() * n, 1.0);
}

TEST(Grid, MismatchedGridsThrow) {
  const ScalarField a(StaggeredGrid(4)), b(StaggeredGrid(5));
  EXPECT_THROW(inner(a, b), GridMismatch);
  EXPECT_THROW(a + b, GridMismatch);
}

TEST(Gradient, ConstantHasZeroGradient) {
  const FluxField g = gradient_to_faces(ScalarField(StaggeredGrid(6), 3.0));
  for (double v : g.x_values()) EXPECT_EQ(v, 0.0);
  for (double v : g.y_values()) EXPECT_EQ(v, 0.0);
}

TEST(Gradient, LinearFieldHasUnitInteriorSlope) {
  const StaggeredGrid grid(4);
  const FluxField g = gradient_to_faces(ScalarField::from_function(grid, [](double x, double) { return x; }));
  for (int j = 0; j < 4; ++j) {
    EXPECT_EQ(g.x(0, j), 0.0);
    EXPECT_EQ(g.x(4, j), 0.0);
    for (int i = 1; i < 4; ++i) EXPECT_NEAR(g.x(i, j), 1.0, 1e-14);
  }
  for (double v : g.y_values()) EXPECT_EQ(v, 0.0);
}

TEST(Divergence, LinearFluxHasUnitInteriorDivergence) {
  const StaggeredGrid grid(5);
  FluxField p(grid);
  for (int j = 0; j < 5; ++j)
    for (int i = 1; i < 5; ++i) p.x(i, j) = i * grid.spacing();
  const ScalarField d = divergence_to_cells(p);
  for (int j = 0; j < 5; ++j)
    for (int i = 1; i < 4; ++i) EXPECT_NEAR(d(i, j), 1.0, 1e-13);
  EXPECT_TRUE(divergence_to_cells(FluxField(grid)) == ScalarField(grid));
}

TEST(Average, ExamplesFromDefinition) {
  const StaggeredGrid grid(5);
  EXPECT_TRUE(average_to_faces(ScalarField(grid, 2.5)) == [&] {
    FluxField f(grid);
    for (double& v : f.x_values()) v = 2.5;
    for (double& v : f.y_values()) v = 2.5;
    return f;
  }());
  ScalarField q(grid, 1.0);
  q(2, 2) = 20.0;
  const FluxField a = average_to_faces(q);
  EXPECT_EQ(a.x(2, 2), 10.5);
  EXPECT_EQ(a.x(3, 2), 10.5);
  EXPECT_EQ(a.y(2, 2), 10.5);
  EXPECT_EQ(a.y(2, 3), 10.5);

  const ScalarField checker =
      ScalarField::from_function(grid, [&](double x, double y) {
        const int i = static_cast<int>(x * 5), j = static_cast<int>(y * 5);
        return (i + j) % 2 == 0 ? 0.0 : 2.0;
      });
  const FluxField c = average_to_faces(checker);
  for (int j = 0; j < 5; ++j)
    for (int i = 1; i < 5; ++i) EXPECT_EQ(c.x(i, j), 1.0);
}

TEST(Average, TransposeIsExact) {
  Gen gen(11);
  const StaggeredGrid grid(9);
  for (int t = 0; t < 20; ++t) {
    const ScalarField q = gen.scalar(grid);
    FluxField w(grid);
    for (double& v : w.x_values()) v = gen.uniform(-1, 1);
    for (double& v : w.y_values()) v = gen.uniform(-1, 1);
    EXPECT_LT(rel_diff(inner(average_to_faces(q), w), inner(q, average_to_faces_transpose(w))), 1e-12);
  }
}

TEST(Trace, ExamplesFromDefinition) {
  const StaggeredGrid grid(4);
  const BoundaryData c = boundary_trace(ScalarField(grid, 5.0));
  for (double v : c.values()) EXPECT_EQ(v, 5.0);
  const BoundaryData t =
      boundary_trace(ScalarField::from_function(grid, [](double, double y) { return y; }));
  for (int k = 0; k < 4; ++k) {
    EXPECT_DOUBLE_EQ(t.at(Side::bottom, k), 0.125);
    EXPECT_DOUBLE_EQ(t.at(Side::top, k), 0.875);
  }
}

TEST(Trace, ManufacturedTraceIsFirstOrder) {
  auto err = [](int n) {
    const StaggeredGrid grid(n);
    const auto u = ScalarField::from_function(
        grid, [](double x, double y) { return std::cos(std::numbers::pi * x) * std::cos(std::numbers::pi * y); });
    const BoundaryData t = boundary_trace(u);
    double e = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const auto [x, y] = BoundaryData::point_of(grid, k);
      e = std::max(e, std::abs(t[k] - std::cos(std::numbers::pi * x) * std::cos(std::numbers::pi * y)));
    }
    return e;
  };
  const double e16 = err(16), e32 = err(32);
  EXPECT_LT(e32, 0.6 * e16);
  EXPECT_LT(e16, 2.0 / 16);
}

TEST(BoundaryOrdering, SidesRunCounterclockwiseBlocks) {
  const StaggeredGrid grid(4);
  EXPECT_EQ(BoundaryData::side_of(grid, 0), Side::bottom);
  EXPECT_EQ(BoundaryData::side_of(grid, 4), Side::right);
  EXPECT_EQ(BoundaryData::side_of(grid, 8), Side::top);
  EXPECT_EQ(BoundaryData::side_of(grid, 12), Side::left);
  EXPECT_EQ((BoundaryData::cell_of(grid, 0)), (std::array<int, 2>{0, 0}));
  EXPECT_EQ((BoundaryData::cell_of(grid, 5)), (std::array<int, 2>{3, 1}));
  EXPECT_EQ((BoundaryData::cell_of(grid, 11)), (std::array<int, 2>{3, 3}));
  EXPECT_EQ((BoundaryData::cell_of(grid, 14)), (std::array<int, 2>{0, 2}));
  const auto p = BoundaryData::point_of(grid, 5);
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_DOUBLE_EQ(p[1], 0.375);
}

TEST(NeumannToSource, ExamplesFromDefinition) {
  const StaggeredGrid grid(10);
  EXPECT_TRUE(neumann_to_source(BoundaryData(grid)) == ScalarField(grid));
  const ScalarField g = neumann_to_source(BoundaryData(grid, 1.0));
  EXPECT_DOUBLE_EQ(g(0, 0), 20.0);
  EXPECT_DOUBLE_EQ(g(9, 9), 20.0);
  EXPECT_DOUBLE_EQ(g(0, 5), 10.0);
  EXPECT_DOUBLE_EQ(g(5, 9), 10.0);
  EXPECT_EQ(g(5, 5), 0.0);
}

TEST(InnerProducts, UnitMeasures) {
  for (int n : {4, 13, 32}) {
    const StaggeredGrid grid(n);
    EXPECT_NEAR(norm_sq(ScalarField(grid, 1.0)), 1.0, 1e-13);
    EXPECT_NEAR(norm_sq(BoundaryData(grid, 1.0)), 4.0, 1e-13);
  }
}

TEST(InnerProducts, CauchySchwarz) {
  Gen gen(3);
  const StaggeredGrid grid(8);
  for (int t = 0; t < 50; ++t) {
    const ScalarField a = gen.scalar(grid), b = gen.scalar(grid);
    EXPECT_LE(std::abs(inner(a, b)), std::sqrt(norm_sq(a) * norm_sq(b)) * (1 + 1e-14));
    const BoundaryData c = gen.boundary(grid), d = gen.boundary(grid);
    EXPECT_LE(std::abs(inner(c, d)), std::sqrt(norm_sq(c) * norm_sq(d)) * (1 + 1e-14));
  }
}

TEST(Properties, SummationByParts) {
  Gen gen(5);
  for (int t = 0; t < 100; ++t) {
    const StaggeredGrid grid(gen.integer(4, 20));
    const ScalarField u = gen.scalar(grid);
    const FluxField p = gen.admissible_flux(grid);
    const double lhs = inner(gradient_to_faces(u), p);
    const double rhs = -inner(u, divergence_to_cells(p));
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * (std::abs(lhs) + std::abs(rhs) + 1e-300));
  }
}

TEST(Properties, NeumannSourceDuality) {
  Gen gen(6);
  for (int t = 0; t < 100; ++t) {
    const StaggeredGrid grid(gen.integer(4, 20));
    const ScalarField v = gen.scalar(grid);
    const BoundaryData h = gen.boundary(grid);
    EXPECT_LT(rel_diff(inner(neumann_to_source(h), v), inner(h, boundary_trace(v))), 1e-12);
  }
}

TEST(Properties, OperatorsAreLinear) {
  Gen gen(7);
  const StaggeredGrid grid(12);
  for (int t = 0; t < 20; ++t) {
    const double a = gen.uniform(-2, 2), b = gen.uniform(-2, 2);
    const ScalarField x = gen.scalar(grid), y = gen.scalar(grid);
    const ScalarField xy = a * x + b * y;
    auto check_flux = [&](const FluxField& lhs, const FluxField& rhs) {
      EXPECT_LE(std::sqrt(norm_sq(lhs - rhs)), 1e-12 * std::sqrt(norm_sq(rhs)) + 1e-300);
    };
    auto check_cells = [&](const ScalarField& lhs, const ScalarField& rhs) {
      EXPECT_LE(std::sqrt(norm_sq(lhs - rhs)), 1e-12 * std::sqrt(norm_sq(rhs)) + 1e-300);
    };
    check_flux(gradient_to_faces(xy), a * gradient_to_faces(x) + b * gradient_to_faces(y));
    check_flux(average_to_faces(xy), a * average_to_faces(x) + b * average_to_faces(y));
    check_cells(negative_laplacian(xy), a * negative_laplacian(x) + b * negative_laplacian(y));
    const FluxField p = gen.admissible_flux(grid), q = gen.admissible_flux(grid);
    check_cells(divergence_to_cells(a * p + b * q),
                a * divergence_to_cells(p) + b * divergence_to_cells(q));
    const BoundaryData h = gen.boundary(grid), k = gen.boundary(grid);
    check_cells(neumann_to_source(a * h + b * k), a * neumann_to_source(h) + b * neumann_to_source(k));
  }
}

TEST(Fields, AdmissibilityAndFiniteness) {
  Gen gen(8);
  const StaggeredGrid grid(6);
  FluxField p = gen.admissible_flux(grid);
  EXPECT_TRUE(p.admissible());
  p.x(0, 2) = 1.0;
  EXPECT_FALSE(p.admissible());
  ScalarField s = gen.scalar(grid);
  EXPECT_TRUE(s.all_finite());
  s(1, 1) = std::nan("");
  EXPECT_FALSE(s.all_finite());
}

}  // namespace
}  // namespace medrec
