#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "medrec/error.hpp"
#include "medrec/experiments.hpp"

namespace medrec {
namespace {

int count_value(const ScalarField& f, double v) {
  int c = 0;
  for (double x : f.values()) c += x == v;
  return c;
}

TEST(Examples, AllBuiltInsAreValid) {
  for (const auto& name : example_names()) {
    const ExampleSpec spec = make_example(name);
    EXPECT_EQ(spec.name, name);
    EXPECT_NO_THROW(spec.validate());
    EXPECT_EQ(spec.q_lo, 0.5);
    EXPECT_EQ(spec.q_hi, 30.0);
  }
  EXPECT_THROW(make_example("ex9"), InvalidArgument);
}

TEST(Examples, ExampleOneGeometry) {
  const ExampleSpec spec = make_example("ex1");
  EXPECT_EQ(spec.excitation_count, 1);
  EXPECT_TRUE(spec.reconstruct_mu);
  const CoefficientPair q = rasterize_truth(spec, StaggeredGrid(50));
  EXPECT_EQ(count_value(q.sigma, 20.0), 9);
  // y-range [0.275, 0.325) holds only the centers 0.29 and 0.31.
  EXPECT_EQ(count_value(q.mu, 20.0), 6);
  EXPECT_EQ(q.sigma(12, 32), 20.0);
  EXPECT_EQ(q.mu(17, 15), 20.0);
  EXPECT_EQ(q.sigma(0, 0), 1.0);
}

TEST(Examples, FixedAbsorptionExamples) {
  for (const char* name : {"ex2_1", "ex2_2", "ex4"}) {
    const ExampleSpec spec = make_example(name);
    EXPECT_FALSE(spec.reconstruct_mu);
    EXPECT_TRUE(spec.mu_inclusions.empty());
  }
  EXPECT_EQ(make_example("ex4").excitation_count, 2);
}

TEST(Examples, ValidationRejectsBadGeometry) {
  ExampleSpec spec = make_example("ex1");
  spec.sigma_inclusions.push_back(Square{0.95, 0.5, 0.2, 5.0});
  EXPECT_THROW(spec.validate(), InvalidArgument);
  spec = make_example("ex1");
  spec.mu_inclusions.push_back(SquareRing{0.5, 0.5, 0.2, 0.3, 5.0});
  EXPECT_THROW(spec.validate(), InvalidArgument);
  spec = make_example("ex1");
  spec.excitation_count = 3;
  EXPECT_THROW(spec.validate(), InvalidArgument);
}

TEST(Rasterize, HalfOpenEdges) {
  // Cell centers 0.125 and 0.375 sit exactly on the edges of [0.125, 0.375).
  const ScalarField f = rasterize({Square{0.25, 0.25, 0.25, 3.0}}, 1.0, StaggeredGrid(4));
  EXPECT_EQ(f(0, 0), 3.0);
  EXPECT_EQ(f(1, 0), 1.0);
  EXPECT_EQ(f(0, 1), 1.0);
  EXPECT_EQ(f(1, 1), 1.0);
  EXPECT_EQ(count_value(f, 3.0), 1);
}

TEST(Rasterize, RingHasAHole) {
  const SquareRing ring{0.5, 0.5, 0.5, 0.25, 4.0};
  EXPECT_TRUE(contains(ring, 0.3, 0.5));
  EXPECT_FALSE(contains(ring, 0.5, 0.5));
  EXPECT_FALSE(contains(ring, 0.9, 0.5));
  const ScalarField f = rasterize({ring}, 1.0, StaggeredGrid(8));
  // 4x4 outer block minus the 2x2 core.
  EXPECT_EQ(count_value(f, 4.0), 12);
}

TEST(Rasterize, LaterShapesWin) {
  const ScalarField f =
      rasterize({Square{0.5, 0.5, 0.5, 3.0}, Square{0.5, 0.5, 0.25, 7.0}}, 1.0, StaggeredGrid(8));
  EXPECT_EQ(f(4, 4), 7.0);
  EXPECT_EQ(f(2, 2), 3.0);
}

TEST(Noise, StandardDeviationMatchesTheLevel) {
  const StaggeredGrid grid(25000);  // 10^5 boundary samples
  BoundaryData f(grid);
  f[0] = 2.0;  // max|f| = 2
  const double eps = 0.1;
  const BoundaryData noisy = add_noise(f, eps, 7);
  double mean = 0.0, sq = 0.0;
  const auto n = static_cast<double>(f.size() - 1);
  for (std::size_t k = 1; k < f.size(); ++k) {
    mean += noisy[k];
    sq += noisy[k] * noisy[k];
  }
  mean /= n;
  const double std_dev = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(std_dev / (eps * 2.0), 1.0, 0.02);
  EXPECT_NEAR(mean, 0.0, 5.0 * eps * 2.0 / std::sqrt(n));
}

TEST(Noise, ReproducibleAndSeedDependent) {
  testing::Gen gen(81);
  const StaggeredGrid grid(500);
  const BoundaryData f = gen.boundary(grid);
  const BoundaryData a = add_noise(f, 0.2, 11), b = add_noise(f, 0.2, 11), c = add_noise(f, 0.2, 12);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
  const BoundaryData da = a - f, dc = c - f;
  const double corr = inner(da, dc) / std::sqrt(norm_sq(da) * norm_sq(dc));
  EXPECT_LT(std::abs(corr), 0.05);
  EXPECT_TRUE(add_noise(f, 0.0, 3) == f);
  EXPECT_THROW(add_noise(f, -0.1, 3), InvalidArgument);
}

TEST(Components, FourConnectivity) {
  // 1 1 0
  // 0 0 1
  // 0 1 1
  const std::vector<bool> mask{false, true, true, false, false, true, true, true, false};
  int count = 0;
  const auto labels = label_components(mask, 3, &count);
  EXPECT_EQ(count, 2);
  EXPECT_EQ(labels[6], labels[7]);
  EXPECT_EQ(labels[5], labels[2]);
  EXPECT_NE(labels[6], labels[5]);
  EXPECT_EQ(labels[0], -1);
}

TEST(Metrics, PerfectReconstruction) {
  const CoefficientPair truth = rasterize_truth(make_example("ex3"), StaggeredGrid(40));
  const Metrics m = compute_metrics(truth, truth);
  for (const auto* c : {&m.sigma, &m.mu}) {
    EXPECT_EQ(c->relative_l2_error, 0.0);
    EXPECT_EQ(c->support_jaccard, 1.0);
    EXPECT_EQ(c->components, 2);
    ASSERT_EQ(c->inclusions.size(), 2u);
    for (const auto& e : c->inclusions) EXPECT_EQ(e.distance, 0.0);
  }
  EXPECT_NEAR(m.sigma.inclusions[0].true_x, 0.5, 1e-12);
  EXPECT_NEAR(m.sigma.inclusions[0].true_y, 0.25, 1e-12);
}

TEST(Metrics, ShiftedAndMissingInclusions) {
  const StaggeredGrid grid(20);
  const ScalarField truth = rasterize({Square{0.5, 0.5, 0.2, 5.0}}, 1.0, grid);
  const ScalarField shifted = rasterize({Square{0.55, 0.5, 0.2, 5.0}}, 1.0, grid);
  const CoefficientMetrics s = compute_coefficient_metrics(shifted, truth, 1.0);
  ASSERT_EQ(s.inclusions.size(), 1u);
  EXPECT_NEAR(s.inclusions[0].distance, 0.05, 1e-12);
  EXPECT_NEAR(s.support_jaccard, 12.0 / 20.0, 1e-12);

  const CoefficientMetrics none = compute_coefficient_metrics(ScalarField(grid, 1.0), truth, 1.0);
  EXPECT_EQ(none.components, 0);
  EXPECT_TRUE(std::isinf(none.inclusions[0].distance));
  EXPECT_EQ(none.support_jaccard, 0.0);

  const CoefficientMetrics flat = compute_coefficient_metrics(truth, ScalarField(grid, 1.0), 1.0);
  EXPECT_EQ(flat.support_jaccard, 1.0);
  EXPECT_TRUE(flat.inclusions.empty());
}

}  // namespace
}  // namespace medrec
