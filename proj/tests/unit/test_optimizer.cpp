#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "generators.hpp"
#include "medrec/error.hpp"
#include "medrec/experiments.hpp"
#include "medrec/forward.hpp"
#include "medrec/optimizer.hpp"

namespace medrec {
namespace {

using testing::Gen;

AdiConfig small_config() {
  AdiConfig cfg;
  cfg.reg_sigma = {1e-3, 1e-4, 0.5, 30.0};
  cfg.reg_mu = {1e-3, 1e-4, 0.5, 30.0};
  return cfg;
}

struct ExampleRun {
  CoefficientPair truth;
  std::vector<MeasurementSet> data;
};

ExampleRun example_run(const char* name, int n) {
  const StaggeredGrid grid(n);
  const ExampleSpec spec = make_example(name);
  CoefficientPair truth = rasterize_truth(spec, grid);
  auto data = generate_measurements(truth.sigma, truth.mu,
                                    default_excitations(grid, spec.excitation_count), 1);
  return {std::move(truth), std::move(data)};
}

std::vector<MeasurementSet> example_data(const char* name, int n) {
  return example_run(name, n).data;
}

TEST(StateSubproblem, ZeroDataGiveZeroState) {
  Gen gen(61);
  const StaggeredGrid grid(8);
  const MeasurementSet data{BoundaryData(grid), BoundaryData(grid)};
  const auto r = solve_state_subproblem(gen.coefficients(grid), data, small_config(), StatePair(grid));
  EXPECT_EQ(norm_sq(r.state.u), 0.0);
  EXPECT_EQ(norm_sq(r.state.p), 0.0);
}

TEST(StateSubproblem, NoWorseThanTheTrueState) {
  const StaggeredGrid grid(16);
  const ExampleRun run = example_run("ex1", 16);
  const auto& data = run.data;
  const CoefficientPair* truth = &run.truth;
  const ScalarField u =
      solve_forward({truth->sigma, truth->mu, data[0].neumann, std::nullopt}, 1e-12);
  FluxField p = hadamard(average_to_faces(truth->sigma), gradient_to_faces(u));
  const StatePair exact(u, p);
  const double j_exact = state_objective(exact, *truth, data[0]);
  EXPECT_LT(j_exact, 1e-12);
  const auto r = solve_state_subproblem(*truth, data[0], small_config(), StatePair(grid));
  EXPECT_LE(state_objective(r.state, *truth, data[0]), j_exact + 1e-12);
  EXPECT_TRUE(r.state.p.admissible());
  const std::vector<StatePair> states{r.state};
  EXPECT_LE(state_normal_residuals(states, *truth, data)[0], 1e-8);
}

TEST(StateSubproblem, MinimizesTheStateObjective) {
  Gen gen(62);
  const StaggeredGrid grid(8);
  const CoefficientPair q = gen.coefficients(grid);
  const MeasurementSet data{gen.boundary(grid), gen.boundary(grid)};
  const auto r = solve_state_subproblem(q, data, small_config(), StatePair(grid));
  const double best = state_objective(r.state, q, data);
  for (int t = 0; t < 20; ++t) {
    const StatePair w = gen.state(grid);
    const StatePair v(r.state.u + 1e-3 * w.u, r.state.p + 1e-3 * w.p);
    EXPECT_GE(state_objective(v, q, data), best - 1e-14);
  }
}

TEST(StateSubproblem, RejectsInfeasibleCoefficients) {
  const StaggeredGrid grid(6);
  const CoefficientPair q{ScalarField(grid, 0.1), ScalarField(grid, 1.0)};
  const MeasurementSet data{BoundaryData(grid), BoundaryData(grid)};
  EXPECT_THROW(solve_state_subproblem(q, data, small_config(), StatePair(grid)), InvalidArgument);
}

TEST(StateSubproblem, IterationCapRaisesSolverFailure) {
  Gen gen(63);
  const StaggeredGrid grid(12);
  AdiConfig cfg = small_config();
  cfg.state_max_iterations = 2;
  const MeasurementSet data{gen.boundary(grid), gen.boundary(grid)};
  EXPECT_THROW(solve_state_subproblem(gen.coefficients(grid), data, cfg, StatePair(grid)),
               SolverFailure);
}

TEST(CoefficientSubproblem, ZeroStatesGiveTheLowerBound) {
  Gen gen(64);
  const StaggeredGrid grid(8);
  const std::vector<StatePair> states{StatePair(grid)};
  const std::vector<ScalarField> sources{ScalarField(grid)};
  AdiConfig cfg = small_config();
  cfg.reg_sigma = {0.1, 0.1, 0.5, 30.0};
  cfg.reg_mu = {0.1, 0.1, 0.5, 30.0};
  const auto r = solve_coefficient_subproblem(states, sources, cfg, gen.coefficients(grid));
  for (double v : r.q.sigma.values()) EXPECT_NEAR(v, 0.5, 1e-7);
  for (double v : r.q.mu.values()) EXPECT_NEAR(v, 0.5, 1e-7);
}

TEST(CoefficientSubproblem, UnregularizedMuIsPointwiseLeastSquares) {
  // With alpha = beta = 0 the mu block decouples per cell:
  // mu = clip(sum u t / sum u^2) with t = div p + g.
  Gen gen(65);
  const StaggeredGrid grid(8);
  const std::vector<StatePair> states{gen.state(grid), gen.state(grid)};
  const std::vector<ScalarField> sources{gen.scalar(grid), gen.scalar(grid)};
  AdiConfig cfg = small_config();
  cfg.reg_mu = {0.0, 0.0, 0.5, 30.0};
  cfg.update_sigma = false;
  cfg.coeff_inner_max = 5000;
  cfg.coeff_tol = 1e-12;
  const CoefficientPair start = gen.coefficients(grid);
  const auto r = solve_coefficient_subproblem(states, sources, cfg, start);
  EXPECT_TRUE(r.q.sigma == start.sigma);
  EXPECT_FALSE(r.sigma.updated);
  for (int j = 0; j < 8; ++j) {
    for (int i = 0; i < 8; ++i) {
      double num = 0.0, den = 0.0;
      for (std::size_t e = 0; e < 2; ++e) {
        const double t = divergence_to_cells(states[e].p)(i, j) + sources[e](i, j);
        num += states[e].u(i, j) * t;
        den += states[e].u(i, j) * states[e].u(i, j);
      }
      EXPECT_NEAR(r.q.mu(i, j), std::clamp(num / den, 0.5, 30.0), 1e-6);
    }
  }
}

TEST(CoefficientSubproblem, ConvergesToAFixedPoint) {
  Gen gen(66);
  const StaggeredGrid grid(12);
  const std::vector<StatePair> states{gen.state(grid)};
  const std::vector<ScalarField> sources{gen.scalar(grid)};
  const AdiConfig cfg = small_config();
  const auto r = solve_coefficient_subproblem(states, sources, cfg, gen.coefficients(grid));
  EXPECT_TRUE(r.sigma.converged);
  EXPECT_TRUE(r.mu.converged);
  EXPECT_LE(coefficient_fixed_point_residual(states, sources, r.q, true, cfg.reg_sigma,
                                             r.sigma.step), 1e-7);
  EXPECT_LE(coefficient_fixed_point_residual(states, sources, r.q, false, cfg.reg_mu, r.mu.step),
            1e-7);
  EXPECT_TRUE(box_feasible(r.q.sigma, cfg.reg_sigma));
  EXPECT_TRUE(box_feasible(r.q.mu, cfg.reg_mu));
}

TEST(CoefficientSubproblem, DoesNotIncreaseTheObjective) {
  Gen gen(67);
  const StaggeredGrid grid(10);
  const AdiConfig cfg = small_config();
  for (int t = 0; t < 10; ++t) {
    const std::vector<MeasurementSet> data{{gen.boundary(grid), gen.boundary(grid)}};
    const std::vector<StatePair> states{gen.state(grid)};
    const CoefficientPair q = gen.coefficients(grid);
    const auto r = solve_coefficient_subproblem(states, sources_of(data), cfg, q);
    EXPECT_LE(eval_J(states, r.q, data, cfg.reg_sigma, cfg.reg_mu),
              eval_J(states, q, data, cfg.reg_sigma, cfg.reg_mu));
  }
}

TEST(CoefficientSubproblem, PlainProximalGradientAgreesWithAcceleration) {
  Gen gen(68);
  const StaggeredGrid grid(8);
  const std::vector<StatePair> states{gen.state(grid)};
  const std::vector<ScalarField> sources{gen.scalar(grid)};
  AdiConfig cfg = small_config();
  cfg.coeff_inner_max = 20000;
  const CoefficientPair start = gen.coefficients(grid);
  const auto fast = solve_coefficient_subproblem(states, sources, cfg, start);
  cfg.accelerated = false;
  const auto slow = solve_coefficient_subproblem(states, sources, cfg, start);
  EXPECT_LT(std::sqrt(norm_sq(fast.q.mu - slow.q.mu) / norm_sq(fast.q.mu)), 1e-5);
  EXPECT_LT(std::sqrt(norm_sq(fast.q.sigma - slow.q.sigma) / norm_sq(fast.q.sigma)), 1e-5);
}

TEST(Adi, MonotoneWithBregmanBound) {
  const auto data = example_data("ex1", 16);
  const StaggeredGrid grid(16);
  AdiConfig cfg = small_config();
  cfg.max_outer = 15;
  const CoefficientPair q0{ScalarField(grid, 1.0), ScalarField(grid, 1.0)};
  const ReconstructionReport rep = adi_reconstruct(data, q0, cfg);
  ASSERT_EQ(rep.j_history.size(), rep.iterations.size() + 1);
  const double slack = 1e-10 * (1.0 + rep.j_history.front());
  for (std::size_t k = 1; k < rep.j_history.size(); ++k) {
    EXPECT_LE(rep.j_history[k], rep.j_history[k - 1] + slack);
    EXPECT_LE(rep.iterations[k - 1].j_after_state, rep.j_history[k - 1] + slack);
    EXPECT_LE(rep.iterations[k - 1].j_after_coefficients, rep.iterations[k - 1].j_after_state + slack);
  }
  for (const auto& b : bregman_diagnostics(rep)) {
    EXPECT_GE(b.bregman, -1e-10);
    EXPECT_TRUE(b.holds) << b.lhs << " > " << b.rhs;
  }
  EXPECT_TRUE(box_feasible(rep.coefficients.sigma, cfg.reg_sigma));
  EXPECT_TRUE(box_feasible(rep.coefficients.mu, cfg.reg_mu));
  EXPECT_LE(rep.final_state_residual, 1e-8);
}

TEST(Adi, Deterministic) {
  const auto data = example_data("ex4", 12);
  const StaggeredGrid grid(12);
  AdiConfig cfg = small_config();
  cfg.max_outer = 5;
  const CoefficientPair q0{ScalarField(grid, 1.0), ScalarField(grid, 1.0)};
  const auto a = adi_reconstruct(data, q0, cfg);
  const auto b = adi_reconstruct(data, q0, cfg);
  EXPECT_EQ(a.j_history, b.j_history);
  EXPECT_TRUE(a.coefficients.sigma == b.coefficients.sigma);
  EXPECT_TRUE(a.coefficients.mu == b.coefficients.mu);
}

TEST(Adi, FixedMuStaysFixed) {
  const auto data = example_data("ex2_1", 12);
  const StaggeredGrid grid(12);
  AdiConfig cfg = small_config();
  cfg.max_outer = 3;
  cfg.update_mu = false;
  const CoefficientPair q0{ScalarField(grid, 1.0), ScalarField(grid, 1.0)};
  const auto rep = adi_reconstruct(data, q0, cfg);
  EXPECT_TRUE(rep.coefficients.mu == q0.mu);
  for (const auto& rec : rep.iterations) EXPECT_FALSE(rec.mu.updated);
}

TEST(Adi, WarmRestartStagnates) {
  const auto data = example_data("ex1", 8);
  const StaggeredGrid grid(8);
  AdiConfig cfg = small_config();
  cfg.max_outer = 400;
  cfg.stagnation_tol = 1e-13;
  const CoefficientPair q0{ScalarField(grid, 1.0), ScalarField(grid, 1.0)};
  const auto first = adi_reconstruct(data, q0, cfg);
  cfg.stagnation_tol = 1e-9;
  const auto second = adi_reconstruct(data, first.coefficients, cfg, first.states);
  EXPECT_EQ(second.stop_reason, StopReason::stagnation);
  EXPECT_LE(second.iterations.size(), 2u);
}

TEST(Adi, SolverFailureIsReported) {
  const auto data = example_data("ex1", 12);
  const StaggeredGrid grid(12);
  AdiConfig cfg = small_config();
  cfg.state_max_iterations = 3;
  const CoefficientPair q0{ScalarField(grid, 1.0), ScalarField(grid, 1.0)};
  const auto rep = adi_reconstruct(data, q0, cfg);
  EXPECT_EQ(rep.stop_reason, StopReason::subproblem_failure);
  EXPECT_FALSE(rep.failure_message.empty());
  EXPECT_EQ(rep.j_history.size(), 1u);
}

TEST(Adi, ValidatesInputs) {
  const auto data = example_data("ex1", 8);
  const StaggeredGrid grid(8);
  AdiConfig cfg = small_config();
  const CoefficientPair bad{ScalarField(grid, 0.1), ScalarField(grid, 1.0)};
  EXPECT_THROW(adi_reconstruct(data, bad, cfg), InvalidArgument);
  cfg.max_outer = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  EXPECT_STREQ(to_string(StopReason::stagnation), "stagnation");
}

}  // namespace
}  // namespace medrec
