#pragma once

// Forward model -div(sigma grad u) + mu u = g with conormal boundary flux
// sigma du/dnu = h, discretized on the staggered grid. Only used to
// synthesize measurements; the reconstruction never calls it.

#include <optional>
#include <span>
#include <vector>

#include "medrec/grid.hpp"

namespace medrec {

struct ForwardProblem {
  ScalarField sigma;
  ScalarField mu;
  BoundaryData neumann;
  std::optional<ScalarField> source;  // volumetric g, zero when absent
};

// Default tolerance for forward solves.
inline constexpr double kForwardTolerance = 1e-10;

// Solves the five-point system -div(avg(sigma) * grad u) + mu u =
// source + neumann_to_source(neumann) by Jacobi-preconditioned CG (cap 20 N^2
// iterations). Throws InvalidArgument for sigma <= 0 or mu < 0 anywhere,
// IncompatibleProblem when mu == 0 and the data do not integrate to zero, and
// SolverFailure when CG does not reach tol. With mu == 0 and compatible data
// the zero-mean solution is returned.
ScalarField solve_forward(const ForwardProblem& problem, double tol = kForwardTolerance);

// Applies the forward operator (used by tests and benchmarks).
ScalarField apply_forward_operator(const ScalarField& sigma, const ScalarField& mu,
                                   const ScalarField& u);

struct MeasurementSet {
  BoundaryData neumann;    // applied flux h
  BoundaryData dirichlet;  // observed trace f
};

// Excitation #1: h = +1 on the left side, -1 on the right. Excitation #2 is the
// same pattern rotated by 90 degrees: +1 bottom, -1 top.
std::vector<BoundaryData> default_excitations(const StaggeredGrid& grid, int count);

// Piecewise-constant transfer between a grid and its `factor`-times refinement.
ScalarField prolong(const ScalarField& coarse, int factor);
BoundaryData prolong(const BoundaryData& coarse, int factor);
BoundaryData restrict_boundary(const BoundaryData& fine, int factor);

// For each excitation (on the measurement grid) solves on the grid refined by
// `oversample` and restricts the trace back by averaging. The true media may
// be given on the measurement grid (prolonged piecewise-constant) or directly
// on the refined grid.
std::vector<MeasurementSet> generate_measurements(const ScalarField& true_sigma,
                                                  const ScalarField& true_mu,
                                                  std::span<const BoundaryData> excitations,
                                                  int oversample,
                                                  double tol = kForwardTolerance);

}  // namespace medrec
