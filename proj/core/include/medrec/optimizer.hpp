#pragma once

// Alternating minimization of the total least-squares functional: a
// linear-quadratic state solve for fixed coefficients, then a proximal
// gradient solve for the coefficients with the states fixed. Each half step
// minimizes J over one block, so J never increases.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "medrec/cg.hpp"
#include "medrec/model.hpp"
#include "medrec/regularization.hpp"

namespace medrec {

struct AdiConfig {
  int max_outer = 50;
  double state_tol = 1e-8;
  int state_max_iterations = 0;  // 0 selects 20 N^2
  int coeff_inner_max = 200;
  double coeff_tol = 1e-8;
  // |J_k - J_{k+1}| <= stagnation_tol (1 + J_0) ends the run early. The
  // default 0 runs all max_outer iterations; 1e-12 is a sensible early stop.
  double stagnation_tol = 0.0;
  // Nesterov-type extrapolation with a monotone safeguard in the coefficient
  // block; false runs the plain proximal gradient iteration.
  bool accelerated = true;
  bool update_sigma = true;
  bool update_mu = true;
  RegConfig reg_sigma;
  RegConfig reg_mu;

  void validate() const;
};

struct StateSolveResult {
  StatePair state;
  CgResult stats;
};

// Minimizes |L_q v - (g, 0)|^2 + |Cu - f|^2 over admissible v = (u, p) by CG
// on the normal equations, warm-started. Throws SolverFailure when the
// iteration cap is reached and InvalidArgument when q leaves its box.
StateSolveResult solve_state_subproblem(const CoefficientPair& q, const MeasurementSet& data,
                                        const AdiConfig& cfg, const StatePair& warm_start);

struct BlockSolveInfo {
  int iterations = 0;
  double fixed_point_residual = 0.0;  // |x - T(x)| / |x| at the returned x
  double step = 0.0;                  // tau = 1 / L actually used
  bool converged = false;
  bool updated = false;  // false when the block is held fixed
};

struct CoefficientSolveResult {
  CoefficientPair q;
  // Minus the misfit gradients at q: the subgradient of phi that the
  // optimality condition of the block prescribes.
  ScalarField xi_sigma;
  ScalarField xi_mu;
  BlockSolveInfo sigma;
  BlockSolveInfo mu;
};

// sigma and mu are decoupled and solved independently, each from warm_start.
// Returns the best iterate with converged == false when coeff_inner_max is hit.
CoefficientSolveResult solve_coefficient_subproblem(std::span<const StatePair> states,
                                                    std::span<const ScalarField> sources,
                                                    const AdiConfig& cfg,
                                                    const CoefficientPair& warm_start);

// |x - prox(x - tau grad F(x))| / |x| for one coefficient block.
double coefficient_fixed_point_residual(std::span<const StatePair> states,
                                        std::span<const ScalarField> sources,
                                        const CoefficientPair& q, bool sigma_block,
                                        const RegConfig& reg, double step);

// |A v - b| / |b| of the state normal equations for each excitation.
std::vector<double> state_normal_residuals(std::span<const StatePair> states,
                                           const CoefficientPair& q,
                                           std::span<const MeasurementSet> data);

enum class StopReason { max_iterations, stagnation, subproblem_failure };
const char* to_string(StopReason reason);

struct IterationRecord {
  double j_after_state = 0.0;
  double j_after_coefficients = 0.0;
  double state_residual = 0.0;  // worst excitation
  int state_iterations = 0;     // summed over excitations
  BlockSolveInfo sigma;
  BlockSolveInfo mu;
  // E(q_k, q_{k+1}) with xi = -grad misfit(q_{k+1}).
  double bregman = 0.0;
  // |L_{q_k}(v_{k+1} - v_k)|^2 + |C(u_{k+1} - u_k)|^2
  double state_decrement = 0.0;
  // |L(v_{k+1}, q_{k+1}) - L(v_{k+1}, q_k)|^2
  double coefficient_decrement = 0.0;
};

struct ReconstructionReport {
  explicit ReconstructionReport(CoefficientPair initial) : coefficients(std::move(initial)) {}

  std::vector<StatePair> states;
  CoefficientPair coefficients;
  std::vector<double> j_history;  // J_0 followed by J after each outer iteration
  std::vector<IterationRecord> iterations;
  StopReason stop_reason = StopReason::max_iterations;
  std::string failure_message;

  // Residuals reported by the last solve of each block.
  double final_state_residual = 0.0;
  double final_coefficient_residual = 0.0;
  // State normal-equation residual re-evaluated at the final coefficients.
  double joint_state_residual = 0.0;
};

ReconstructionReport adi_reconstruct(std::span<const MeasurementSet> data,
                                     const CoefficientPair& initial_q, const AdiConfig& cfg,
                                     std::optional<std::vector<StatePair>> initial_states = {});

struct BregmanCheck {
  double bregman = 0.0;
  double lhs = 0.0;  // J_m + sum_{k<m} (E_k + decrements_k)
  double rhs = 0.0;  // J_0 + 1e-8 (1 + J_0)
  bool holds = false;
};

// Telescoped descent bound J_m + sum (E + decrements) <= J_0 per iteration m.
std::vector<BregmanCheck> bregman_diagnostics(const ReconstructionReport& report);

}  // namespace medrec
