#pragma once

// Mixed L1-H1-box penalty for one coefficient q:
//
//   phi(q) = int alpha/2 (|grad q|^2 + q^2) + int beta |q| + chi_[lo, hi](q)
//
// split into a smooth H1 part (handled by gradients) and a nonsmooth
// L1 + box part (handled by its closed-form proximal map). All integrals use
// the cell inner product of the grid, and all gradients returned here are
// L2 densities: d/dt phi(q + t w) = inner(grad, w).

#include "medrec/grid.hpp"

namespace medrec {

struct RegConfig {
  double alpha = 0.0;  // H1 weight (multiplies 1/2)
  double beta = 0.0;   // L1 weight
  double q_lo = 0.0;
  double q_hi = 1.0;

  // Throws InvalidArgument unless q_lo < q_hi, alpha >= 0, beta >= 0.
  void validate() const;
  bool feasible(double value) const { return value >= q_lo && value <= q_hi; }
};

bool box_feasible(const ScalarField& q, const RegConfig& cfg);

// alpha/2 (|grad q|^2 + |q|^2).
double h1_energy(const ScalarField& q, double alpha);
// beta |q|_1 + chi: +infinity if any cell leaves the box.
double nonsmooth_energy(const ScalarField& q, const RegConfig& cfg);
double eval_phi(const ScalarField& q, const RegConfig& cfg);

// alpha (-Lap_h q + q), the gradient of h1_energy.
ScalarField smooth_grad_phi(const ScalarField& q, const RegConfig& cfg);

// argmin_x 1/2 (x - v)^2 + tau_beta |x| + chi_[lo, hi](x) = clip(shrink(v)).
double prox_l1_box(double v, double tau_beta, double q_lo, double q_hi);
ScalarField prox_l1_box(const ScalarField& v, double tau_beta, double q_lo, double q_hi);

// phi(q) - phi(p) - <xi, q - p>; +infinity when q or p is infeasible.
double bregman_distance(const ScalarField& q, const ScalarField& p, const ScalarField& xi,
                        const RegConfig& cfg);

// A deterministic element of d(phi)(p): the smooth gradient plus, per cell,
// beta*sign(p) (0 at p == 0) plus the normal-cone element `cone` clamped to
// the correct sign at active bounds (zero in the interior).
ScalarField subgradient_phi(const ScalarField& p, const RegConfig& cfg, const ScalarField& cone);

}  // namespace medrec
