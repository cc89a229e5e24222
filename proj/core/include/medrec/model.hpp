#pragma once

// First-order residual operator of the diffusion model and the total
// least-squares functional built on it.
//
// For a state v = (u, p) with p . nu = 0 and coefficients q = (sigma, mu):
//
//   L(v, q) = ( -div p + mu u ,  p - avg(sigma) grad u )
//
// The functional sums, over one state per measurement set,
//   |L(v, q) - (g, 0)|^2 + |trace(u) - f|^2
// and adds phi_sigma(sigma) + phi_mu(mu), where g = neumann_to_source(h).
// L is bilinear, so J is a convex quadratic in v for fixed q and convex in q
// for fixed v; sigma only enters the flux residual and mu only the divergence
// residual.

#include <optional>
#include <span>
#include <vector>

#include "medrec/forward.hpp"
#include "medrec/grid.hpp"
#include "medrec/regularization.hpp"

namespace medrec {

struct StatePair {
  explicit StatePair(const StaggeredGrid& grid) : u(grid), p(grid) {}
  StatePair(ScalarField u_, FluxField p_) : u(std::move(u_)), p(std::move(p_)) {}

  ScalarField u;
  FluxField p;
};

struct CoefficientPair {
  ScalarField sigma;
  ScalarField mu;
};

struct Residuals {
  ScalarField r_div;                   // -div p + mu u - g
  FluxField r_flux;                    // p - avg(sigma) grad u
  std::optional<BoundaryData> r_data;  // trace(u) - f, when data were given
};

Residuals apply_L(const StatePair& v, const CoefficientPair& q, const ScalarField& g);
Residuals residuals(const StatePair& v, const CoefficientPair& q, const MeasurementSet& data);

std::vector<ScalarField> sources_of(std::span<const MeasurementSet> data);

struct ObjectiveTerms {
  double div = 0.0;
  double flux = 0.0;
  double data = 0.0;
  double reg_sigma = 0.0;
  double reg_mu = 0.0;

  double misfit() const { return div + flux + data; }
  double total() const { return div + flux + data + reg_sigma + reg_mu; }
};

// One state per measurement set, in the same order.
ObjectiveTerms objective_terms(std::span<const StatePair> states, const CoefficientPair& q,
                               std::span<const MeasurementSet> data, const RegConfig& reg_sigma,
                               const RegConfig& reg_mu);
double eval_J(std::span<const StatePair> states, const CoefficientPair& q,
              std::span<const MeasurementSet> data, const RegConfig& reg_sigma,
              const RegConfig& reg_mu);

// The state-block objective |L_q v - (g, 0)|^2 + |Cu - f|^2 of one excitation.
double state_objective(const StatePair& v, const CoefficientPair& q, const MeasurementSet& data);

// Normal operator A = L_q^* L_q + C^* C of the state block for fixed q, with
// adjoints taken in the weighted inner products of the grid. Cells and faces
// share the weight h^2, so A is symmetric in the plain Euclidean sense on the
// packed vector [u, interior x-faces, interior y-faces].
class StateNormalOperator {
 public:
  explicit StateNormalOperator(const CoefficientPair& q);

  const StaggeredGrid& grid() const noexcept { return mu_.grid(); }

  StatePair apply(const StatePair& v) const;
  // L_q^* (g, 0) + C^* f
  StatePair rhs(const ScalarField& g, const BoundaryData& f) const;

  std::size_t dimension() const noexcept;
  void apply_packed(std::span<const double> in, std::span<double> out) const;
  std::vector<double> diagonal_packed() const;

 private:
  FluxField faces_;  // avg(sigma)
  ScalarField mu_;
};

std::size_t packed_dimension(const StaggeredGrid& grid);
void pack(const StatePair& v, std::span<double> out);
StatePair unpack(const StaggeredGrid& grid, std::span<const double> in);

// h^2-weighted inner product over u and p.
double inner(const StatePair& a, const StatePair& b);

struct MisfitGradients {
  ScalarField sigma;  // -2 avg^T( sum_e grad u_e * r_flux_e )
  ScalarField mu;     //  2 sum_e u_e * r_div_e
};

// L2-density gradients of the smooth misfit terms with respect to sigma and mu.
MisfitGradients coefficient_misfit_gradients(std::span<const StatePair> states,
                                             const CoefficientPair& q,
                                             std::span<const ScalarField> sources);

}  // namespace medrec
