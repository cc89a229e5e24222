#include "medrec/model.hpp"

#include <cmath>
#include <limits>

#include "medrec/error.hpp"

namespace medrec {
namespace {

void check_state(const StatePair& v, const CoefficientPair& q) {
  require_same_grid(v.u.grid(), v.p.grid());
  require_same_grid(v.u.grid(), q.sigma.grid());
  require_same_grid(v.u.grid(), q.mu.grid());
}

}  // namespace

Residuals apply_L(const StatePair& v, const CoefficientPair& q, const ScalarField& g) {
  check_state(v, q);
  require_same_grid(v.u.grid(), g.grid());
  ScalarField r_div = hadamard(q.mu, v.u);
  r_div -= divergence_to_cells(v.p);
  r_div -= g;
  FluxField r_flux = v.p;
  r_flux -= hadamard(average_to_faces(q.sigma), gradient_to_faces(v.u));
  return Residuals{std::move(r_div), std::move(r_flux), std::nullopt};
}

Residuals residuals(const StatePair& v, const CoefficientPair& q, const MeasurementSet& data) {
  Residuals r = apply_L(v, q, neumann_to_source(data.neumann));
  r.r_data = boundary_trace(v.u) - data.dirichlet;
  return r;
}

std::vector<ScalarField> sources_of(std::span<const MeasurementSet> data) {
  std::vector<ScalarField> out;
  out.reserve(data.size());
  for (const auto& m : data) out.push_back(neumann_to_source(m.neumann));
  return out;
}

ObjectiveTerms objective_terms(std::span<const StatePair> states, const CoefficientPair& q,
                               std::span<const MeasurementSet> data, const RegConfig& reg_sigma,
                               const RegConfig& reg_mu) {
  if (states.size() != data.size())
    throw InvalidArgument("objective needs one state per measurement set");
  if (data.empty()) throw InvalidArgument("objective needs at least one measurement set");
  ObjectiveTerms t;
  for (std::size_t e = 0; e < data.size(); ++e) {
    const Residuals r = residuals(states[e], q, data[e]);
    t.div += norm_sq(r.r_div);
    t.flux += norm_sq(r.r_flux);
    t.data += norm_sq(*r.r_data);
  }
  t.reg_sigma = eval_phi(q.sigma, reg_sigma);
  t.reg_mu = eval_phi(q.mu, reg_mu);
  return t;
}

double eval_J(std::span<const StatePair> states, const CoefficientPair& q,
              std::span<const MeasurementSet> data, const RegConfig& reg_sigma,
              const RegConfig& reg_mu) {
  return objective_terms(states, q, data, reg_sigma, reg_mu).total();
}

double state_objective(const StatePair& v, const CoefficientPair& q, const MeasurementSet& data) {
  const Residuals r = residuals(v, q, data);
  return norm_sq(r.r_div) + norm_sq(r.r_flux) + norm_sq(*r.r_data);
}

// ------------------------------------------------------------ normal operator

StateNormalOperator::StateNormalOperator(const CoefficientPair& q)
    : faces_(average_to_faces(q.sigma)), mu_(q.mu) {
  require_same_grid(q.sigma.grid(), q.mu.grid());
}

StatePair StateNormalOperator::apply(const StatePair& v) const {
  require_same_grid(grid(), v.u.grid());
  // a = -div p + mu u, b = p - s grad u
  ScalarField a = hadamard(mu_, v.u);
  a -= divergence_to_cells(v.p);
  FluxField b = v.p;
  b -= hadamard(faces_, gradient_to_faces(v.u));
  b.zero_boundary_normals();

  // L^*(a, b) = (mu a + div(s b), grad a + b)
  ScalarField out_u = hadamard(mu_, a);
  out_u += divergence_to_cells(hadamard(faces_, b));
  out_u += neumann_to_source(boundary_trace(v.u));
  FluxField out_p = gradient_to_faces(a);
  out_p += b;
  out_p.zero_boundary_normals();
  return StatePair(std::move(out_u), std::move(out_p));
}

StatePair StateNormalOperator::rhs(const ScalarField& g, const BoundaryData& f) const {
  require_same_grid(grid(), g.grid());
  require_same_grid(grid(), f.grid());
  ScalarField out_u = hadamard(mu_, g);
  out_u += neumann_to_source(f);
  return StatePair(std::move(out_u), gradient_to_faces(g));
}

std::size_t StateNormalOperator::dimension() const noexcept { return packed_dimension(grid()); }

void StateNormalOperator::apply_packed(std::span<const double> in, std::span<double> out) const {
  pack(apply(unpack(grid(), in)), out);
}

std::vector<double> StateNormalOperator::diagonal_packed() const {
  const StaggeredGrid& g = grid();
  const int n = g.n();
  const double inv_h = static_cast<double>(n);
  const double inv_h2 = inv_h * inv_h;
  StatePair diag(g);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double d = mu_(i, j) * mu_(i, j);
      if (i > 0) d += faces_.x(i, j) * faces_.x(i, j) * inv_h2;
      if (i < n - 1) d += faces_.x(i + 1, j) * faces_.x(i + 1, j) * inv_h2;
      if (j > 0) d += faces_.y(i, j) * faces_.y(i, j) * inv_h2;
      if (j < n - 1) d += faces_.y(i, j + 1) * faces_.y(i, j + 1) * inv_h2;
      int incidences = 0;
      if (i == 0) ++incidences;
      if (i == n - 1) ++incidences;
      if (j == 0) ++incidences;
      if (j == n - 1) ++incidences;
      diag.u(i, j) = d + incidences * inv_h;
    }
  }
  for (double& x : diag.p.x_values()) x = 2.0 * inv_h2 + 1.0;
  for (double& y : diag.p.y_values()) y = 2.0 * inv_h2 + 1.0;
  std::vector<double> out(dimension());
  pack(diag, out);
  return out;
}

std::size_t packed_dimension(const StaggeredGrid& grid) {
  const auto n = static_cast<std::size_t>(grid.n());
  return n * n + 2 * n * (n - 1);
}

void pack(const StatePair& v, std::span<double> out) {
  const int n = v.u.n();
  std::size_t k = 0;
  for (double x : v.u.values()) out[k++] = x;
  for (int j = 0; j < n; ++j)
    for (int i = 1; i < n; ++i) out[k++] = v.p.x(i, j);
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < n; ++i) out[k++] = v.p.y(i, j);
}

StatePair unpack(const StaggeredGrid& grid, std::span<const double> in) {
  if (in.size() != packed_dimension(grid))
    throw InvalidArgument("packed state has the wrong length");
  const int n = grid.n();
  StatePair v(grid);
  std::size_t k = 0;
  for (double& x : v.u.values()) x = in[k++];
  for (int j = 0; j < n; ++j)
    for (int i = 1; i < n; ++i) v.p.x(i, j) = in[k++];
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < n; ++i) v.p.y(i, j) = in[k++];
  return v;
}

double inner(const StatePair& a, const StatePair& b) { return inner(a.u, b.u) + inner(a.p, b.p); }

// ------------------------------------------------------------------ gradients

MisfitGradients coefficient_misfit_gradients(std::span<const StatePair> states,
                                             const CoefficientPair& q,
                                             std::span<const ScalarField> sources) {
  if (states.size() != sources.size())
    throw InvalidArgument("misfit gradients need one source per state");
  const StaggeredGrid& grid = q.sigma.grid();
  FluxField weighted(grid);
  ScalarField grad_mu(grid);
  for (std::size_t e = 0; e < states.size(); ++e) {
    const Residuals r = apply_L(states[e], q, sources[e]);
    weighted += hadamard(gradient_to_faces(states[e].u), r.r_flux);
    grad_mu += hadamard(states[e].u, r.r_div);
  }
  ScalarField grad_sigma = average_to_faces_transpose(weighted);
  grad_sigma *= -2.0;
  grad_mu *= 2.0;
  return MisfitGradients{std::move(grad_sigma), std::move(grad_mu)};
}

}  // namespace medrec
