#include "medrec/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

#include "medrec/error.hpp"
#include "medrec/parallel.hpp"

namespace medrec {
namespace {

constexpr int kPowerIterations = 20;
constexpr double kLipschitzMargin = 1.05;

double euclidean_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double relative_change(const ScalarField& from, const ScalarField& to) {
  double num = 0.0;
  double den = 0.0;
  auto a = from.values();
  auto b = to.values();
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += (b[k] - a[k]) * (b[k] - a[k]);
    den += a[k] * a[k];
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

double l1_integral(const ScalarField& x) {
  double s = 0.0;
  for (double v : x.values()) s += std::abs(v);
  const double h = x.grid().spacing();
  return s * h * h;
}

// Deterministic start vector in [-1, 1] with energy in every mode.
ScalarField power_start(const StaggeredGrid& grid) {
  ScalarField v(grid);
  std::uint64_t state = 0x9E3779B97F4A7C15ULL;
  for (double& x : v.values()) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    x = 2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0;
  }
  return v;
}

// F(x) = 1/2 <x, Hx> - <b, x> + const plus the nonsmooth beta|x| + box term.
class CoefficientBlock {
 public:
  CoefficientBlock(std::function<ScalarField(const ScalarField&)> misfit_hessian, ScalarField linear,
                   RegConfig reg)
      : misfit_hessian_(std::move(misfit_hessian)), linear_(std::move(linear)), reg_(reg) {}

  ScalarField hessian(const ScalarField& x) const {
    ScalarField out = misfit_hessian_(x);
    out += smooth_grad_phi(x, reg_);
    return out;
  }

  ScalarField gradient(const ScalarField& x) const { return hessian(x) - linear_; }

  double lipschitz() const {
    ScalarField v = power_start(linear_.grid());
    double estimate = 0.0;
    for (int it = 0; it < kPowerIterations; ++it) {
      const double norm = euclidean_norm(v.values());
      if (norm == 0.0) break;
      v *= 1.0 / norm;
      ScalarField hv = hessian(v);
      estimate = inner(v, hv) / norm_sq(v);
      v = std::move(hv);
    }
    return std::max(kLipschitzMargin * estimate, std::numeric_limits<double>::min());
  }


  // Proximal gradient step from y. Raises `lipschitz` until the descent
  // inequality 1/2 <d, H d> <= L/2 |d|^2 holds for d = x - y.
  ScalarField step_from(const ScalarField& y, double& lipschitz) const {
    const ScalarField grad = gradient(y);
    for (;;) {
      const double tau = 1.0 / lipschitz;
      ScalarField target = y;
      target -= tau * grad;
      ScalarField x = prox_l1_box(target, tau * reg_.beta, reg_.q_lo, reg_.q_hi);
      const ScalarField d = x - y;
      const double dd = norm_sq(d);
      if (dd == 0.0 || inner(d, hessian(d)) <= lipschitz * dd * (1.0 + 1e-12)) return x;
      lipschitz *= 2.0;
    }
  }

  // Phi(z) - Phi(x) evaluated through the quadratic expansion around x.
  double delta_objective(const ScalarField& x, const ScalarField& z) const {
    const ScalarField d = z - x;
    return inner(gradient(x), d) + 0.5 * inner(d, hessian(d)) +
           reg_.beta * (l1_integral(z) - l1_integral(x));
  }

  const RegConfig& reg() const { return reg_; }

 private:
  std::function<ScalarField(const ScalarField&)> misfit_hessian_;
  ScalarField linear_;
  RegConfig reg_;
};

CoefficientBlock sigma_block(std::span<const StatePair> states, const RegConfig& reg) {
  const StaggeredGrid& grid = states.front().u.grid();
  FluxField weight(grid);
  FluxField cross(grid);
  for (const auto& v : states) {
    const FluxField gu = gradient_to_faces(v.u);
    weight += hadamard(gu, gu);
    cross += hadamard(gu, v.p);
  }
  ScalarField linear = average_to_faces_transpose(cross);
  linear *= 2.0;
  auto hessian = [weight](const ScalarField& x) {
    ScalarField out = average_to_faces_transpose(hadamard(weight, average_to_faces(x)));
    out *= 2.0;
    return out;
  };
  return CoefficientBlock(hessian, std::move(linear), reg);
}

CoefficientBlock mu_block(std::span<const StatePair> states, std::span<const ScalarField> sources,
                          const RegConfig& reg) {
  const StaggeredGrid& grid = states.front().u.grid();
  ScalarField weight(grid);
  ScalarField linear(grid);
  for (std::size_t e = 0; e < states.size(); ++e) {
    ScalarField target = divergence_to_cells(states[e].p);
    target += sources[e];
    weight += hadamard(states[e].u, states[e].u);
    linear += hadamard(states[e].u, target);
  }
  linear *= 2.0;
  auto hessian = [weight](const ScalarField& x) {
    ScalarField out = hadamard(weight, x);
    out *= 2.0;
    return out;
  };
  return CoefficientBlock(hessian, std::move(linear), reg);
}

struct BlockOutcome {
  ScalarField x;
  BlockSolveInfo info;
};

double fixed_point_residual(const CoefficientBlock& block, const ScalarField& x, double lipschitz) {
  double l = lipschitz;
  return relative_change(x, block.step_from(x, l));
}

BlockOutcome solve_block(const CoefficientBlock& block, const ScalarField& warm_start,
                         const AdiConfig& cfg) {
  const RegConfig& reg = block.reg();
  double lipschitz = block.lipschitz();
  ScalarField x = prox_l1_box(warm_start, 0.0, reg.q_lo, reg.q_hi);
  ScalarField y = x;
  double momentum = 1.0;

  BlockSolveInfo info;
  info.updated = true;
  for (int it = 0; it < cfg.coeff_inner_max; ++it) {
    ScalarField z = block.step_from(y, lipschitz);
    ++info.iterations;
    if (cfg.accelerated) {
      const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      if (block.delta_objective(x, z) <= 0.0) {
        ScalarField x_next = std::move(z);
        y = x_next;
        y += ((momentum - 1.0) / next) * (x_next - x);
        x = std::move(x_next);
        momentum = next;
      } else {
        // Extrapolation overshot: keep x and restart the momentum.
        y = x;
        momentum = 1.0;
      }
    } else {
      x = std::move(z);
      y = x;
    }
    if (fixed_point_residual(block, x, lipschitz) <= cfg.coeff_tol) {
      info.converged = true;
      break;
    }
  }

  // Finish with a plain step: its output is a prox image, hence feasible and
  // no worse than x.
  ScalarField last = block.step_from(x, lipschitz);
  info.step = 1.0 / lipschitz;
  info.fixed_point_residual = fixed_point_residual(block, last, lipschitz);
  info.converged = info.fixed_point_residual <= cfg.coeff_tol;
  return BlockOutcome{std::move(last), info};
}

}  // namespace

void AdiConfig::validate() const {
  if (max_outer < 1) throw InvalidArgument("max_outer must be >= 1");
  if (!(state_tol > 0.0) || !(coeff_tol > 0.0)) throw InvalidArgument("tolerances must be > 0");
  if (coeff_inner_max < 1) throw InvalidArgument("coeff_inner_max must be >= 1");
  if (state_max_iterations < 0) throw InvalidArgument("state_max_iterations must be >= 0");
  if (!(stagnation_tol >= 0.0)) throw InvalidArgument("stagnation_tol must be >= 0");
  reg_sigma.validate();
  reg_mu.validate();
}

StateSolveResult solve_state_subproblem(const CoefficientPair& q, const MeasurementSet& data,
                                        const AdiConfig& cfg, const StatePair& warm_start) {
  if (!box_feasible(q.sigma, cfg.reg_sigma) || !box_feasible(q.mu, cfg.reg_mu))
    throw InvalidArgument("state subproblem requires box-feasible coefficients");
  const StateNormalOperator op(q);
  const StatePair rhs = op.rhs(neumann_to_source(data.neumann), data.dirichlet);

  std::vector<double> b(op.dimension());
  std::vector<double> x(op.dimension());
  pack(rhs, b);
  pack(warm_start, x);
  std::vector<double> inv_diag = op.diagonal_packed();
  for (double& d : inv_diag) d = 1.0 / d;

  const int n = q.sigma.n();
  const int cap = cfg.state_max_iterations > 0 ? cfg.state_max_iterations : 20 * n * n;
  const CgResult cg = preconditioned_cg(
      [&op](std::span<const double> in, std::span<double> out) { op.apply_packed(in, out); },
      inv_diag, b, x, cfg.state_tol, cap);
  if (!cg.converged)
    throw SolverFailure("state subproblem did not converge", cg.relative_residual, cg.iterations);
  return StateSolveResult{unpack(q.sigma.grid(), x), cg};
}

CoefficientSolveResult solve_coefficient_subproblem(std::span<const StatePair> states,
                                                    std::span<const ScalarField> sources,
                                                    const AdiConfig& cfg,
                                                    const CoefficientPair& warm_start) {
  if (states.empty()) throw InvalidArgument("coefficient subproblem needs at least one state");
  if (states.size() != sources.size())
    throw InvalidArgument("coefficient subproblem needs one source per state");

  CoefficientSolveResult result{warm_start, ScalarField(warm_start.sigma.grid()),
                                ScalarField(warm_start.mu.grid()), {}, {}};
  if (cfg.update_sigma) {
    BlockOutcome out = solve_block(sigma_block(states, cfg.reg_sigma), warm_start.sigma, cfg);
    result.q.sigma = std::move(out.x);
    result.sigma = out.info;
  }
  if (cfg.update_mu) {
    BlockOutcome out = solve_block(mu_block(states, sources, cfg.reg_mu), warm_start.mu, cfg);
    result.q.mu = std::move(out.x);
    result.mu = out.info;
  }
  MisfitGradients grad = coefficient_misfit_gradients(states, result.q, sources);
  result.xi_sigma = -1.0 * std::move(grad.sigma);
  result.xi_mu = -1.0 * std::move(grad.mu);
  return result;
}

double coefficient_fixed_point_residual(std::span<const StatePair> states,
                                        std::span<const ScalarField> sources,
                                        const CoefficientPair& q, bool sigma_block_selected,
                                        const RegConfig& reg, double step) {
  const CoefficientBlock block = sigma_block_selected ? sigma_block(states, reg)
                                                      : mu_block(states, sources, reg);
  const ScalarField& x = sigma_block_selected ? q.sigma : q.mu;
  ScalarField target = x;
  target -= step * block.gradient(x);
  return relative_change(x, prox_l1_box(target, step * reg.beta, reg.q_lo, reg.q_hi));
}

std::vector<double> state_normal_residuals(std::span<const StatePair> states,
                                           const CoefficientPair& q,
                                           std::span<const MeasurementSet> data) {
  const StateNormalOperator op(q);
  std::vector<double> out;
  std::vector<double> av(op.dimension());
  std::vector<double> b(op.dimension());
  for (std::size_t e = 0; e < data.size(); ++e) {
    pack(op.rhs(neumann_to_source(data[e].neumann), data[e].dirichlet), b);
    std::vector<double> v(op.dimension());
    pack(states[e], v);
    op.apply_packed(v, av);
    double num = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) num += (b[k] - av[k]) * (b[k] - av[k]);
    const double den = euclidean_norm(b);
    out.push_back(den > 0.0 ? std::sqrt(num) / den : std::sqrt(num));
  }
  return out;
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::stagnation: return "stagnation";
    case StopReason::subproblem_failure: return "subproblem_failure";
  }
  return "unknown";
}

ReconstructionReport adi_reconstruct(std::span<const MeasurementSet> data,
                                     const CoefficientPair& initial_q, const AdiConfig& cfg,
                                     std::optional<std::vector<StatePair>> initial_states) {
  cfg.validate();
  if (data.empty()) throw InvalidArgument("reconstruction needs at least one measurement set");
  const StaggeredGrid& grid = initial_q.sigma.grid();
  require_same_grid(grid, initial_q.mu.grid());
  for (const auto& m : data) require_same_grid(grid, m.neumann.grid());
  if (!box_feasible(initial_q.sigma, cfg.reg_sigma) || !box_feasible(initial_q.mu, cfg.reg_mu))
    throw InvalidArgument("initial coefficients must lie inside their boxes");

  ReconstructionReport report(initial_q);
  if (initial_states) {
    if (initial_states->size() != data.size())
      throw InvalidArgument("initial states must match the measurement sets");
    report.states = std::move(*initial_states);
  } else {
    report.states.assign(data.size(), StatePair(grid));
  }
  const std::vector<ScalarField> sources = sources_of(data);

  const double j0 = eval_J(report.states, report.coefficients, data, cfg.reg_sigma, cfg.reg_mu);
  report.j_history.push_back(j0);

  for (int k = 0; k < cfg.max_outer; ++k) {
    IterationRecord rec;
    const CoefficientPair& q = report.coefficients;

    // State block: excitations are independent given q.
    std::vector<std::optional<StateSolveResult>> solved(data.size());
    try {
      parallel_for(data.size(), [&](std::size_t e) {
        solved[e] = solve_state_subproblem(q, data[e], cfg, report.states[e]);
      });
    } catch (const SolverFailure& failure) {
      report.stop_reason = StopReason::subproblem_failure;
      report.failure_message = failure.what();
      return report;
    }
    std::vector<StatePair> states;
    states.reserve(data.size());
    for (std::size_t e = 0; e < data.size(); ++e) {
      rec.state_residual = std::max(rec.state_residual, solved[e]->stats.relative_residual);
      rec.state_iterations += solved[e]->stats.iterations;
      StatePair delta(solved[e]->state.u - report.states[e].u,
                      solved[e]->state.p - report.states[e].p);
      const Residuals r = apply_L(delta, q, ScalarField(grid));
      rec.state_decrement += norm_sq(r.r_div) + norm_sq(r.r_flux) +
                             norm_sq(boundary_trace(delta.u));
      states.push_back(std::move(solved[e]->state));
    }
    rec.j_after_state = eval_J(states, q, data, cfg.reg_sigma, cfg.reg_mu);

    // Coefficient block.
    CoefficientSolveResult coeff = solve_coefficient_subproblem(states, sources, cfg, q);
    rec.sigma = coeff.sigma;
    rec.mu = coeff.mu;
    if (coeff.sigma.updated)
      rec.bregman += bregman_distance(q.sigma, coeff.q.sigma, coeff.xi_sigma, cfg.reg_sigma);
    if (coeff.mu.updated)
      rec.bregman += bregman_distance(q.mu, coeff.q.mu, coeff.xi_mu, cfg.reg_mu);
    for (std::size_t e = 0; e < data.size(); ++e) {
      const ScalarField zero(grid);
      const Residuals before = apply_L(states[e], q, zero);
      const Residuals after = apply_L(states[e], coeff.q, zero);
      rec.coefficient_decrement +=
          norm_sq(after.r_div - before.r_div) + norm_sq(after.r_flux - before.r_flux);
    }
    rec.j_after_coefficients = eval_J(states, coeff.q, data, cfg.reg_sigma, cfg.reg_mu);

    report.states = std::move(states);
    report.coefficients = std::move(coeff.q);
    report.final_state_residual = rec.state_residual;
    report.final_coefficient_residual =
        std::max(coeff.sigma.updated ? coeff.sigma.fixed_point_residual : 0.0,
                 coeff.mu.updated ? coeff.mu.fixed_point_residual : 0.0);
    const double previous = report.j_history.back();
    report.j_history.push_back(rec.j_after_coefficients);
    report.iterations.push_back(rec);

    if (std::abs(previous - rec.j_after_coefficients) <= cfg.stagnation_tol * (1.0 + j0)) {
      report.stop_reason = StopReason::stagnation;
      break;
    }
  }

  const std::vector<double> joint = state_normal_residuals(report.states, report.coefficients, data);
  report.joint_state_residual = *std::max_element(joint.begin(), joint.end());
  return report;
}

std::vector<BregmanCheck> bregman_diagnostics(const ReconstructionReport& report) {
  std::vector<BregmanCheck> out;
  if (report.j_history.empty()) return out;
  const double j0 = report.j_history.front();
  const double rhs = j0 + 1e-8 * (1.0 + std::abs(j0));
  double accumulated = 0.0;
  for (std::size_t m = 0; m < report.iterations.size(); ++m) {
    const IterationRecord& rec = report.iterations[m];
    accumulated += rec.bregman + rec.state_decrement + rec.coefficient_decrement;
    BregmanCheck check;
    check.bregman = rec.bregman;
    check.lhs = report.j_history[m + 1] + accumulated;
    check.rhs = rhs;
    check.holds = std::isfinite(check.lhs) && check.lhs <= check.rhs;
    out.push_back(check);
  }
  return out;
}

}  // namespace medrec
