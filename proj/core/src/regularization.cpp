#include "medrec/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "medrec/error.hpp"

namespace medrec {

void RegConfig::validate() const {
  if (!(alpha >= 0.0)) throw InvalidArgument("regularization alpha must be >= 0");
  if (!(beta >= 0.0)) throw InvalidArgument("regularization beta must be >= 0");
  if (!(q_lo < q_hi)) throw InvalidArgument("regularization box needs q_lo < q_hi");
}

bool box_feasible(const ScalarField& q, const RegConfig& cfg) {
  const auto v = q.values();
  return std::all_of(v.begin(), v.end(), [&](double x) { return cfg.feasible(x); });
}

double h1_energy(const ScalarField& q, double alpha) {
  if (alpha == 0.0) return 0.0;
  return 0.5 * alpha * (norm_sq(gradient_to_faces(q)) + norm_sq(q));
}

double nonsmooth_energy(const ScalarField& q, const RegConfig& cfg) {
  if (!box_feasible(q, cfg)) return std::numeric_limits<double>::infinity();
  double l1 = 0.0;
  for (double v : q.values()) l1 += std::abs(v);
  const double h = q.grid().spacing();
  return cfg.beta * l1 * h * h;
}

double eval_phi(const ScalarField& q, const RegConfig& cfg) {
  const double ns = nonsmooth_energy(q, cfg);
  if (std::isinf(ns)) return ns;
  return h1_energy(q, cfg.alpha) + ns;
}

ScalarField smooth_grad_phi(const ScalarField& q, const RegConfig& cfg) {
  if (cfg.alpha == 0.0) return ScalarField(q.grid());
  ScalarField g = negative_laplacian(q);
  g += q;
  g *= cfg.alpha;
  return g;
}

double prox_l1_box(double v, double tau_beta, double q_lo, double q_hi) {
  const double shrunk = std::copysign(std::max(std::abs(v) - tau_beta, 0.0), v);
  return std::clamp(shrunk, q_lo, q_hi);
}

ScalarField prox_l1_box(const ScalarField& v, double tau_beta, double q_lo, double q_hi) {
  if (!(q_lo < q_hi)) throw InvalidArgument("prox box needs q_lo < q_hi");
  if (!(tau_beta >= 0.0)) throw InvalidArgument("prox threshold must be >= 0");
  ScalarField out(v.grid());
  auto src = v.values();
  auto dst = out.values();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = prox_l1_box(src[k], tau_beta, q_lo, q_hi);
  return out;
}

double bregman_distance(const ScalarField& q, const ScalarField& p, const ScalarField& xi,
                        const RegConfig& cfg) {
  const double phi_q = eval_phi(q, cfg);
  const double phi_p = eval_phi(p, cfg);
  if (std::isinf(phi_q) || std::isinf(phi_p)) return std::numeric_limits<double>::infinity();
  return phi_q - phi_p - inner(xi, q - p);
}

ScalarField subgradient_phi(const ScalarField& p, const RegConfig& cfg, const ScalarField& cone) {
  ScalarField xi = smooth_grad_phi(p, cfg);
  auto pv = p.values();
  auto cv = cone.values();
  auto xv = xi.values();
  for (std::size_t k = 0; k < pv.size(); ++k) {
    if (pv[k] > 0.0) xv[k] += cfg.beta;
    else if (pv[k] < 0.0) xv[k] -= cfg.beta;
    if (pv[k] <= cfg.q_lo) xv[k] += std::min(cv[k], 0.0);
    else if (pv[k] >= cfg.q_hi) xv[k] += std::max(cv[k], 0.0);
  }
  return xi;
}

}  // namespace medrec
