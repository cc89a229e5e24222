#include "medrec/cg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace medrec {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

CgResult preconditioned_cg(const LinearOperator& apply, std::span<const double> inverse_diagonal,
                           std::span<const double> rhs, std::span<double> x,
                           double relative_tolerance, int max_iterations) {
  const std::size_t dim = rhs.size();
  const double rhs_norm = std::sqrt(dot(rhs, rhs));
  CgResult result;
  if (rhs_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    result.converged = true;
    return result;
  }

  std::vector<double> r(dim), z(dim), d(dim), ad(dim);
  auto true_residual = [&] {
    apply(x, ad);
    for (std::size_t k = 0; k < dim; ++k) r[k] = rhs[k] - ad[k];
    return std::sqrt(dot(r, r)) / rhs_norm;
  };
  auto restart = [&] {
    for (std::size_t k = 0; k < dim; ++k) z[k] = inverse_diagonal[k] * r[k];
    std::copy(z.begin(), z.end(), d.begin());
    return dot(r, z);
  };

  result.relative_residual = true_residual();
  if (result.relative_residual <= relative_tolerance) {
    result.converged = true;
    return result;
  }
  double rz = restart();

  while (result.iterations < max_iterations) {
    apply(d, ad);
    const double curvature = dot(d, ad);
    if (!(curvature > 0.0)) break;
    const double step = rz / curvature;
    for (std::size_t k = 0; k < dim; ++k) {
      x[k] += step * d[k];
      r[k] -= step * ad[k];
    }
    ++result.iterations;

    if (std::sqrt(dot(r, r)) / rhs_norm <= relative_tolerance) {
      // The recursive residual drifts; confirm against b - A x before stopping.
      result.relative_residual = true_residual();
      if (result.relative_residual <= relative_tolerance) {
        result.converged = true;
        return result;
      }
      rz = restart();
      continue;
    }

    for (std::size_t k = 0; k < dim; ++k) z[k] = inverse_diagonal[k] * r[k];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k = 0; k < dim; ++k) d[k] = z[k] + beta * d[k];
  }

  result.relative_residual = true_residual();
  result.converged = result.relative_residual <= relative_tolerance;
  return result;
}

}  // namespace medrec
