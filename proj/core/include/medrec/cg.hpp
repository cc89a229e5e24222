#pragma once

#include <functional>
#include <span>

namespace medrec {

// y = A x for a symmetric positive (semi)definite A.
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;  // ||b - A x|| / ||b||, recomputed from x
  bool converged = false;
};

// Jacobi-preconditioned conjugate gradients, starting from the contents of x.
// Convergence is declared on the true residual, not the recursive one. A zero
// right-hand side returns x = 0 immediately.
CgResult preconditioned_cg(const LinearOperator& apply, std::span<const double> inverse_diagonal,
                           std::span<const double> rhs, std::span<double> x,
                           double relative_tolerance, int max_iterations);

}  // namespace medrec
