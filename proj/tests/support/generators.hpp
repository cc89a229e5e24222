#pragma once

// Seeded random inputs for property tests.

#include <cstdint>
#include <algorithm>
#include <cmath>
#include <random>

#include "medrec/grid.hpp"
#include "medrec/model.hpp"

namespace medrec::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  ScalarField scalar(const StaggeredGrid& g, double lo = -1.0, double hi = 1.0) {
    ScalarField f(g);
    for (double& v : f.values()) v = uniform(lo, hi);
    return f;
  }

  // Random flux with zero boundary-normal components.
  FluxField admissible_flux(const StaggeredGrid& g) {
    FluxField p(g);
    for (double& v : p.x_values()) v = uniform(-1.0, 1.0);
    for (double& v : p.y_values()) v = uniform(-1.0, 1.0);
    p.zero_boundary_normals();
    return p;
  }

  BoundaryData boundary(const StaggeredGrid& g) {
    BoundaryData b(g);
    for (double& v : b.values()) v = uniform(-1.0, 1.0);
    return b;
  }

  StatePair state(const StaggeredGrid& g) { return StatePair(scalar(g), admissible_flux(g)); }

  CoefficientPair coefficients(const StaggeredGrid& g, double lo = 0.5, double hi = 3.0) {
    return {scalar(g, lo, hi), scalar(g, lo, hi)};
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace medrec::testing
