#pragma once

// Synthetic test media, measurement noise and reconstruction quality metrics.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "medrec/grid.hpp"
#include "medrec/model.hpp"
#include "medrec/regularization.hpp"

namespace medrec {

// Axis-aligned square of side `width` centered at (cx, cy).
struct Square {
  double cx = 0.0;
  double cy = 0.0;
  double width = 0.0;
  double value = 0.0;
};

// Square with a concentric square hole: cells inside `outer` but not `inner`.
struct SquareRing {
  double cx = 0.0;
  double cy = 0.0;
  double outer = 0.0;
  double inner = 0.0;
  double value = 0.0;
};

using Shape = std::variant<Square, SquareRing>;

// A cell belongs to a shape iff its center does. Half-open in both directions
// (lower edge inclusive) so centers sitting exactly on an edge are assigned once.
bool contains(const Shape& shape, double x, double y);
std::array<double, 2> center_of(const Shape& shape);
double value_of(const Shape& shape);

struct RegParams {
  double alpha_sigma = 0.0;
  double beta_sigma = 0.0;
  double alpha_mu = 0.0;
  double beta_mu = 0.0;
};

struct ExampleSpec {
  std::string name;
  std::vector<Shape> sigma_inclusions;
  std::vector<Shape> mu_inclusions;
  double sigma_background = 1.0;
  double mu_background = 1.0;
  int excitation_count = 1;
  double noise_level = 0.0;  // epsilon of the noisy runs
  RegParams exact_params;
  RegParams noisy_params;
  // Examples whose absorption is known hold mu at its true value.
  bool reconstruct_mu = true;
  double q_lo = 0.5;
  double q_hi = 30.0;

  void validate() const;
  RegConfig reg_sigma(const RegParams& p) const { return {p.alpha_sigma, p.beta_sigma, q_lo, q_hi}; }
  RegConfig reg_mu(const RegParams& p) const { return {p.alpha_mu, p.beta_mu, q_lo, q_hi}; }
};

// ex1, ex2_1, ex2_2, ex3, ex4. Throws InvalidArgument for other names.
ExampleSpec make_example(std::string_view name);
std::vector<std::string> example_names();

// Background plus inclusions (later shapes overwrite earlier ones).
ScalarField rasterize(const std::vector<Shape>& shapes, double background,
                      const StaggeredGrid& grid);
CoefficientPair rasterize_truth(const ExampleSpec& spec, const StaggeredGrid& grid);

// f + epsilon * eta * max|f| with eta i.i.d. standard normal from a generator
// seeded by `seed`.
BoundaryData add_noise(const BoundaryData& f, double epsilon, std::uint64_t seed);

struct InclusionError {
  double true_x = 0.0;
  double true_y = 0.0;
  double found_x = 0.0;  // center of mass of the nearest reconstructed component
  double found_y = 0.0;
  double distance = 0.0;  // +inf when nothing was reconstructed
};

struct CoefficientMetrics {
  double relative_l2_error = 0.0;
  double support_jaccard = 0.0;
  int components = 0;
  std::vector<InclusionError> inclusions;
};

struct Metrics {
  CoefficientMetrics sigma;
  CoefficientMetrics mu;
};

// Cells with q > threshold. Metrics use background + half the truth contrast.
std::vector<bool> support_mask(const ScalarField& q, double threshold);
// 4-connected components of a mask; labels -1 outside, 0.. inside.
std::vector<int> label_components(const std::vector<bool>& mask, int n, int* count = nullptr);

// True inclusions are taken as the connected components of the truth's support,
// so the metrics need no shape list. A truth without contrast has an empty
// support and Jaccard index 1.
CoefficientMetrics compute_coefficient_metrics(const ScalarField& reconstructed,
                                               const ScalarField& truth, double background);
Metrics compute_metrics(const CoefficientPair& reconstructed, const CoefficientPair& truth,
                        double sigma_background = 1.0, double mu_background = 1.0);

}  // namespace medrec
