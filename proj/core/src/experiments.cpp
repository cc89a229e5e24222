#include "medrec/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <type_traits>

#include "medrec/error.hpp"

namespace medrec {
namespace {

constexpr double kEdgeTolerance = 1e-9;

bool inside_square(double cx, double cy, double width, double x, double y) {
  const double half = 0.5 * width;
  auto in = [&](double c, double v) {
    return (v - (c - half)) >= -kEdgeTolerance && ((c + half) - v) > kEdgeTolerance;
  };
  return in(cx, x) && in(cy, y);
}

bool shape_in_unit_square(const Shape& shape) {
  const auto [cx, cy] = center_of(shape);
  const double half =
      0.5 * std::visit([](const auto& s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Square>) return s.width;
        else return s.outer;
      }, shape);
  return cx - half >= 0.0 && cx + half <= 1.0 && cy - half >= 0.0 && cy + half <= 1.0;
}

Square square(double cx, double cy, double width) { return Square{cx, cy, width, 20.0}; }

struct Component {
  double cx = 0.0;
  double cy = 0.0;
};

// (q - background)-weighted centers of mass of the labeled components.
std::vector<Component> component_centers(const ScalarField& q, const std::vector<int>& labels,
                                         int count, double background) {
  std::vector<double> wx(count, 0.0), wy(count, 0.0), w(count, 0.0);
  const int n = q.n();
  const StaggeredGrid& grid = q.grid();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int label = labels[static_cast<std::size_t>(j) * n + i];
      if (label < 0) continue;
      const double weight = std::abs(q(i, j) - background);
      wx[label] += weight * grid.center(i);
      wy[label] += weight * grid.center(j);
      w[label] += weight;
    }
  }
  std::vector<Component> out(count);
  for (int c = 0; c < count; ++c) out[c] = {wx[c] / w[c], wy[c] / w[c]};
  return out;
}

}  // namespace

bool contains(const Shape& shape, double x, double y) {
  return std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Square>) {
          return inside_square(s.cx, s.cy, s.width, x, y);
        } else {
          return inside_square(s.cx, s.cy, s.outer, x, y) &&
                 !inside_square(s.cx, s.cy, s.inner, x, y);
        }
      },
      shape);
}

std::array<double, 2> center_of(const Shape& shape) {
  return std::visit([](const auto& s) { return std::array<double, 2>{s.cx, s.cy}; }, shape);
}

double value_of(const Shape& shape) {
  return std::visit([](const auto& s) { return s.value; }, shape);
}

void ExampleSpec::validate() const {
  if (!(sigma_background > 0.0) || !(mu_background > 0.0))
    throw InvalidArgument("example backgrounds must be positive");
  if (excitation_count != 1 && excitation_count != 2)
    throw InvalidArgument("example excitation count must be 1 or 2");
  if (!(noise_level >= 0.0)) throw InvalidArgument("example noise level must be >= 0");
  for (const auto* list : {&sigma_inclusions, &mu_inclusions}) {
    for (const Shape& s : *list) {
      if (!(value_of(s) > 0.0)) throw InvalidArgument("inclusion values must be positive");
      if (!shape_in_unit_square(s)) throw InvalidArgument("inclusions must lie inside the domain");
      if (const auto* ring = std::get_if<SquareRing>(&s); ring && !(ring->inner < ring->outer))
        throw InvalidArgument("ring inner width must be below its outer width");
    }
  }
}

std::vector<std::string> example_names() { return {"ex1", "ex2_1", "ex2_2", "ex3", "ex4"}; }

ExampleSpec make_example(std::string_view name) {
  ExampleSpec spec;
  spec.name = std::string(name);
  if (name == "ex1") {
    spec.sigma_inclusions = {square(0.25, 0.65, 0.05)};
    spec.mu_inclusions = {square(0.35, 0.3, 0.05)};
    spec.noise_level = 0.10;
    spec.exact_params = {1e-2, 2e-2, 5e-4, 5e-4};
    spec.noisy_params = {1e-2, 2e-2, 5e-4, 1e-3};
  } else if (name == "ex2_1") {
    spec.sigma_inclusions = {square(0.15, 0.5, 0.05), square(0.5, 0.85, 0.05)};
    spec.noise_level = 0.20;
    spec.exact_params = {1e-3, 5e-3, 0.0, 0.0};
    spec.noisy_params = {1e-3, 1e-2, 0.0, 0.0};
    spec.reconstruct_mu = false;
  } else if (name == "ex2_2") {
    spec.sigma_inclusions = {square(0.45, 0.425, 0.1), square(0.55, 0.575, 0.1)};
    spec.noise_level = 0.02;
    spec.exact_params = {1e-6, 1e-3, 0.0, 0.0};
    spec.noisy_params = {1e-6, 2e-3, 0.0, 0.0};
    spec.reconstruct_mu = false;
  } else if (name == "ex3") {
    spec.sigma_inclusions = {square(0.5, 0.25, 0.1), square(0.5, 0.75, 0.1)};
    spec.mu_inclusions = {square(0.25, 0.5, 0.1), square(0.75, 0.5, 0.1)};
    spec.noise_level = 0.20;
    spec.exact_params = {1e-3, 1e-2, 1e-2, 5e-3};
    spec.noisy_params = {1e-3, 2e-2, 1e-2, 5e-3};
  } else if (name == "ex4") {
    spec.sigma_inclusions = {SquareRing{0.5, 0.6, 0.2, 0.15, 20.0}};
    spec.excitation_count = 2;
    spec.noise_level = 0.20;
    spec.exact_params = {1e-5, 5e-4, 0.0, 0.0};
    spec.noisy_params = {1e-5, 1e-3, 0.0, 0.0};
    spec.reconstruct_mu = false;
  } else {
    throw InvalidArgument("unknown example '" + std::string(name) + "'");
  }
  return spec;
}

ScalarField rasterize(const std::vector<Shape>& shapes, double background,
                      const StaggeredGrid& grid) {
  return ScalarField::from_function(grid, [&](double x, double y) {
    double v = background;
    for (const Shape& s : shapes)
      if (contains(s, x, y)) v = value_of(s);
    return v;
  });
}

CoefficientPair rasterize_truth(const ExampleSpec& spec, const StaggeredGrid& grid) {
  return {rasterize(spec.sigma_inclusions, spec.sigma_background, grid),
          rasterize(spec.mu_inclusions, spec.mu_background, grid)};
}

BoundaryData add_noise(const BoundaryData& f, double epsilon, std::uint64_t seed) {
  if (!(epsilon >= 0.0)) throw InvalidArgument("noise level must be >= 0");
  BoundaryData out = f;
  if (epsilon == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> eta(0.0, 1.0);
  const double scale = epsilon * f.max_abs();
  for (double& v : out.values()) v += scale * eta(rng);
  return out;
}

std::vector<bool> support_mask(const ScalarField& q, double threshold) {
  std::vector<bool> mask;
  mask.reserve(q.grid().cell_count());
  for (double v : q.values()) mask.push_back(v > threshold);
  return mask;
}

std::vector<int> label_components(const std::vector<bool>& mask, int n, int* count) {
  std::vector<int> labels(mask.size(), -1);
  std::vector<int> stack;
  int next = 0;
  for (int start = 0; start < static_cast<int>(mask.size()); ++start) {
    if (!mask[start] || labels[start] >= 0) continue;
    labels[start] = next;
    stack.push_back(start);
    while (!stack.empty()) {
      const int k = stack.back();
      stack.pop_back();
      const int i = k % n;
      const int j = k / n;
      const int neighbors[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (const auto& nb : neighbors) {
        if (nb[0] < 0 || nb[0] >= n || nb[1] < 0 || nb[1] >= n) continue;
        const int m = nb[1] * n + nb[0];
        if (mask[m] && labels[m] < 0) {
          labels[m] = next;
          stack.push_back(m);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return labels;
}

CoefficientMetrics compute_coefficient_metrics(const ScalarField& reconstructed,
                                               const ScalarField& truth, double background) {
  require_same_grid(reconstructed.grid(), truth.grid());
  CoefficientMetrics m;
  const double truth_norm = std::sqrt(norm_sq(truth));
  const double diff_norm = std::sqrt(norm_sq(reconstructed - truth));
  m.relative_l2_error = truth_norm > 0.0 ? diff_norm / truth_norm : diff_norm;

  const double contrast = truth.max() - background;
  if (!(contrast > 0.0)) {
    m.support_jaccard = 1.0;
    return m;
  }
  const double threshold = background + 0.5 * contrast;
  const std::vector<bool> true_support = support_mask(truth, threshold);
  const std::vector<bool> found_support = support_mask(reconstructed, threshold);
  std::size_t both = 0;
  std::size_t either = 0;
  for (std::size_t k = 0; k < true_support.size(); ++k) {
    both += true_support[k] && found_support[k];
    either += true_support[k] || found_support[k];
  }
  m.support_jaccard = either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);

  const int n = truth.n();
  int true_count = 0;
  const auto true_labels = label_components(true_support, n, &true_count);
  const auto true_centers = component_centers(truth, true_labels, true_count, background);
  const auto found_labels = label_components(found_support, n, &m.components);
  const auto found_centers =
      component_centers(reconstructed, found_labels, m.components, background);

  for (const Component& t : true_centers) {
    InclusionError e;
    e.true_x = t.cx;
    e.true_y = t.cy;
    e.found_x = std::numeric_limits<double>::quiet_NaN();
    e.found_y = std::numeric_limits<double>::quiet_NaN();
    e.distance = std::numeric_limits<double>::infinity();
    for (const Component& f : found_centers) {
      const double d = std::hypot(f.cx - t.cx, f.cy - t.cy);
      if (d < e.distance) {
        e.distance = d;
        e.found_x = f.cx;
        e.found_y = f.cy;
      }
    }
    m.inclusions.push_back(e);
  }
  return m;
}

Metrics compute_metrics(const CoefficientPair& reconstructed, const CoefficientPair& truth,
                        double sigma_background, double mu_background) {
  return {compute_coefficient_metrics(reconstructed.sigma, truth.sigma, sigma_background),
          compute_coefficient_metrics(reconstructed.mu, truth.mu, mu_background)};
}

}  // namespace medrec
