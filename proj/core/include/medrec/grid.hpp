#pragma once

// Uniform staggered (MAC) grid on the unit square.
//
// Scalars live at cell centers ((i+1/2)h, (j+1/2)h), i along x and j along y.
// Fluxes live on faces: x-components on vertical faces x = i*h (i = 0..N),
// y-components on horizontal faces y = j*h (j = 0..N). Boundary data are
// sampled at the 4N boundary face midpoints, ordered bottom, right, top,
// left; bottom/top run left-to-right and right/left run bottom-to-top.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace medrec {

class StaggeredGrid {
 public:
  static constexpr int kMinCells = 4;

  explicit StaggeredGrid(int cells_per_side);

  int n() const noexcept { return n_; }
  double spacing() const noexcept { return 1.0 / n_; }
  double center(int index) const noexcept { return (index + 0.5) / n_; }
  std::size_t cell_count() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  }

  bool operator==(const StaggeredGrid&) const = default;

 private:
  int n_;
};

void require_same_grid(const StaggeredGrid& a, const StaggeredGrid& b);

class ScalarField {
 public:
  explicit ScalarField(StaggeredGrid grid, double value = 0.0);
  ScalarField(StaggeredGrid grid, std::vector<double> values);

  // f(x, y) evaluated at every cell center.
  template <typename F>
  static ScalarField from_function(StaggeredGrid grid, F&& f) {
    ScalarField field(grid);
    const int n = grid.n();
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) field(i, j) = f(grid.center(i), grid.center(j));
    return field;
  }

  const StaggeredGrid& grid() const noexcept { return grid_; }
  int n() const noexcept { return grid_.n(); }

  double& operator()(int i, int j) { return values_[index(i, j)]; }
  double operator()(int i, int j) const { return values_[index(i, j)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool all_finite() const;
  double min() const;
  double max() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);

  bool operator==(const ScalarField&) const = default;

 private:
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(grid_.n()) +
           static_cast<std::size_t>(i);
  }

  StaggeredGrid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

class FluxField {
 public:
  explicit FluxField(StaggeredGrid grid);

  const StaggeredGrid& grid() const noexcept { return grid_; }
  int n() const noexcept { return grid_.n(); }

  // x-component on the vertical face x = i*h of cell row j; i in [0, N].
  double& x(int i, int j) { return x_[x_index(i, j)]; }
  double x(int i, int j) const { return x_[x_index(i, j)]; }
  // y-component on the horizontal face y = j*h of cell column i; j in [0, N].
  double& y(int i, int j) { return y_[y_index(i, j)]; }
  double y(int i, int j) const { return y_[y_index(i, j)]; }

  std::span<double> x_values() noexcept { return x_; }
  std::span<const double> x_values() const noexcept { return x_; }
  std::span<double> y_values() noexcept { return y_; }
  std::span<const double> y_values() const noexcept { return y_; }

  // p . nu == 0 on the boundary.
  bool admissible() const;
  void zero_boundary_normals();
  bool all_finite() const;

  FluxField& operator+=(const FluxField& other);
  FluxField& operator-=(const FluxField& other);
  FluxField& operator*=(double s);

  bool operator==(const FluxField&) const = default;

 private:
  std::size_t x_index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(grid_.n() + 1) +
           static_cast<std::size_t>(i);
  }
  std::size_t y_index(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(grid_.n()) +
           static_cast<std::size_t>(i);
  }

  StaggeredGrid grid_;
  std::vector<double> x_;
  std::vector<double> y_;
};

FluxField operator+(FluxField a, const FluxField& b);
FluxField operator-(FluxField a, const FluxField& b);
FluxField operator*(double s, FluxField a);
FluxField hadamard(const FluxField& a, const FluxField& b);

enum class Side { bottom = 0, right = 1, top = 2, left = 3 };

class BoundaryData {
 public:
  explicit BoundaryData(StaggeredGrid grid, double value = 0.0);
  BoundaryData(StaggeredGrid grid, std::vector<double> values);

  const StaggeredGrid& grid() const noexcept { return grid_; }
  int n() const noexcept { return grid_.n(); }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  double& at(Side side, int offset);
  double at(Side side, int offset) const;

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool all_finite() const;
  double max_abs() const;

  // Boundary-adjacent cell (i, j) owning entry k.
  static std::array<int, 2> cell_of(const StaggeredGrid& grid, std::size_t k);
  // Face midpoint (x, y) of entry k.
  static std::array<double, 2> point_of(const StaggeredGrid& grid, std::size_t k);
  static Side side_of(const StaggeredGrid& grid, std::size_t k);

  BoundaryData& operator+=(const BoundaryData& other);
  BoundaryData& operator-=(const BoundaryData& other);
  BoundaryData& operator*=(double s);

  bool operator==(const BoundaryData&) const = default;

 private:
  StaggeredGrid grid_;
  std::vector<double> values_;
};

BoundaryData operator+(BoundaryData a, const BoundaryData& b);
BoundaryData operator-(BoundaryData a, const BoundaryData& b);
BoundaryData operator*(double s, BoundaryData a);

// Central differences on interior faces; boundary-normal faces are 0.
FluxField gradient_to_faces(const ScalarField& u);
// Cell-wise (p_x(i+1,j) - p_x(i,j))/h + (p_y(i,j+1) - p_y(i,j))/h.
ScalarField divergence_to_cells(const FluxField& p);
// Arithmetic mean on interior faces; boundary faces copy the adjacent cell.
FluxField average_to_faces(const ScalarField& q);
// Exact transpose of average_to_faces (faces -> cells).
ScalarField average_to_faces_transpose(const FluxField& w);
// -div(grad q) with the zero-normal-flux boundary built into the gradient.
ScalarField negative_laplacian(const ScalarField& q);

// Piecewise-constant trace: values of the boundary-adjacent cells.
BoundaryData boundary_trace(const ScalarField& u);
// Riesz representer of <h, trace(v)>: h/h_grid on the boundary layer, so that
// inner(neumann_to_source(h), v) == inner(h, boundary_trace(v)).
ScalarField neumann_to_source(const BoundaryData& h_data);

// Weighted inner products: cells and faces by h^2, boundary by h.
double inner(const ScalarField& a, const ScalarField& b);
double inner(const FluxField& a, const FluxField& b);
double inner(const BoundaryData& a, const BoundaryData& b);
double norm_sq(const ScalarField& a);
double norm_sq(const FluxField& a);
double norm_sq(const BoundaryData& a);

}  // namespace medrec
