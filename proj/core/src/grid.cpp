#include "medrec/grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "medrec/error.hpp"

namespace medrec {
namespace {

bool finite_values(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void axpy_in_place(std::span<double> y, std::span<const double> x, double a) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

StaggeredGrid::StaggeredGrid(int cells_per_side) : n_(cells_per_side) {
  if (cells_per_side < kMinCells)
    throw InvalidArgument("grid needs at least " + std::to_string(kMinCells) +
                          " cells per side, got " + std::to_string(cells_per_side));
}

void require_same_grid(const StaggeredGrid& a, const StaggeredGrid& b) {
  if (!(a == b)) throw GridMismatch(a.n(), b.n());
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(StaggeredGrid grid, double value)
    : grid_(grid), values_(grid.cell_count(), value) {}

ScalarField::ScalarField(StaggeredGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cell_count())
    throw InvalidArgument("scalar field expects " + std::to_string(grid_.cell_count()) +
                          " values, got " + std::to_string(values_.size()));
}

bool ScalarField::all_finite() const { return finite_values(values_); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  axpy_in_place(values_, other.values_, 1.0);
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_);
  axpy_in_place(values_, other.values_, -1.0);
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  ScalarField out(a.grid());
  std::transform(a.values().begin(), a.values().end(), b.values().begin(),
                 out.values().begin(), std::multiplies<>());
  return out;
}

// ------------------------------------------------------------------ FluxField

FluxField::FluxField(StaggeredGrid grid)
    : grid_(grid),
      x_(static_cast<std::size_t>(grid.n() + 1) * static_cast<std::size_t>(grid.n()), 0.0),
      y_(static_cast<std::size_t>(grid.n()) * static_cast<std::size_t>(grid.n() + 1), 0.0) {}

bool FluxField::admissible() const {
  const int n = grid_.n();
  for (int k = 0; k < n; ++k) {
    if (x(0, k) != 0.0 || x(n, k) != 0.0) return false;
    if (y(k, 0) != 0.0 || y(k, n) != 0.0) return false;
  }
  return true;
}

void FluxField::zero_boundary_normals() {
  const int n = grid_.n();
  for (int k = 0; k < n; ++k) {
    x(0, k) = 0.0;
    x(n, k) = 0.0;
    y(k, 0) = 0.0;
    y(k, n) = 0.0;
  }
}

bool FluxField::all_finite() const { return finite_values(x_) && finite_values(y_); }

FluxField& FluxField::operator+=(const FluxField& other) {
  require_same_grid(grid_, other.grid_);
  axpy_in_place(x_, other.x_, 1.0);
  axpy_in_place(y_, other.y_, 1.0);
  return *this;
}

FluxField& FluxField::operator-=(const FluxField& other) {
  require_same_grid(grid_, other.grid_);
  axpy_in_place(x_, other.x_, -1.0);
  axpy_in_place(y_, other.y_, -1.0);
  return *this;
}

FluxField& FluxField::operator*=(double s) {
  for (double& v : x_) v *= s;
  for (double& v : y_) v *= s;
  return *this;
}

FluxField operator+(FluxField a, const FluxField& b) { return a += b; }
FluxField operator-(FluxField a, const FluxField& b) { return a -= b; }
FluxField operator*(double s, FluxField a) { return a *= s; }

FluxField hadamard(const FluxField& a, const FluxField& b) {
  require_same_grid(a.grid(), b.grid());
  FluxField out(a.grid());
  std::transform(a.x_values().begin(), a.x_values().end(), b.x_values().begin(),
                 out.x_values().begin(), std::multiplies<>());
  std::transform(a.y_values().begin(), a.y_values().end(), b.y_values().begin(),
                 out.y_values().begin(), std::multiplies<>());
  return out;
}

// --------------------------------------------------------------- BoundaryData

BoundaryData::BoundaryData(StaggeredGrid grid, double value)
    : grid_(grid), values_(4 * static_cast<std::size_t>(grid.n()), value) {}

BoundaryData::BoundaryData(StaggeredGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != 4 * static_cast<std::size_t>(grid_.n()))
    throw InvalidArgument("boundary data expects " + std::to_string(4 * grid_.n()) +
                          " values, got " + std::to_string(values_.size()));
}

double& BoundaryData::at(Side side, int offset) {
  return values_[static_cast<std::size_t>(side) * grid_.n() + offset];
}

double BoundaryData::at(Side side, int offset) const {
  return values_[static_cast<std::size_t>(side) * grid_.n() + offset];
}

bool BoundaryData::all_finite() const { return finite_values(values_); }

double BoundaryData::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Side BoundaryData::side_of(const StaggeredGrid& grid, std::size_t k) {
  return static_cast<Side>(k / static_cast<std::size_t>(grid.n()));
}

std::array<int, 2> BoundaryData::cell_of(const StaggeredGrid& grid, std::size_t k) {
  const int n = grid.n();
  const int offset = static_cast<int>(k % static_cast<std::size_t>(n));
  switch (side_of(grid, k)) {
    case Side::bottom: return {offset, 0};
    case Side::right: return {n - 1, offset};
    case Side::top: return {offset, n - 1};
    case Side::left: return {0, offset};
  }
  return {0, 0};
}

std::array<double, 2> BoundaryData::point_of(const StaggeredGrid& grid, std::size_t k) {
  const int offset = static_cast<int>(k % static_cast<std::size_t>(grid.n()));
  const double s = grid.center(offset);
  switch (side_of(grid, k)) {
    case Side::bottom: return {s, 0.0};
    case Side::right: return {1.0, s};
    case Side::top: return {s, 1.0};
    case Side::left: return {0.0, s};
  }
  return {0.0, 0.0};
}

BoundaryData& BoundaryData::operator+=(const BoundaryData& other) {
  require_same_grid(grid_, other.grid_);
  axpy_in_place(values_, other.values_, 1.0);
  return *this;
}

BoundaryData& BoundaryData::operator-=(const BoundaryData& other) {
  require_same_grid(grid_, other.grid_);
  axpy_in_place(values_, other.values_, -1.0);
  return *this;
}

BoundaryData& BoundaryData::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

BoundaryData operator+(BoundaryData a, const BoundaryData& b) { return a += b; }
BoundaryData operator-(BoundaryData a, const BoundaryData& b) { return a -= b; }
BoundaryData operator*(double s, BoundaryData a) { return a *= s; }

// ------------------------------------------------------------------ operators

FluxField gradient_to_faces(const ScalarField& u) {
  const int n = u.n();
  const double inv_h = static_cast<double>(n);
  FluxField p(u.grid());
  for (int j = 0; j < n; ++j)
    for (int i = 1; i < n; ++i) p.x(i, j) = (u(i, j) - u(i - 1, j)) * inv_h;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < n; ++i) p.y(i, j) = (u(i, j) - u(i, j - 1)) * inv_h;
  return p;
}

ScalarField divergence_to_cells(const FluxField& p) {
  const int n = p.n();
  const double inv_h = static_cast<double>(n);
  ScalarField d(p.grid());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      d(i, j) = (p.x(i + 1, j) - p.x(i, j)) * inv_h + (p.y(i, j + 1) - p.y(i, j)) * inv_h;
  return d;
}

FluxField average_to_faces(const ScalarField& q) {
  const int n = q.n();
  FluxField w(q.grid());
  for (int j = 0; j < n; ++j) {
    w.x(0, j) = q(0, j);
    for (int i = 1; i < n; ++i) w.x(i, j) = 0.5 * (q(i - 1, j) + q(i, j));
    w.x(n, j) = q(n - 1, j);
  }
  for (int i = 0; i < n; ++i) {
    w.y(i, 0) = q(i, 0);
    for (int j = 1; j < n; ++j) w.y(i, j) = 0.5 * (q(i, j - 1) + q(i, j));
    w.y(i, n) = q(i, n - 1);
  }
  return w;
}

ScalarField average_to_faces_transpose(const FluxField& w) {
  const int n = w.n();
  ScalarField q(w.grid());
  for (int j = 0; j < n; ++j) {
    q(0, j) += w.x(0, j);
    for (int i = 1; i < n; ++i) {
      q(i - 1, j) += 0.5 * w.x(i, j);
      q(i, j) += 0.5 * w.x(i, j);
    }
    q(n - 1, j) += w.x(n, j);
  }
  for (int i = 0; i < n; ++i) {
    q(i, 0) += w.y(i, 0);
    for (int j = 1; j < n; ++j) {
      q(i, j - 1) += 0.5 * w.y(i, j);
      q(i, j) += 0.5 * w.y(i, j);
    }
    q(i, n - 1) += w.y(i, n);
  }
  return q;
}

ScalarField negative_laplacian(const ScalarField& q) {
  ScalarField out = divergence_to_cells(gradient_to_faces(q));
  out *= -1.0;
  return out;
}

BoundaryData boundary_trace(const ScalarField& u) {
  BoundaryData f(u.grid());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const auto [i, j] = BoundaryData::cell_of(u.grid(), k);
    f[k] = u(i, j);
  }
  return f;
}

ScalarField neumann_to_source(const BoundaryData& h_data) {
  const double inv_h = static_cast<double>(h_data.n());
  ScalarField g(h_data.grid());
  for (std::size_t k = 0; k < h_data.size(); ++k) {
    const auto [i, j] = BoundaryData::cell_of(h_data.grid(), k);
    g(i, j) += h_data[k] * inv_h;
  }
  return g;
}

double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  const double h = a.grid().spacing();
  return h * h * dot(a.values(), b.values());
}

double inner(const FluxField& a, const FluxField& b) {
  require_same_grid(a.grid(), b.grid());
  const double h = a.grid().spacing();
  return h * h * (dot(a.x_values(), b.x_values()) + dot(a.y_values(), b.y_values()));
}

double inner(const BoundaryData& a, const BoundaryData& b) {
  require_same_grid(a.grid(), b.grid());
  return a.grid().spacing() * dot(a.values(), b.values());
}

double norm_sq(const ScalarField& a) { return inner(a, a); }
double norm_sq(const FluxField& a) { return inner(a, a); }
double norm_sq(const BoundaryData& a) { return inner(a, a); }

}  // namespace medrec
