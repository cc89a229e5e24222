#include "medrec/forward.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "medrec/cg.hpp"
#include "medrec/error.hpp"
#include "medrec/parallel.hpp"

namespace medrec {
namespace {

// -div(s grad u) + mu u with face conductivities s = avg(sigma).
class DiffusionOperator {
 public:
  DiffusionOperator(const ScalarField& sigma, const ScalarField& mu)
      : n_(sigma.n()), faces_(average_to_faces(sigma)), mu_(mu) {}

  void apply(std::span<const double> u, std::span<double> out) const {
    const double inv_h2 = static_cast<double>(n_) * n_;
    const auto cell = [this](int i, int j) { return static_cast<std::size_t>(j) * n_ + i; };
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < n_; ++i) {
        const double uc = u[cell(i, j)];
        double acc = 0.0;
        if (i > 0) acc += faces_.x(i, j) * (uc - u[cell(i - 1, j)]);
        if (i < n_ - 1) acc += faces_.x(i + 1, j) * (uc - u[cell(i + 1, j)]);
        if (j > 0) acc += faces_.y(i, j) * (uc - u[cell(i, j - 1)]);
        if (j < n_ - 1) acc += faces_.y(i, j + 1) * (uc - u[cell(i, j + 1)]);
        out[cell(i, j)] = acc * inv_h2 + mu_(i, j) * uc;
      }
    }
  }

  std::vector<double> inverse_diagonal() const {
    const double inv_h2 = static_cast<double>(n_) * n_;
    std::vector<double> diag(static_cast<std::size_t>(n_) * n_);
    for (int j = 0; j < n_; ++j) {
      for (int i = 0; i < n_; ++i) {
        double d = 0.0;
        if (i > 0) d += faces_.x(i, j);
        if (i < n_ - 1) d += faces_.x(i + 1, j);
        if (j > 0) d += faces_.y(i, j);
        if (j < n_ - 1) d += faces_.y(i, j + 1);
        d = d * inv_h2 + mu_(i, j);
        diag[static_cast<std::size_t>(j) * n_ + i] = d > 0.0 ? 1.0 / d : 1.0;
      }
    }
    return diag;
  }

 private:
  int n_;
  FluxField faces_;
  ScalarField mu_;
};

}  // namespace

ScalarField apply_forward_operator(const ScalarField& sigma, const ScalarField& mu,
                                   const ScalarField& u) {
  require_same_grid(sigma.grid(), mu.grid());
  require_same_grid(sigma.grid(), u.grid());
  ScalarField out(u.grid());
  DiffusionOperator(sigma, mu).apply(u.values(), out.values());
  return out;
}

ScalarField solve_forward(const ForwardProblem& problem, double tol) {
  const StaggeredGrid& grid = problem.sigma.grid();
  require_same_grid(grid, problem.mu.grid());
  require_same_grid(grid, problem.neumann.grid());
  if (problem.source) require_same_grid(grid, problem.source->grid());
  if (!(tol > 0.0)) throw InvalidArgument("forward tolerance must be positive");
  if (!(problem.sigma.min() > 0.0)) throw InvalidArgument("sigma must be positive everywhere");
  if (!(problem.mu.min() >= 0.0)) throw InvalidArgument("mu must be nonnegative everywhere");

  ScalarField rhs = neumann_to_source(problem.neumann);
  if (problem.source) rhs += *problem.source;

  const bool pure_neumann = problem.mu.max() == 0.0;
  if (pure_neumann) {
    const double h = grid.spacing();
    const double total = std::accumulate(rhs.values().begin(), rhs.values().end(), 0.0) * h * h;
    double scale = 0.0;
    for (double v : rhs.values()) scale += std::abs(v);
    scale *= h * h;
    if (std::abs(total) > 1e-12 * std::max(1.0, scale))
      throw IncompatibleProblem("mu == 0 requires sources and boundary flux to balance; net = " +
                                std::to_string(total));
  }

  const DiffusionOperator op(problem.sigma, problem.mu);
  const std::vector<double> inv_diag = op.inverse_diagonal();
  ScalarField u(grid);
  const int cap = 20 * grid.n() * grid.n();
  const CgResult cg = preconditioned_cg(
      [&op](std::span<const double> x, std::span<double> y) { op.apply(x, y); }, inv_diag,
      rhs.values(), u.values(), tol, cap);
  if (!cg.converged)
    throw SolverFailure("forward solve did not converge", cg.relative_residual, cg.iterations);

  if (pure_neumann) {
    const double mean = std::accumulate(u.values().begin(), u.values().end(), 0.0) /
                        static_cast<double>(grid.cell_count());
    for (double& v : u.values()) v -= mean;
  }
  return u;
}

std::vector<BoundaryData> default_excitations(const StaggeredGrid& grid, int count) {
  if (count < 1 || count > 2) throw InvalidArgument("default excitations: count must be 1 or 2");
  std::vector<BoundaryData> out;
  BoundaryData first(grid);
  for (int k = 0; k < grid.n(); ++k) {
    first.at(Side::left, k) = 1.0;
    first.at(Side::right, k) = -1.0;
  }
  out.push_back(std::move(first));
  if (count == 2) {
    BoundaryData second(grid);
    for (int k = 0; k < grid.n(); ++k) {
      second.at(Side::bottom, k) = 1.0;
      second.at(Side::top, k) = -1.0;
    }
    out.push_back(std::move(second));
  }
  return out;
}

ScalarField prolong(const ScalarField& coarse, int factor) {
  if (factor < 1) throw InvalidArgument("prolongation factor must be >= 1");
  const StaggeredGrid fine_grid(coarse.n() * factor);
  ScalarField fine(fine_grid);
  for (int j = 0; j < fine_grid.n(); ++j)
    for (int i = 0; i < fine_grid.n(); ++i) fine(i, j) = coarse(i / factor, j / factor);
  return fine;
}

BoundaryData prolong(const BoundaryData& coarse, int factor) {
  if (factor < 1) throw InvalidArgument("prolongation factor must be >= 1");
  const StaggeredGrid fine_grid(coarse.n() * factor);
  BoundaryData fine(fine_grid);
  for (int s = 0; s < 4; ++s)
    for (int k = 0; k < fine_grid.n(); ++k)
      fine.at(static_cast<Side>(s), k) = coarse.at(static_cast<Side>(s), k / factor);
  return fine;
}

BoundaryData restrict_boundary(const BoundaryData& fine, int factor) {
  if (factor < 1 || fine.n() % factor != 0)
    throw InvalidArgument("restriction factor must divide the fine grid size");
  const StaggeredGrid coarse_grid(fine.n() / factor);
  BoundaryData coarse(coarse_grid);
  for (int s = 0; s < 4; ++s) {
    for (int k = 0; k < coarse_grid.n(); ++k) {
      double sum = 0.0;
      for (int m = 0; m < factor; ++m) sum += fine.at(static_cast<Side>(s), k * factor + m);
      coarse.at(static_cast<Side>(s), k) = sum / factor;
    }
  }
  return coarse;
}

std::vector<MeasurementSet> generate_measurements(const ScalarField& true_sigma,
                                                  const ScalarField& true_mu,
                                                  std::span<const BoundaryData> excitations,
                                                  int oversample, double tol) {
  if (oversample < 1) throw InvalidArgument("oversample must be >= 1");
  if (excitations.empty()) throw InvalidArgument("at least one excitation is required");
  require_same_grid(true_sigma.grid(), true_mu.grid());
  const StaggeredGrid& coarse = excitations.front().grid();
  for (const auto& e : excitations) require_same_grid(coarse, e.grid());

  const int fine_n = coarse.n() * oversample;
  ScalarField sigma = true_sigma;
  ScalarField mu = true_mu;
  if (true_sigma.n() == coarse.n()) {
    sigma = prolong(true_sigma, oversample);
    mu = prolong(true_mu, oversample);
  } else if (true_sigma.n() != fine_n) {
    throw InvalidArgument("true media must live on the measurement grid or its refinement");
  }

  std::vector<std::optional<MeasurementSet>> slots(excitations.size());
  parallel_for(excitations.size(), [&](std::size_t e) {
    ForwardProblem problem{sigma, mu, prolong(excitations[e], oversample), std::nullopt};
    const ScalarField u = solve_forward(problem, tol);
    slots[e] = MeasurementSet{excitations[e], restrict_boundary(boundary_trace(u), oversample)};
  });

  std::vector<MeasurementSet> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace medrec
