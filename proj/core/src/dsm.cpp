#include "medrec/dsm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "medrec/error.hpp"
#include "medrec/parallel.hpp"

namespace medrec {
namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

// |<df, probe>| / (|df| |probe|) with the boundary weight cancelling out.
double normalized_pairing(std::span<const double> df, double df_norm,
                          std::span<const double> probe) {
  double dot = 0.0;
  double pp = 0.0;
  for (std::size_t k = 0; k < df.size(); ++k) {
    dot += df[k] * probe[k];
    pp += probe[k] * probe[k];
  }
  if (pp == 0.0) return 0.0;
  return std::abs(dot) / (df_norm * std::sqrt(pp));
}

void normalize(ScalarField& phi) {
  for (double& v : phi.values()) v = std::max(v, 0.0);
  const double peak = phi.max();
  if (peak > 0.0) phi *= 1.0 / peak;
}

}  // namespace

std::vector<BoundaryData> homogeneous_reference(double background_sigma, double background_mu,
                                                std::span<const BoundaryData> excitations,
                                                int oversample) {
  if (!(background_sigma > 0.0) || !(background_mu > 0.0))
    throw InvalidArgument("homogeneous reference needs positive backgrounds");
  if (excitations.empty()) throw InvalidArgument("at least one excitation is required");
  const StaggeredGrid& grid = excitations.front().grid();
  const auto sets = generate_measurements(ScalarField(grid, background_sigma),
                                          ScalarField(grid, background_mu), excitations,
                                          oversample);
  std::vector<BoundaryData> out;
  out.reserve(sets.size());
  for (const auto& s : sets) out.push_back(s.dirichlet);
  return out;
}

IndexResult compute_index(std::span<const BoundaryData> delta_f, const StaggeredGrid& sampling) {
  std::vector<std::size_t> active;
  std::vector<double> norms;
  for (std::size_t e = 0; e < delta_f.size(); ++e) {
    double s = 0.0;
    for (double v : delta_f[e].values()) s += v * v;
    if (s > 0.0) {
      active.push_back(e);
      norms.push_back(std::sqrt(s));
    }
  }
  if (active.empty()) throw InvalidArgument("scattered data vanish; nothing to image");

  const StaggeredGrid& data_grid = delta_f.front().grid();
  for (const auto& df : delta_f) require_same_grid(data_grid, df.grid());
  const std::size_t m = 4 * static_cast<std::size_t>(data_grid.n());
  std::vector<std::array<double, 2>> points(m);
  for (std::size_t k = 0; k < m; ++k) points[k] = BoundaryData::point_of(data_grid, k);

  IndexResult result{ScalarField(sampling), ScalarField(sampling)};
  const int n = sampling.n();
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
    const int j = static_cast<int>(row);
    std::vector<double> mono(m), dx(m), dy(m);
    for (int i = 0; i < n; ++i) {
      const double x = sampling.center(i);
      const double y = sampling.center(j);
      for (std::size_t k = 0; k < m; ++k) {
        const double rx = points[k][0] - x;
        const double ry = points[k][1] - y;
        const double r2 = rx * rx + ry * ry;
        mono[k] = -kInvTwoPi * 0.5 * std::log(r2);
        dx[k] = kInvTwoPi * rx / r2;
        dy[k] = kInvTwoPi * ry / r2;
      }
      double monopole = 0.0;
      double dipole = 0.0;
      for (std::size_t a = 0; a < active.size(); ++a) {
        const auto df = delta_f[active[a]].values();
        monopole += normalized_pairing(df, norms[a], mono);
        dipole += std::max(normalized_pairing(df, norms[a], dx),
                           normalized_pairing(df, norms[a], dy));
      }
      result.phi_mu(i, j) = monopole;
      result.phi_sigma(i, j) = dipole;
    }
  });
  normalize(result.phi_mu);
  normalize(result.phi_sigma);
  return result;
}

SubdomainMask threshold_subdomain(const ScalarField& phi, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
  SubdomainMask mask;
  mask.reserve(phi.values().size());
  for (double v : phi.values()) mask.push_back(v >= theta);
  return mask;
}

bool mask_empty(const SubdomainMask& mask) {
  return std::none_of(mask.begin(), mask.end(), [](bool b) { return b; });
}

ScalarField build_initial_guess(const ScalarField& phi, const SubdomainMask& mask, double c_phi,
                                double background) {
  if (!(c_phi > 0.0)) throw InvalidArgument("c_phi must be positive");
  if (mask.size() != phi.values().size()) throw InvalidArgument("mask does not match the field");
  ScalarField out(phi.grid(), background);
  auto src = phi.values();
  auto dst = out.values();
  for (std::size_t k = 0; k < dst.size(); ++k)
    if (mask[k]) dst[k] = c_phi * src[k];
  return out;
}

void DsmConfig::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
  if (!(c_phi > 0.0)) throw InvalidArgument("c_phi must be positive");
  if (!(background_sigma > 0.0) || !(background_mu > 0.0))
    throw InvalidArgument("backgrounds must be positive");
  if (oversample < 1) throw InvalidArgument("oversample must be >= 1");
  box_sigma.validate();
  box_mu.validate();
}

DsmResult run_dsm(std::span<const MeasurementSet> data, const DsmConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw InvalidArgument("DSM needs at least one measurement set");
  std::vector<BoundaryData> excitations;
  for (const auto& m : data) excitations.push_back(m.neumann);
  const auto reference =
      homogeneous_reference(cfg.background_sigma, cfg.background_mu, excitations, cfg.oversample);
  std::vector<BoundaryData> delta_f;
  for (std::size_t e = 0; e < data.size(); ++e)
    delta_f.push_back(data[e].dirichlet - reference[e]);

  const StaggeredGrid& grid = data.front().neumann.grid();
  DsmResult out{compute_index(delta_f, grid), {}, {}, ScalarField(grid), ScalarField(grid), {}};
  out.mask_sigma = threshold_subdomain(out.index.phi_sigma, cfg.theta);
  out.mask_mu = threshold_subdomain(out.index.phi_mu, cfg.theta);
  if (mask_empty(out.mask_sigma))
    out.warnings.push_back("sigma subdomain is empty; using the background as initial guess");
  if (mask_empty(out.mask_mu))
    out.warnings.push_back("mu subdomain is empty; using the background as initial guess");

  auto clipped = [](const ScalarField& q, const RegConfig& box) {
    return prox_l1_box(q, 0.0, box.q_lo, box.q_hi);
  };
  out.initial_sigma = clipped(build_initial_guess(out.index.phi_sigma, out.mask_sigma, cfg.c_phi,
                                                  cfg.background_sigma),
                              cfg.box_sigma);
  out.initial_mu = clipped(
      build_initial_guess(out.index.phi_mu, out.mask_mu, cfg.c_phi, cfg.background_mu),
      cfg.box_mu);
  return out;
}

}  // namespace medrec
