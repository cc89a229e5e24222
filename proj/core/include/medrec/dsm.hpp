#pragma once

// Direct sampling: images inclusions from the scattered boundary data by
// pairing it with free-space probes centered at each sampling point.
//
// Monopole probes eta_x(xi) = -(1/2pi) ln|xi - x| respond to absorption-type
// scatterers, dipole probes (the x-gradient of eta_x) to diffusion-type ones.

#include <span>
#include <string>
#include <vector>

#include "medrec/forward.hpp"
#include "medrec/grid.hpp"
#include "medrec/regularization.hpp"

namespace medrec {

struct IndexResult {
  ScalarField phi_sigma;  // dipole index, normalized to max 1
  ScalarField phi_mu;     // monopole index, normalized to max 1
};

// Dirichlet traces of the homogeneous medium for each excitation, computed the
// same way as the measurements (refined by `oversample`, then restricted).
std::vector<BoundaryData> homogeneous_reference(double background_sigma, double background_mu,
                                                std::span<const BoundaryData> excitations,
                                                int oversample = 2);

// Raw per-point index |<df, eta>| / (|df| |eta|) in the boundary inner product,
// summed over excitations; dipoles take the larger of the two directions. Both
// fields are clamped at 0 and divided by their maximum. Throws InvalidArgument
// when every delta_f vanishes.
IndexResult compute_index(std::span<const BoundaryData> delta_f, const StaggeredGrid& sampling);

using SubdomainMask = std::vector<bool>;  // row-major like ScalarField

// phi >= theta cellwise; requires 0 < theta < 1.
SubdomainMask threshold_subdomain(const ScalarField& phi, double theta);
bool mask_empty(const SubdomainMask& mask);

// c_phi * phi on the mask, background elsewhere. Requires c_phi > 0.
ScalarField build_initial_guess(const ScalarField& phi, const SubdomainMask& mask, double c_phi,
                                double background);

struct DsmConfig {
  double theta = 0.55;
  double c_phi = 20.0;
  double background_sigma = 1.0;
  double background_mu = 1.0;
  int oversample = 2;
  RegConfig box_sigma{0.0, 0.0, 0.5, 30.0};  // only the bounds are used
  RegConfig box_mu{0.0, 0.0, 0.5, 30.0};

  void validate() const;
};

struct DsmResult {
  IndexResult index;
  SubdomainMask mask_sigma;
  SubdomainMask mask_mu;
  ScalarField initial_sigma;  // clipped into the box
  ScalarField initial_mu;
  std::vector<std::string> warnings;
};

DsmResult run_dsm(std::span<const MeasurementSet> data, const DsmConfig& cfg);

}  // namespace medrec
