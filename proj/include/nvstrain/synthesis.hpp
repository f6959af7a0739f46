#pragma once

// Synthetic multi-site ensembles: per-site strain scans with the
// phase-window / depth error model, plus polarization scans.

#include <cstdint>
#include <vector>

#include "nvstrain/constants.hpp"
#include "nvstrain/inference.hpp"
#include "nvstrain/optics.hpp"
#include "nvstrain/site.hpp"

namespace nvstrain {

struct EnsembleSpec {
  std::vector<NvSite> sites;
  CouplingConstants constants;
  double nu = kDefaultPoissonRatio;
  std::vector<double> deflections_m;  // signed antinode tip deflections
  double phase_uncertainty_rad = deg_to_rad(5.0);
  bool noise = false;
  double sigma_f_floor_hz = 5e7;
  double depth_sigma_m = 13e-9;
  std::uint64_t seed = 1;
};

// One NvDataset per site. Nominal eps is recorded per point; with noise
// enabled the frequencies are generated from a single per-site depth draw
// (sigma = depth_sigma_m) plus per-transition Gaussian frequency noise of
// width sigma_f. Deterministic for a fixed seed.
std::vector<NvDataset> synthesize_datasets(const EnsembleSpec& spec);

// Saturated-model polarization scan over n_phi angles in [0, pi); optional
// additive Gaussian noise of width sigma_kcps on each channel.
std::vector<PolarizationScanPoint> synthesize_polarization_scan(
    NvGroup group, double theta_rad, const LaserPolarization& pol,
    double scale_kcps, int n_phi = 19, double sigma_kcps = 0.0,
    std::uint64_t seed = 1);

}  // namespace nvstrain
