#include "nvstrain/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nvstrain {

std::vector<NvDataset> synthesize_datasets(const EnsembleSpec& spec) {
  if (spec.sites.empty()) throw ConfigError("ensemble has no sites");
  if (spec.deflections_m.empty()) {
    throw ConfigError("ensemble has no deflections");
  }
  std::vector<NvDataset> out;
  out.reserve(spec.sites.size());
  for (size_t i = 0; i < spec.sites.size(); ++i) {
    const NvSite& site = spec.sites[i];
    site.validate();
    std::mt19937_64 rng(spec.seed + 1000003ULL * i);
    std::normal_distribution<double> unit(0.0, 1.0);

    NvSite truth = site;
    if (spec.noise) {
      truth.geometry.nv_depth_m += spec.depth_sigma_m * unit(rng);
    }

    NvDataset d;
    d.site_id = site.site_id;
    d.group = site.orientation.group();
    d.theta_obs_rad = 0.0;
    if (std::abs(site.intrinsic.df_e1_hz) >= 1e-3 ||
        std::abs(site.intrinsic.df_e2_hz) >= 1e-3) {
      d.theta_obs_rad =
          stuckelberg_angle(site.intrinsic.df_e1_hz, site.intrinsic.df_e2_hz);
    }
    d.delta_f0_obs_hz = zero_strain_splitting(site.intrinsic);

    for (double x : spec.deflections_m) {
      StrainScanPoint p;
      p.eps = site.strain_at(x);
      const TransitionFrequencies f =
          truth.frequencies_at(x, spec.constants, spec.nu);
      const PointUncertainty u = propagate_uncertainties(
          site, spec.constants, spec.nu, x, spec.phase_uncertainty_rad,
          spec.depth_sigma_m);
      p.sigma_f_hz = std::max(u.sigma_f_hz, spec.sigma_f_floor_hz);
      p.sigma_eps = u.sigma_eps;
      p.f_plus_hz = f.f_plus_hz;
      p.f_minus_hz = f.f_minus_hz;
      if (spec.noise) {
        p.f_plus_hz += p.sigma_f_hz * unit(rng);
        p.f_minus_hz += p.sigma_f_hz * unit(rng);
      }
      d.points.push_back(p);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<PolarizationScanPoint> synthesize_polarization_scan(
    NvGroup group, double theta_rad, const LaserPolarization& pol,
    double scale_kcps, int n_phi, double sigma_kcps, std::uint64_t seed) {
  if (n_phi < 1) throw ConfigError("n_phi must be >= 1");
  pol.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<PolarizationScanPoint> out;
  out.reserve(n_phi);
  for (int i = 0; i < n_phi; ++i) {
    LaserPolarization at = pol;
    at.phi_rad = kPi * i / n_phi;
    const DipolePattern pat = saturated_intensity(group, theta_rad, at);
    PolarizationScanPoint p;
    p.phi_rad = at.phi_rad;
    p.pl_ex_kcps = scale_kcps * pat.i_ex;
    p.pl_ey_kcps = scale_kcps * pat.i_ey;
    if (sigma_kcps > 0.0) {
      p.pl_ex_kcps += sigma_kcps * unit(rng);
      p.pl_ey_kcps += sigma_kcps * unit(rng);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace nvstrain
