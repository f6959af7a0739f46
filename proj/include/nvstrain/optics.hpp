#pragma once

// Polarization selection rules of the Ex/Ey transitions: dipole rotation
// under E-symmetric strain, absorption with saturation and laser ellipticity.

#include "nvstrain/constants.hpp"
#include "nvstrain/errors.hpp"
#include "nvstrain/nv_core.hpp"
#include "nvstrain/site.hpp"

namespace nvstrain {

struct LaserPolarization {
  double phi_rad = 0.0;           // linear polarization angle from [-110]
  double psi_rad = deg_to_rad(54.0);  // ellipticity phase delay
  double p_in_w = 0.4e-6;
  double p_sat_w = 0.4e-6;

  void validate() const {
    if (p_in_w < 0.0) throw ConfigError("p_in_w must be nonnegative");
    if (!(p_sat_w > 0.0)) throw ConfigError("p_sat_w must be positive");
  }
};

struct DipolePattern {
  double i_ex = 0.0;
  double i_ey = 0.0;
};

// Unsaturated squared-projection intensities for a dipole basis rotated by
// the mixing angle theta, with linear drive polarization phi.
DipolePattern linear_intensity(NvGroup group, double theta_rad, double phi_rad);

// I = 1 - exp[-(P_in/P_sat) q(theta, phi; cos psi)] with the elliptic
// cross term; reduces to the linear forms at psi = 0, first order in P_in.
DipolePattern saturated_intensity(NvGroup group, double theta_rad,
                                  const LaserPolarization& pol);

struct PolarizationMatch {
  double e1_shift_hz = 0.0;       // required drive-induced E1 shift
  double e2_shift_hz = 0.0;       // always 0 for this crystal cut
  double strain = 0.0;            // axial strain realizing the shift
  double tip_deflection_m = 0.0;  // signed deflection at the strobe window
  int antinode_sign = -1;         // -1: strobe the downward antinode
};

// Inverts the mixing-angle relation for the single tunable channel (e1):
// finds the static deflection at which the site's mixing angle equals
// target_theta. The drive can only move e1 (e2 stays intrinsic), so
// targets off the reachable branch raise UnreachableAngleError.
PolarizationMatch match_polarization(double target_theta_rad,
                                     const NvSite& site,
                                     const CouplingConstants& k,
                                     double nu = kDefaultPoissonRatio);

}  // namespace nvstrain
