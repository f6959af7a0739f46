#pragma once

// Cantilever geometry, Euler-Bernoulli flexural strain profile, driven
// response and thermal phonon statistics.

#include "nvstrain/errors.hpp"

namespace nvstrain {

struct CantileverGeometry {
  double length_m = 20e-6;
  double width_m = 4e-6;
  double thickness_m = 1e-6;
  double nv_depth_m = 51.5e-9;  // d_i below the top surface
  double nv_axial_z_m = 0.0;    // Z position along the beam, 0 at the clamp

  // R_0: distance of the NV from the neutral axis (positive above it)
  double fiber_offset_m() const { return 0.5 * thickness_m - nv_depth_m; }
  void validate() const;
};

struct MechanicalMode {
  double f_c_hz = 870e3;
  double quality_q = 20000.0;
  double x_max_m = 0.0;  // resonant tip amplitude

  void validate() const;
};

struct DriveState {
  MechanicalMode mode;
  double f_piezo_hz = 870e3;
  double x_c_m = 0.0;  // realized tip amplitude

  double period_s() const { return 1.0 / f_piezo_hz; }
  void validate() const;
};

// Fundamental-mode shape factor; 2 at the clamp, ~0 at the free end.
double mode_shape_bracket(double z_over_l);

// eps(Z, x_c) = R_0 * x_c/(2 l^2) * 1.875^2 * bracket(Z/l); linear in x_c.
double mode_strain(const CantileverGeometry& g, double x_c_m);

// Lorentzian amplitude response, gamma = f_c/Q (only ratios enter):
// x_c = x_max * (gamma/2)^2 / ((gamma/2)^2 + (f_piezo - f_c)^2)
double drive_response(const MechanicalMode& mode, double f_piezo_hz);

// x(t) = x_c cos(2 pi f_piezo t)
double displacement(const DriveState& d, double t_s);

// Bose-Einstein occupation 1/(exp(h f_c / k_B T) - 1)
double thermal_occupation(double temperature_k, double f_c_hz);

// gamma_th = n_bar * f_c / Q
double thermalization_rate(double n_bar, double f_c_hz, double quality_q);

}  // namespace nvstrain
