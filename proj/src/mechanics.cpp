#include "nvstrain/mechanics.hpp"

#include <cmath>
#include <string>

#include "nvstrain/constants.hpp"

namespace nvstrain {

void CantileverGeometry::validate() const {
  if (!(length_m > 0.0) || !(width_m > 0.0) || !(thickness_m > 0.0)) {
    throw ConfigError("cantilever dimensions must be positive");
  }
  if (nv_depth_m < 0.0 || nv_depth_m > thickness_m) {
    throw ConfigError("nv_depth_m must lie within [0, thickness_m]");
  }
  if (nv_axial_z_m < 0.0 || nv_axial_z_m > length_m) {
    throw ConfigError("nv_axial_z_m must lie within [0, length_m]");
  }
}

void MechanicalMode::validate() const {
  if (!(f_c_hz > 0.0)) throw ConfigError("f_c_hz must be positive");
  if (!(quality_q > 0.0)) throw ConfigError("quality_q must be positive");
  if (x_max_m < 0.0) throw ConfigError("x_max_m must be nonnegative");
}

void DriveState::validate() const {
  mode.validate();
  if (!(f_piezo_hz > 0.0)) throw ConfigError("f_piezo_hz must be positive");
  if (x_c_m > mode.x_max_m) {
    throw ConfigError("x_c_m exceeds the resonant amplitude x_max_m");
  }
}

double mode_shape_bracket(double z_over_l) {
  const double u = kModeWavenumber * z_over_l;
  return std::cos(u) + std::cosh(u) -
         (std::sin(u) + std::sinh(u)) / kModeShapeRatio;
}

double mode_strain(const CantileverGeometry& g, double x_c_m) {
  g.validate();
  const double r0 = g.fiber_offset_m();
  const double l = g.length_m;
  return r0 * x_c_m / (2.0 * l * l) * kModeWavenumber * kModeWavenumber *
         mode_shape_bracket(g.nv_axial_z_m / l);
}

double drive_response(const MechanicalMode& mode, double f_piezo_hz) {
  mode.validate();
  const double half_gamma = 0.5 * mode.f_c_hz / mode.quality_q;
  const double detuning = f_piezo_hz - mode.f_c_hz;
  return mode.x_max_m * half_gamma * half_gamma /
         (half_gamma * half_gamma + detuning * detuning);
}

double displacement(const DriveState& d, double t_s) {
  return d.x_c_m * std::cos(2.0 * kPi * d.f_piezo_hz * t_s);
}

double thermal_occupation(double temperature_k, double f_c_hz) {
  if (!(temperature_k > 0.0)) {
    throw ConfigError("temperature_k must be positive");
  }
  const double x = kPlanckJs * f_c_hz / (kBoltzmannJPerK * temperature_k);
  return 1.0 / std::expm1(x);
}

double thermalization_rate(double n_bar, double f_c_hz, double quality_q) {
  if (n_bar < 0.0 || !(f_c_hz > 0.0) || !(quality_q > 0.0)) {
    throw ConfigError("thermalization_rate requires n_bar >= 0, f_c, Q > 0");
  }
  return n_bar * f_c_hz / quality_q;
}

}  // namespace nvstrain
