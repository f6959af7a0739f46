#pragma once

// JSON run configuration. Keys carry units in their names; angles are
// degrees at this boundary and radians everywhere else. Unknown keys are
// rejected by name.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nvstrain/metrics.hpp"
#include "nvstrain/optics.hpp"
#include "nvstrain/site.hpp"
#include "nvstrain/spectra.hpp"

namespace nvstrain {

struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  int points = 0;

  std::vector<double> linspace() const;
};

struct SynthSpec {
  std::vector<double> deflections_m;
  double sigma_f_floor_hz = 5e7;
  double depth_sigma_m = 13e-9;
  int n_phi = 19;
  double sigma_kcps = 0.0;
  double scale_kcps = 1.0;
};

struct FitSpec {
  int max_iterations = 200;
  double step_tol = 1e-12;
  std::string datasets_csv;
  std::string scan_csv;
  NvGroup scan_group = NvGroup::A;
};

struct RunConfig {
  CantileverGeometry geometry;
  MechanicalMode mode;
  double temperature_k = 4.0;
  double nu = kDefaultPoissonRatio;
  double depth_sigma_m = 13e-9;
  double calibration_fraction = 0.15;

  CouplingConstants constants;
  std::vector<NvSite> sites;
  std::string active_site_id;

  LaserPolarization laser;
  GridSpec laser_grid{-30e9, 30e9, 601};

  double x_c_m = 0.0;
  double f_piezo_hz = 870e3;
  std::optional<GridSpec> piezo_sweep;
  std::optional<GridSpec> amplitude_sweep;

  std::optional<StrobeWindow> strobe;

  std::uint64_t seed = 1;
  bool noise = false;
  SynthSpec synth;
  FitSpec fit;

  std::optional<double> match_target_f_hz;
  bool match_transition_plus = true;
  std::optional<double> match_target_theta_rad;

  std::optional<DeviceProposal> metrics;

  const NvSite& active_site() const;
  DriveState drive_state() const;
};

RunConfig load_config(const std::string& path);

}  // namespace nvstrain
