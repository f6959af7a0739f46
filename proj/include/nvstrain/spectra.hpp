#pragma once

// CW and stroboscopic resonant-excitation spectra, and 2-D maps over drive
// detuning or drive amplitude. The CW signal is the time average over one
// drive period of I_pm(x(t)) * Lorentzian(f; f_pm(x(t)), Gamma); strobed
// signals average only over [T, T+tau], normalized by 1/tau.

#include <optional>
#include <string>
#include <vector>

#include "nvstrain/constants.hpp"
#include "nvstrain/mechanics.hpp"
#include "nvstrain/optics.hpp"
#include "nvstrain/site.hpp"

namespace nvstrain {

struct StrobeWindow {
  double start_t_s = 0.0;  // window start within the drive period
  double tau_s = 60e-9;    // window length
  double phase_uncertainty_rad = deg_to_rad(5.0);

  // Window centered on the downward antinode: T = P/2 - tau/2.
  static StrobeWindow down_antinode(double period_s, double tau_s = 60e-9);
  // Window centered on the upward antinode: T = P - tau/2.
  static StrobeWindow up_antinode(double period_s, double tau_s = 60e-9);

  void validate(double period_s) const;
};

struct SpectrumMeta {
  std::string site_id;
  double f_reference_hz = 0.0;  // detunings are laser frequency minus this
  double x_c_m = 0.0;
  double f_piezo_hz = 0.0;
  bool strobed = false;
  double strobe_start_s = 0.0;
  double strobe_tau_s = 0.0;
};

struct Spectrum {
  std::vector<double> detunings_hz;  // strictly increasing
  std::vector<double> signal_kcps;
  SpectrumMeta meta;
};

enum class MapAxis { PiezoHz, AmplitudeM };

struct SpectrumMap {
  MapAxis axis_kind = MapAxis::PiezoHz;
  std::vector<double> axis;          // piezo frequency or tip amplitude
  std::vector<double> detunings_hz;  // shared laser grid
  std::vector<std::vector<double>> rows;  // rows[i] matches axis[i]
};

struct SpectraOptions {
  double rel_tol = 1e-6;      // step-halving agreement target
  int max_samples = 1 << 17;  // quadrature sample cap per window
  // When false, I_pm are frozen at the undriven mixing angle; the drive
  // then only moves spectral weight around (used by conservation checks).
  bool modulate_intensity = true;
};

Spectrum cw_spectrum(const NvSite& site, const DriveState& drive,
                     const LaserPolarization& pol,
                     const std::vector<double>& grid_hz,
                     const CouplingConstants& k = {},
                     double nu = kDefaultPoissonRatio,
                     const SpectraOptions& opts = {});

Spectrum strobe_spectrum(const NvSite& site, const DriveState& drive,
                         const LaserPolarization& pol, const StrobeWindow& window,
                         const std::vector<double>& grid_hz,
                         const CouplingConstants& k = {},
                         double nu = kDefaultPoissonRatio,
                         const SpectraOptions& opts = {});

// Row per piezo frequency, x_c from the Lorentzian drive response.
SpectrumMap drive_detuning_map(const NvSite& site, const MechanicalMode& mode,
                               const LaserPolarization& pol,
                               const std::vector<double>& piezo_grid_hz,
                               const std::vector<double>& laser_grid_hz,
                               const CouplingConstants& k = {},
                               double nu = kDefaultPoissonRatio,
                               const SpectraOptions& opts = {});

// Row per resonantly driven tip amplitude.
SpectrumMap amplitude_map(const NvSite& site, const MechanicalMode& mode,
                          const LaserPolarization& pol,
                          const std::vector<double>& amplitude_grid_m,
                          const std::vector<double>& laser_grid_hz,
                          const CouplingConstants& k = {},
                          double nu = kDefaultPoissonRatio,
                          const SpectraOptions& opts = {});

// Thread pool width for row/grid parallelism: NVSTRAIN_THREADS when set,
// otherwise the hardware concurrency.
int spectra_thread_count();

}  // namespace nvstrain
