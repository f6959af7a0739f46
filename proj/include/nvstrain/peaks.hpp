#pragma once

// Lorentzian peak fitting for RES spectra: sum of 1 or 2 Lorentzians plus
// a constant background, deterministic prominence-based initialization.

#include <vector>

#include "nvstrain/errors.hpp"

namespace nvstrain {

struct LorentzianPeak {
  double center_hz = 0.0;
  double fwhm_hz = 0.0;
  double amplitude = 0.0;  // peak height above background, kC/s
  double sigma_center_hz = 0.0;
  double sigma_fwhm_hz = 0.0;
  double sigma_amplitude = 0.0;
};

struct PeakFit {
  std::vector<LorentzianPeak> peaks;  // sorted by center
  double background = 0.0;
  double sigma_background = 0.0;
  bool degenerate = false;  // centers closer than max(FWHM)/4
  bool converged = false;
  double cost = 0.0;
  int iterations = 0;
};

// n_peaks must be 1 or 2; requires >= 8*n_peaks samples and a strictly
// increasing detuning grid. Throws FitError when no peak prominence is
// found or the optimizer fails to converge.
PeakFit fit_lorentzian_peaks(const std::vector<double>& detunings_hz,
                             const std::vector<double>& signal_kcps,
                             int n_peaks);

}  // namespace nvstrain
