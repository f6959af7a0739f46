#pragma once

#include <numbers>

namespace nvstrain {

inline constexpr double kPi = std::numbers::pi;

// CODATA 2018 exact values
inline constexpr double kPlanckJs = 6.62607015e-34;
inline constexpr double kBoltzmannJPerK = 1.380649e-23;
inline constexpr double kSpeedOfLightMPerS = 2.99792458e8;

inline constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Orbital deformation-potential couplings, Hz per unit strain.
struct CouplingConstants {
  double lambda_a1 = -1.95e15;
  double lambda_a1p = 2.16e15;
  double lambda_e = -0.85e15;
  double lambda_ep = 0.02e15;
};

// Diamond Poisson ratio along the cantilever cut.
inline constexpr double kDefaultPoissonRatio = 0.11;

// Strain magnitudes past this are outside the linear orbital-coupling regime.
inline constexpr double kMaxLinearStrain = 1e-2;

// Fundamental flexural mode: k*l = 1.875, mode-shape ratio 1.3622.
inline constexpr double kModeWavenumber = 1.875;
inline constexpr double kModeShapeRatio = 1.3622;

// Natural zero-phonon line, 637 nm.
inline constexpr double kDefaultZplHz = kSpeedOfLightMPerS / 637e-9;

}  // namespace nvstrain
