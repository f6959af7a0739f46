#pragma once

// Device figures of merit for a strain-coupled emitter on a nanobeam:
// single-phonon coupling, cooperativity, sideband cooling.

#include "nvstrain/constants.hpp"
#include "nvstrain/errors.hpp"

namespace nvstrain {

struct DeviceProposal {
  double f_c_hz = 238e6;
  double quality_q = 1e5;
  double temperature_k = 4.2;
  double eps_zero_point = 9.3e-9;
  double gamma2_hz = 100e6;        // optical dephasing
  double rabi_omega_hz = 100e6;
  double linewidth_gamma_hz = 100e6;
  CouplingConstants constants;
  double nu = kDefaultPoissonRatio;

  void validate() const;
};

struct ParallelCoupling {
  double coeff_literal_hz_per_strain = 0.0;
  double coeff_quoted_hz_per_strain = 2.31e15;
  double g_literal_hz = 0.0;
  double g_quoted_hz = 0.0;
};

// g = [-lambda_a1 nu + lambda_a1p (1 - nu) - lambda_e (1 + nu)] eps_0 for a
// transverse group-B emitter. The literal coefficient from the stored
// constants and the quoted 2.31 PHz variant disagree; both are reported.
ParallelCoupling parallel_coupling(const DeviceProposal& p);

double cooperativity(double g_hz, double gamma2_hz, double gamma_th_hz);

struct CoolingRate {
  double rate_hz = 0.0;
  bool resolved_sideband = true;  // advisory: linewidth below f_c
};

// Gamma_C = 4 pi^2 g^2 Omega^2 / (Gamma omega_c^2) with omega_c = 2 pi f_c.
CoolingRate cooling_rate(const DeviceProposal& p, double g_hz);

double steady_state_occupation(double gamma_th_hz, double cooling_hz);

struct MetricsReport {
  ParallelCoupling coupling;
  double thermal_occupation = 0.0;
  double thermalization_rate_hz = 0.0;
  double cooperativity_literal = 0.0;
  double cooperativity_quoted = 0.0;
  CoolingRate cooling_literal;
  CoolingRate cooling_quoted;
  double steady_state_literal = 0.0;
  double steady_state_quoted = 0.0;
};

MetricsReport device_report(const DeviceProposal& p);

}  // namespace nvstrain
