#include "nvstrain/metrics.hpp"

#include "nvstrain/mechanics.hpp"

namespace nvstrain {

void DeviceProposal::validate() const {
  if (!(f_c_hz > 0.0)) throw ConfigError("f_c_hz must be positive");
  if (!(quality_q > 0.0)) throw ConfigError("quality_q must be positive");
  if (!(temperature_k > 0.0)) throw ConfigError("temperature_k must be positive");
  if (eps_zero_point < 0.0) throw ConfigError("eps_zero_point must be >= 0");
  if (!(gamma2_hz > 0.0)) throw ConfigError("gamma2_hz must be positive");
  if (rabi_omega_hz < 0.0) throw ConfigError("rabi_omega_hz must be >= 0");
  if (!(linewidth_gamma_hz > 0.0)) {
    throw ConfigError("linewidth_gamma_hz must be positive");
  }
}

ParallelCoupling parallel_coupling(const DeviceProposal& p) {
  p.validate();
  ParallelCoupling out;
  out.coeff_literal_hz_per_strain = -p.constants.lambda_a1 * p.nu +
                                    p.constants.lambda_a1p * (1.0 - p.nu) -
                                    p.constants.lambda_e * (1.0 + p.nu);
  out.g_literal_hz = out.coeff_literal_hz_per_strain * p.eps_zero_point;
  out.g_quoted_hz = out.coeff_quoted_hz_per_strain * p.eps_zero_point;
  return out;
}

double cooperativity(double g_hz, double gamma2_hz, double gamma_th_hz) {
  if (!(gamma2_hz > 0.0) || !(gamma_th_hz > 0.0)) {
    throw NumericError("cooperativity denominator must be positive");
  }
  return g_hz * g_hz / (gamma2_hz * gamma_th_hz);
}

CoolingRate cooling_rate(const DeviceProposal& p, double g_hz) {
  p.validate();
  CoolingRate out;
  out.rate_hz = g_hz * g_hz * p.rabi_omega_hz * p.rabi_omega_hz /
                (p.linewidth_gamma_hz * p.f_c_hz * p.f_c_hz);
  out.resolved_sideband = p.linewidth_gamma_hz < p.f_c_hz;
  return out;
}

double steady_state_occupation(double gamma_th_hz, double cooling_hz) {
  if (cooling_hz == 0.0) {
    throw NumericError("cooling rate is zero, occupation diverges");
  }
  return gamma_th_hz / cooling_hz;
}

MetricsReport device_report(const DeviceProposal& p) {
  p.validate();
  MetricsReport r;
  r.coupling = parallel_coupling(p);
  r.thermal_occupation = thermal_occupation(p.temperature_k, p.f_c_hz);
  r.thermalization_rate_hz =
      thermalization_rate(r.thermal_occupation, p.f_c_hz, p.quality_q);
  r.cooperativity_literal =
      cooperativity(r.coupling.g_literal_hz, p.gamma2_hz, r.thermalization_rate_hz);
  r.cooperativity_quoted =
      cooperativity(r.coupling.g_quoted_hz, p.gamma2_hz, r.thermalization_rate_hz);
  r.cooling_literal = cooling_rate(p, r.coupling.g_literal_hz);
  r.cooling_quoted = cooling_rate(p, r.coupling.g_quoted_hz);
  r.steady_state_literal = r.cooling_literal.rate_hz > 0.0
                               ? steady_state_occupation(
                                     r.thermalization_rate_hz,
                                     r.cooling_literal.rate_hz)
                               : 0.0;
  r.steady_state_quoted = r.cooling_quoted.rate_hz > 0.0
                              ? steady_state_occupation(
                                    r.thermalization_rate_hz,
                                    r.cooling_quoted.rate_hz)
                              : 0.0;
  return r;
}

}  // namespace nvstrain
