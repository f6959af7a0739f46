#include "nvstrain/optics.hpp"

#include <cmath>
#include <string>

namespace nvstrain {

namespace {

const double kSqrt3 = std::sqrt(3.0);

// The two projection amplitudes whose interference builds each intensity:
// intensity = a^2 + b^2 - 2 a b cos(psi), which collapses to (b - a)^2 for
// a fully linear polarization state (psi = 0).
struct Projection {
  double a;
  double b;
};

Projection ex_projection(NvGroup group, double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  if (group == NvGroup::A) return {st * sp, ct * cp / kSqrt3};
  return {st * cp, ct * sp / kSqrt3};
}

Projection ey_projection(NvGroup group, double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(phi), cp = std::cos(phi);
  if (group == NvGroup::A) return {-ct * sp, st * cp / kSqrt3};
  return {-ct * cp, st * sp / kSqrt3};
}

double quadratic(const Projection& p, double cos_psi) {
  return p.a * p.a + p.b * p.b - 2.0 * p.a * p.b * cos_psi;
}

}  // namespace

DipolePattern linear_intensity(NvGroup group, double theta_rad, double phi_rad) {
  const Projection ex = ex_projection(group, theta_rad, phi_rad);
  const Projection ey = ey_projection(group, theta_rad, phi_rad);
  const double ax = ex.b - ex.a;
  const double ay = ey.b - ey.a;
  return {ax * ax, ay * ay};
}

DipolePattern saturated_intensity(NvGroup group, double theta_rad,
                                  const LaserPolarization& pol) {
  pol.validate();
  double cos_psi = std::cos(pol.psi_rad);
  if (std::abs(cos_psi) < 1e-15) cos_psi = 0.0;
  const double scale = pol.p_in_w / pol.p_sat_w;
  const Projection ex = ex_projection(group, theta_rad, pol.phi_rad);
  const Projection ey = ey_projection(group, theta_rad, pol.phi_rad);
  return {-std::expm1(-scale * quadratic(ex, cos_psi)),
          -std::expm1(-scale * quadratic(ey, cos_psi))};
}

PolarizationMatch match_polarization(double target_theta_rad,
                                     const NvSite& site,
                                     const CouplingConstants& k, double nu) {
  site.validate();
  const double e2 = site.intrinsic.df_e2_hz;
  const double e1_intr = site.intrinsic.df_e1_hz;

  double e1_required = 0.0;  // total e1 (intrinsic + drive) at the target
  if (e2 == 0.0) {
    // Only theta = 0 (e1 > 0) or pi/2 (e1 < 0) occur; the drive cannot
    // leave that pair, and within it the deflection is not unique.
    double current;
    try {
      current = stuckelberg_angle(site.intrinsic, SymmetryShifts{});
    } catch (const DegenerateStrainError&) {
      throw UnreachableAngleError(
          "site has no E-symmetric strain: mixing angle undefined");
    }
    if (std::abs(target_theta_rad - current) < 1e-12) {
      return PolarizationMatch{0.0, 0.0, 0.0, 0.0, -1};
    }
    throw UnreachableAngleError(
        "df_e2 = 0: only the current mixing angle is reachable");
  } else {
    // 2*theta = atan2(e2, e1) sweeps (0, pi) for e2 > 0 and (-pi, 0) for
    // e2 < 0 as e1 runs over the reals; the target must lie on that branch.
    const double two_theta = 2.0 * target_theta_rad;
    if ((two_theta > 0.0) != (e2 > 0.0) || two_theta == 0.0 ||
        std::abs(two_theta) >= kPi) {
      throw UnreachableAngleError(
          "target mixing angle not reachable by tuning e1 alone (sign of "
          "df_e2 fixes the reachable branch)");
    }
    e1_required = e2 / std::tan(two_theta);
  }

  const double e1_shift = e1_required - e1_intr;

  // e1 per unit axial strain through the full frame chain (linear).
  const double probe_eps = 1e-5;
  const StrainTensor probe = axial_strain_tensor(probe_eps, nu);
  const SymmetryShifts s = symmetry_shifts(to_nv_frame(probe, site.orientation), k);
  const double e1_per_eps = s.e1_hz / probe_eps;
  if (e1_per_eps == 0.0) {
    if (e1_shift == 0.0) return PolarizationMatch{0.0, 0.0, 0.0, 0.0, -1};
    throw UnreachableAngleError("device couples no E1 strain to this site");
  }

  const double strain = e1_shift / e1_per_eps;
  if (std::abs(strain) >= kMaxLinearStrain) {
    throw UnreachableAngleError("required strain " + std::to_string(strain) +
                                " outside the linear regime");
  }

  const double strain_per_x = mode_strain(site.geometry, 1.0);
  if (strain_per_x == 0.0) {
    if (e1_shift == 0.0) return PolarizationMatch{0.0, 0.0, 0.0, 0.0, -1};
    throw UnreachableAngleError(
        "site placement receives no strain from the flexural mode");
  }

  PolarizationMatch m;
  m.e1_shift_hz = e1_shift;
  m.e2_shift_hz = 0.0;
  m.strain = strain;
  m.tip_deflection_m = strain / strain_per_x;
  m.antinode_sign = m.tip_deflection_m < 0.0 ? -1 : 1;
  return m;
}

}  // namespace nvstrain
