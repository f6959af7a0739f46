#pragma once

// Parameter extraction from strain-scan and polarization datasets: the
// common-mode linear fit for (lambda_a1, lambda_a1p), the joint nonlinear
// fit for (lambda_e, lambda_ep) with per-site intrinsic strain, the
// polarization-pattern fit, and the measurement error model.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nvstrain/constants.hpp"
#include "nvstrain/nv_core.hpp"
#include "nvstrain/site.hpp"
#include "nvstrain/spectra.hpp"

namespace nvstrain {

struct StrainScanPoint {
  double eps = 0.0;      // nominal mechanically induced axial strain
  double f_plus_hz = 0.0;
  double f_minus_hz = 0.0;
  double sigma_f_hz = 0.0;
  double sigma_eps = 0.0;
};

struct NvDataset {
  std::string site_id;
  NvGroup group = NvGroup::A;
  std::vector<StrainScanPoint> points;
  double theta_obs_rad = 0.0;    // seeds delta f_E1/E2 decomposition
  double delta_f0_obs_hz = 0.0;  // zero-strain splitting
};

struct PolarizationScanPoint {
  double phi_rad = 0.0;
  double pl_ex_kcps = 0.0;
  double pl_ey_kcps = 0.0;
};

struct FitOptions {
  int max_iterations = 200;
  double step_tol = 1e-12;
  double calibration_fraction = 0.15;  // amplitude-calibration floor
  double f_zpl_hz = kDefaultZplHz;
  double nu = kDefaultPoissonRatio;
};

// Slope of (f_+ + f_-)/2 vs eps for each group, at given couplings:
// group A: lambda_a1 (2-nu)/3 + lambda_a1p (1-5 nu)/3
// group B: -lambda_a1 nu + lambda_a1p (1-nu)
double common_mode_slope(NvGroup group, double lambda_a1, double lambda_a1p,
                         double nu);

// E1 shift per unit axial strain for each group:
// group A: -lambda_e (1+nu)/3 - lambda_ep 2 sqrt(2) (1+nu)/3
// group B: lambda_e (1+nu)
double e1_slope(NvGroup group, double lambda_e, double lambda_ep, double nu);

struct CommonModeFit {
  double lambda_a1 = 0.0;
  double lambda_a1p = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  std::vector<double> site_offsets_hz;  // order: group A sets, then group B
  double residual_norm = 0.0;
  int points_used = 0;
};

// Weighted linear fit of (f_+ + f_-)/2 = offset_s + slope_G(lambda) eps over
// both groups simultaneously. Requires >= 1 dataset per group and >= 2
// distinct eps per dataset; a rank-deficient design raises DesignError.
CommonModeFit fit_common_mode(const std::vector<NvDataset>& group_a,
                              const std::vector<NvDataset>& group_b,
                              const FitOptions& opts = {});

struct EConstantsFit {
  double lambda_e = 0.0;
  double lambda_ep = 0.0;
  // lambda_ep enters only the group-A model; without group-A data it is
  // held at 0 and flagged here (and with group-B data absent the pair is
  // inseparable, handled the same way).
  bool lambda_ep_identifiable = true;
  std::vector<std::string> site_ids;
  std::vector<IntrinsicStrain> per_site;  // df_a1 relative to opts.f_zpl_hz
  std::vector<double> site_offsets_hz;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> cost_history;
};

// Joint weighted nonlinear fit of the group models over all sites, sharing
// (lambda_e, lambda_ep), with per-site (offset, df_e1, df_e2) nuisance
// parameters seeded from (delta_f0/2)(cos 2 theta, sin 2 theta).
EConstantsFit fit_e_constants(const std::vector<NvDataset>& datasets,
                              double lambda_a1, double lambda_a1p,
                              const FitOptions& opts = {});

struct LambdaFitReport {
  CouplingConstants constants;
  // fractional uncertainties, floored at calibration_fraction
  double frac_lambda_a1 = 0.0;
  double frac_lambda_a1p = 0.0;
  double frac_lambda_e = 0.0;
  double frac_lambda_ep = 0.0;
  double calibration_fraction = 0.15;
  bool lambda_ep_identifiable = true;
  std::vector<std::string> site_ids;
  std::vector<IntrinsicStrain> per_site;
  double residual_common = 0.0;
  double residual_e = 0.0;
  bool converged = false;
  Eigen::Matrix2d cov_a1 = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d cov_e = Eigen::Matrix2d::Zero();
};

// Two-stage pipeline: common-mode fit, then E-constant fit with the
// A1 couplings held fixed.
LambdaFitReport fit_lambdas(const std::vector<NvDataset>& datasets,
                            const FitOptions& opts = {});

struct PolarizationFit {
  double theta_rad = 0.0;   // canonical branch (-pi/2, pi/2]
  double p_sat_w = 0.0;
  double psi_rad = 0.0;     // canonical branch [0, pi/2]
  double scale_kcps = 0.0;
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();  // (theta, p_sat, psi, scale)
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Joint fit of scale * saturated_intensity to both PL channels. Requires
// >= 8 distinct phi spanning >= 150 degrees (DesignError otherwise).
// The exact model degeneracy (theta, psi) <-> (-theta, pi - psi) is
// resolved to the canonical branches noted above.
PolarizationFit fit_polarization(const std::vector<PolarizationScanPoint>& scan,
                                 NvGroup group, double p_in_w,
                                 const FitOptions& opts = {});

struct PointUncertainty {
  double sigma_f_hz = 0.0;
  double sigma_eps = 0.0;
};

// Error model of the strain-scan points: sigma_f is the full range of f_pm
// as the strobe phase varies over +-phase_uncertainty about the antinode
// (max over the two transitions), sigma_eps = |eps| * depth_sigma / R_0.
PointUncertainty propagate_uncertainties(const NvSite& site,
                                         const CouplingConstants& k, double nu,
                                         double antinode_deflection_m,
                                         double phase_uncertainty_rad,
                                         double depth_sigma_m = 13e-9);

}  // namespace nvstrain
