#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nvstrain/config.hpp"
#include "nvstrain/csv.hpp"
#include "nvstrain/inference.hpp"
#include "nvstrain/mechanics.hpp"
#include "nvstrain/metrics.hpp"
#include "nvstrain/nv_core.hpp"
#include "nvstrain/optics.hpp"
#include "nvstrain/peaks.hpp"
#include "nvstrain/site.hpp"
#include "nvstrain/spectra.hpp"
#include "nvstrain/synthesis.hpp"

namespace py = pybind11;
using namespace nvstrain;

PYBIND11_MODULE(_core, m) {
  m.doc() = "strain-coupled NV orbital spectroscopy toolkit";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<FitError>(m, "FitError");
  py::register_exception<DesignError>(m, "DesignError");
  py::register_exception<NumericError>(m, "NumericError");
  py::register_exception<UnreachableAngleError>(m, "UnreachableAngleError");
  py::register_exception<DegenerateStrainError>(m, "DegenerateStrainError");
  py::register_exception<FrameError>(m, "FrameError");
  py::register_exception<StrainRangeError>(m, "StrainRangeError");

  py::enum_<NvAxis>(m, "NvAxis")
      .value("m1m1m1", NvAxis::m1m1m1)
      .value("p1p1m1", NvAxis::p1p1m1)
      .value("m1p1p1", NvAxis::m1p1p1)
      .value("p1m1p1", NvAxis::p1m1p1);

  py::enum_<NvGroup>(m, "NvGroup").value("A", NvGroup::A).value("B", NvGroup::B);

  py::class_<NvOrientation>(m, "NvOrientation")
      .def(py::init<>())
      .def_readwrite("axis", &NvOrientation::axis)
      .def("group", &NvOrientation::group)
      .def_static("representative", &NvOrientation::representative);

  py::class_<CouplingConstants>(m, "CouplingConstants")
      .def(py::init<>())
      .def_readwrite("lambda_a1", &CouplingConstants::lambda_a1)
      .def_readwrite("lambda_a1p", &CouplingConstants::lambda_a1p)
      .def_readwrite("lambda_e", &CouplingConstants::lambda_e)
      .def_readwrite("lambda_ep", &CouplingConstants::lambda_ep);

  py::class_<IntrinsicStrain>(m, "IntrinsicStrain")
      .def(py::init<>())
      .def_readwrite("df_a1_hz", &IntrinsicStrain::df_a1_hz)
      .def_readwrite("df_e1_hz", &IntrinsicStrain::df_e1_hz)
      .def_readwrite("df_e2_hz", &IntrinsicStrain::df_e2_hz);

  py::class_<SymmetryShifts>(m, "SymmetryShifts")
      .def(py::init<>())
      .def_readwrite("a1_hz", &SymmetryShifts::a1_hz)
      .def_readwrite("e1_hz", &SymmetryShifts::e1_hz)
      .def_readwrite("e2_hz", &SymmetryShifts::e2_hz);

  py::class_<TransitionFrequencies>(m, "TransitionFrequencies")
      .def(py::init<>())
      .def_readwrite("f_plus_hz", &TransitionFrequencies::f_plus_hz)
      .def_readwrite("f_minus_hz", &TransitionFrequencies::f_minus_hz)
      .def("splitting_hz", &TransitionFrequencies::splitting_hz);

  py::class_<CantileverGeometry>(m, "CantileverGeometry")
      .def(py::init<>())
      .def_readwrite("length_m", &CantileverGeometry::length_m)
      .def_readwrite("width_m", &CantileverGeometry::width_m)
      .def_readwrite("thickness_m", &CantileverGeometry::thickness_m)
      .def_readwrite("nv_depth_m", &CantileverGeometry::nv_depth_m)
      .def_readwrite("nv_axial_z_m", &CantileverGeometry::nv_axial_z_m)
      .def("fiber_offset_m", &CantileverGeometry::fiber_offset_m);

  py::class_<MechanicalMode>(m, "MechanicalMode")
      .def(py::init<>())
      .def_readwrite("f_c_hz", &MechanicalMode::f_c_hz)
      .def_readwrite("quality_q", &MechanicalMode::quality_q)
      .def_readwrite("x_max_m", &MechanicalMode::x_max_m);

  py::class_<DriveState>(m, "DriveState")
      .def(py::init<>())
      .def_readwrite("mode", &DriveState::mode)
      .def_readwrite("f_piezo_hz", &DriveState::f_piezo_hz)
      .def_readwrite("x_c_m", &DriveState::x_c_m)
      .def("period_s", &DriveState::period_s);

  py::class_<NvSite>(m, "NvSite")
      .def(py::init<>())
      .def_readwrite("site_id", &NvSite::site_id)
      .def_readwrite("orientation", &NvSite::orientation)
      .def_readwrite("intrinsic", &NvSite::intrinsic)
      .def_readwrite("f_zpl_hz", &NvSite::f_zpl_hz)
      .def_readwrite("linewidth_gamma_hz", &NvSite::linewidth_gamma_hz)
      .def_readwrite("pl_scale_kcps", &NvSite::pl_scale_kcps)
      .def_readwrite("geometry", &NvSite::geometry)
      .def("strain_at", &NvSite::strain_at)
      .def("shifts_at", &NvSite::shifts_at, py::arg("x_c_m"), py::arg("k"),
           py::arg("nu") = kDefaultPoissonRatio)
      .def("frequencies_at", &NvSite::frequencies_at, py::arg("x_c_m"),
           py::arg("k"), py::arg("nu") = kDefaultPoissonRatio);

  py::class_<LaserPolarization>(m, "LaserPolarization")
      .def(py::init<>())
      .def_readwrite("phi_rad", &LaserPolarization::phi_rad)
      .def_readwrite("psi_rad", &LaserPolarization::psi_rad)
      .def_readwrite("p_in_w", &LaserPolarization::p_in_w)
      .def_readwrite("p_sat_w", &LaserPolarization::p_sat_w);

  py::class_<DipolePattern>(m, "DipolePattern")
      .def(py::init<>())
      .def_readwrite("i_ex", &DipolePattern::i_ex)
      .def_readwrite("i_ey", &DipolePattern::i_ey);

  py::class_<StrobeWindow>(m, "StrobeWindow")
      .def(py::init<>())
      .def_readwrite("start_t_s", &StrobeWindow::start_t_s)
      .def_readwrite("tau_s", &StrobeWindow::tau_s)
      .def_readwrite("phase_uncertainty_rad",
                     &StrobeWindow::phase_uncertainty_rad)
      .def_static("down_antinode", &StrobeWindow::down_antinode,
                  py::arg("period_s"), py::arg("tau_s") = 60e-9)
      .def_static("up_antinode", &StrobeWindow::up_antinode,
                  py::arg("period_s"), py::arg("tau_s") = 60e-9);

  py::class_<SpectrumMeta>(m, "SpectrumMeta")
      .def(py::init<>())
      .def_readwrite("site_id", &SpectrumMeta::site_id)
      .def_readwrite("f_reference_hz", &SpectrumMeta::f_reference_hz)
      .def_readwrite("x_c_m", &SpectrumMeta::x_c_m)
      .def_readwrite("f_piezo_hz", &SpectrumMeta::f_piezo_hz)
      .def_readwrite("strobed", &SpectrumMeta::strobed)
      .def_readwrite("strobe_start_s", &SpectrumMeta::strobe_start_s)
      .def_readwrite("strobe_tau_s", &SpectrumMeta::strobe_tau_s);

  py::class_<Spectrum>(m, "Spectrum")
      .def(py::init<>())
      .def_readwrite("detunings_hz", &Spectrum::detunings_hz)
      .def_readwrite("signal_kcps", &Spectrum::signal_kcps)
      .def_readwrite("meta", &Spectrum::meta);

  py::class_<SpectraOptions>(m, "SpectraOptions")
      .def(py::init<>())
      .def_readwrite("rel_tol", &SpectraOptions::rel_tol)
      .def_readwrite("max_samples", &SpectraOptions::max_samples)
      .def_readwrite("modulate_intensity", &SpectraOptions::modulate_intensity);

  py::class_<LorentzianPeak>(m, "LorentzianPeak")
      .def(py::init<>())
      .def_readwrite("center_hz", &LorentzianPeak::center_hz)
      .def_readwrite("fwhm_hz", &LorentzianPeak::fwhm_hz)
      .def_readwrite("amplitude", &LorentzianPeak::amplitude)
      .def_readwrite("sigma_center_hz", &LorentzianPeak::sigma_center_hz)
      .def_readwrite("sigma_fwhm_hz", &LorentzianPeak::sigma_fwhm_hz)
      .def_readwrite("sigma_amplitude", &LorentzianPeak::sigma_amplitude);

  py::class_<PeakFit>(m, "PeakFit")
      .def(py::init<>())
      .def_readwrite("peaks", &PeakFit::peaks)
      .def_readwrite("background", &PeakFit::background)
      .def_readwrite("degenerate", &PeakFit::degenerate)
      .def_readwrite("converged", &PeakFit::converged)
      .def_readwrite("cost", &PeakFit::cost)
      .def_readwrite("iterations", &PeakFit::iterations);

  py::class_<StrainScanPoint>(m, "StrainScanPoint")
      .def(py::init<>())
      .def_readwrite("eps", &StrainScanPoint::eps)
      .def_readwrite("f_plus_hz", &StrainScanPoint::f_plus_hz)
      .def_readwrite("f_minus_hz", &StrainScanPoint::f_minus_hz)
      .def_readwrite("sigma_f_hz", &StrainScanPoint::sigma_f_hz)
      .def_readwrite("sigma_eps", &StrainScanPoint::sigma_eps);

  py::class_<NvDataset>(m, "NvDataset")
      .def(py::init<>())
      .def_readwrite("site_id", &NvDataset::site_id)
      .def_readwrite("group", &NvDataset::group)
      .def_readwrite("points", &NvDataset::points)
      .def_readwrite("theta_obs_rad", &NvDataset::theta_obs_rad)
      .def_readwrite("delta_f0_obs_hz", &NvDataset::delta_f0_obs_hz);

  py::class_<PolarizationScanPoint>(m, "PolarizationScanPoint")
      .def(py::init<>())
      .def_readwrite("phi_rad", &PolarizationScanPoint::phi_rad)
      .def_readwrite("pl_ex_kcps", &PolarizationScanPoint::pl_ex_kcps)
      .def_readwrite("pl_ey_kcps", &PolarizationScanPoint::pl_ey_kcps);

  py::class_<FitOptions>(m, "FitOptions")
      .def(py::init<>())
      .def_readwrite("max_iterations", &FitOptions::max_iterations)
      .def_readwrite("step_tol", &FitOptions::step_tol)
      .def_readwrite("calibration_fraction", &FitOptions::calibration_fraction)
      .def_readwrite("f_zpl_hz", &FitOptions::f_zpl_hz)
      .def_readwrite("nu", &FitOptions::nu);

  py::class_<LambdaFitReport>(m, "LambdaFitReport")
      .def(py::init<>())
      .def_readwrite("constants", &LambdaFitReport::constants)
      .def_readwrite("frac_lambda_a1", &LambdaFitReport::frac_lambda_a1)
      .def_readwrite("frac_lambda_a1p", &LambdaFitReport::frac_lambda_a1p)
      .def_readwrite("frac_lambda_e", &LambdaFitReport::frac_lambda_e)
      .def_readwrite("frac_lambda_ep", &LambdaFitReport::frac_lambda_ep)
      .def_readwrite("calibration_fraction",
                     &LambdaFitReport::calibration_fraction)
      .def_readwrite("lambda_ep_identifiable",
                     &LambdaFitReport::lambda_ep_identifiable)
      .def_readwrite("site_ids", &LambdaFitReport::site_ids)
      .def_readwrite("per_site", &LambdaFitReport::per_site)
      .def_readwrite("residual_common", &LambdaFitReport::residual_common)
      .def_readwrite("residual_e", &LambdaFitReport::residual_e)
      .def_readwrite("converged", &LambdaFitReport::converged);

  py::class_<PolarizationFit>(m, "PolarizationFit")
      .def(py::init<>())
      .def_readwrite("theta_rad", &PolarizationFit::theta_rad)
      .def_readwrite("p_sat_w", &PolarizationFit::p_sat_w)
      .def_readwrite("psi_rad", &PolarizationFit::psi_rad)
      .def_readwrite("scale_kcps", &PolarizationFit::scale_kcps)
      .def_readwrite("covariance", &PolarizationFit::covariance)
      .def_readwrite("residual_norm", &PolarizationFit::residual_norm)
      .def_readwrite("converged", &PolarizationFit::converged)
      .def_readwrite("iterations", &PolarizationFit::iterations);

  py::class_<PolarizationMatch>(m, "PolarizationMatch")
      .def(py::init<>())
      .def_readwrite("e1_shift_hz", &PolarizationMatch::e1_shift_hz)
      .def_readwrite("e2_shift_hz", &PolarizationMatch::e2_shift_hz)
      .def_readwrite("strain", &PolarizationMatch::strain)
      .def_readwrite("tip_deflection_m", &PolarizationMatch::tip_deflection_m)
      .def_readwrite("antinode_sign", &PolarizationMatch::antinode_sign);

  py::class_<EnsembleSpec>(m, "EnsembleSpec")
      .def(py::init<>())
      .def_readwrite("sites", &EnsembleSpec::sites)
      .def_readwrite("constants", &EnsembleSpec::constants)
      .def_readwrite("nu", &EnsembleSpec::nu)
      .def_readwrite("deflections_m", &EnsembleSpec::deflections_m)
      .def_readwrite("phase_uncertainty_rad",
                     &EnsembleSpec::phase_uncertainty_rad)
      .def_readwrite("noise", &EnsembleSpec::noise)
      .def_readwrite("sigma_f_floor_hz", &EnsembleSpec::sigma_f_floor_hz)
      .def_readwrite("depth_sigma_m", &EnsembleSpec::depth_sigma_m)
      .def_readwrite("seed", &EnsembleSpec::seed);

  py::class_<DeviceProposal>(m, "DeviceProposal")
      .def(py::init<>())
      .def_readwrite("f_c_hz", &DeviceProposal::f_c_hz)
      .def_readwrite("quality_q", &DeviceProposal::quality_q)
      .def_readwrite("temperature_k", &DeviceProposal::temperature_k)
      .def_readwrite("eps_zero_point", &DeviceProposal::eps_zero_point)
      .def_readwrite("gamma2_hz", &DeviceProposal::gamma2_hz)
      .def_readwrite("rabi_omega_hz", &DeviceProposal::rabi_omega_hz)
      .def_readwrite("linewidth_gamma_hz", &DeviceProposal::linewidth_gamma_hz)
      .def_readwrite("constants", &DeviceProposal::constants)
      .def_readwrite("nu", &DeviceProposal::nu);

  py::class_<ParallelCoupling>(m, "ParallelCoupling")
      .def(py::init<>())
      .def_readwrite("coeff_literal_hz_per_strain",
                     &ParallelCoupling::coeff_literal_hz_per_strain)
      .def_readwrite("coeff_quoted_hz_per_strain",
                     &ParallelCoupling::coeff_quoted_hz_per_strain)
      .def_readwrite("g_literal_hz", &ParallelCoupling::g_literal_hz)
      .def_readwrite("g_quoted_hz", &ParallelCoupling::g_quoted_hz);

  py::class_<CoolingRate>(m, "CoolingRate")
      .def(py::init<>())
      .def_readwrite("rate_hz", &CoolingRate::rate_hz)
      .def_readwrite("resolved_sideband", &CoolingRate::resolved_sideband);

  py::class_<MetricsReport>(m, "MetricsReport")
      .def(py::init<>())
      .def_readwrite("coupling", &MetricsReport::coupling)
      .def_readwrite("thermal_occupation", &MetricsReport::thermal_occupation)
      .def_readwrite("thermalization_rate_hz",
                     &MetricsReport::thermalization_rate_hz)
      .def_readwrite("cooperativity_literal",
                     &MetricsReport::cooperativity_literal)
      .def_readwrite("cooperativity_quoted",
                     &MetricsReport::cooperativity_quoted)
      .def_readwrite("cooling_literal", &MetricsReport::cooling_literal)
      .def_readwrite("cooling_quoted", &MetricsReport::cooling_quoted)
      .def_readwrite("steady_state_literal",
                     &MetricsReport::steady_state_literal)
      .def_readwrite("steady_state_quoted",
                     &MetricsReport::steady_state_quoted);

  m.attr("DEFAULT_POISSON_RATIO") = kDefaultPoissonRatio;
  m.attr("DEFAULT_ZPL_HZ") = kDefaultZplHz;

  m.def("deg_to_rad", &deg_to_rad);
  m.def("rad_to_deg", &rad_to_deg);
  m.def("mode_shape_bracket", &mode_shape_bracket);
  m.def("mode_strain", &mode_strain);
  m.def("drive_response", &drive_response);
  m.def("thermal_occupation", &thermal_occupation);
  m.def("thermalization_rate", &thermalization_rate);
  m.def("stuckelberg_angle",
        py::overload_cast<double, double>(&stuckelberg_angle),
        py::arg("e1_tot_hz"), py::arg("e2_tot_hz"));
  m.def("zero_strain_splitting", &zero_strain_splitting);
  m.def("linear_intensity", &linear_intensity);
  m.def("saturated_intensity", &saturated_intensity);
  m.def("match_polarization", &match_polarization, py::arg("target_theta_rad"),
        py::arg("site"), py::arg("k"), py::arg("nu") = kDefaultPoissonRatio);

  m.def("cw_spectrum", &cw_spectrum, py::arg("site"), py::arg("drive"),
        py::arg("pol"), py::arg("grid_hz"), py::arg("k") = CouplingConstants{},
        py::arg("nu") = kDefaultPoissonRatio,
        py::arg("opts") = SpectraOptions{});
  m.def("strobe_spectrum", &strobe_spectrum, py::arg("site"), py::arg("drive"),
        py::arg("pol"), py::arg("window"), py::arg("grid_hz"),
        py::arg("k") = CouplingConstants{},
        py::arg("nu") = kDefaultPoissonRatio,
        py::arg("opts") = SpectraOptions{});
  m.def("fit_lorentzian_peaks", &fit_lorentzian_peaks, py::arg("detunings_hz"),
        py::arg("signal"), py::arg("n_peaks"));

  m.def("synthesize_datasets", &synthesize_datasets);
  m.def("synthesize_polarization_scan", &synthesize_polarization_scan,
        py::arg("group"), py::arg("theta_rad"), py::arg("pol"),
        py::arg("scale_kcps"), py::arg("n_phi") = 19,
        py::arg("sigma_kcps") = 0.0, py::arg("seed") = 1);
  m.def("fit_lambdas", &fit_lambdas, py::arg("datasets"),
        py::arg("opts") = FitOptions{});
  m.def("fit_polarization", &fit_polarization, py::arg("scan"),
        py::arg("group"), py::arg("p_in_w"), py::arg("opts") = FitOptions{});

  m.def("parallel_coupling", &parallel_coupling);
  m.def("cooperativity", &cooperativity);
  m.def("cooling_rate", &cooling_rate);
  m.def("steady_state_occupation", &steady_state_occupation);
  m.def("device_report", &device_report);

  m.def("write_datasets_csv", &write_datasets_csv);
  m.def("read_datasets_csv", &read_datasets_csv);
  m.def("write_polarization_csv", &write_polarization_csv);
  m.def("read_polarization_csv", &read_polarization_csv);
}
