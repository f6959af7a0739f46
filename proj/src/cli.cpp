#include "nvstrain/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>

#include "nvstrain/config.hpp"
#include "nvstrain/csv.hpp"
#include "nvstrain/inference.hpp"
#include "nvstrain/metrics.hpp"
#include "nvstrain/synthesis.hpp"

namespace nvstrain::cli {

namespace {

using nlohmann::json;

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  f << j.dump(2) << "\n";
}

double site_theta(const NvSite& site) {
  if (std::abs(site.intrinsic.df_e1_hz) < 1e-3 &&
      std::abs(site.intrinsic.df_e2_hz) < 1e-3) {
    return 0.0;
  }
  return stuckelberg_angle(site.intrinsic.df_e1_hz, site.intrinsic.df_e2_hz);
}

int cmd_simulate_cw(const RunConfig& cfg, const std::string& out) {
  const Spectrum s =
      cw_spectrum(cfg.active_site(), cfg.drive_state(), cfg.laser,
                  cfg.laser_grid.linspace(), cfg.constants, cfg.nu);
  write_spectrum_csv(out, s);
  std::cout << "wrote cw spectrum (" << s.detunings_hz.size() << " points) to "
            << out << "\n";
  return 0;
}

int cmd_simulate_strobe(const RunConfig& cfg, const std::string& out) {
  if (!cfg.strobe) {
    throw ConfigError("'strobe' section is required for simulate strobe");
  }
  const Spectrum s =
      strobe_spectrum(cfg.active_site(), cfg.drive_state(), cfg.laser,
                      *cfg.strobe, cfg.laser_grid.linspace(), cfg.constants,
                      cfg.nu);
  write_spectrum_csv(out, s);
  std::cout << "wrote strobed spectrum (" << s.detunings_hz.size()
            << " points) to " << out << "\n";
  return 0;
}

int cmd_simulate_map_detuning(const RunConfig& cfg, const std::string& out) {
  if (!cfg.piezo_sweep) {
    throw ConfigError(
        "'drive.piezo_sweep' is required for simulate map-detuning");
  }
  const SpectrumMap m = drive_detuning_map(
      cfg.active_site(), cfg.mode, cfg.laser, cfg.piezo_sweep->linspace(),
      cfg.laser_grid.linspace(), cfg.constants, cfg.nu);
  write_map_csv(out, m);
  std::cout << "wrote detuning map (" << m.axis.size() << " rows) to " << out
            << "\n";
  return 0;
}

int cmd_simulate_map_amplitude(const RunConfig& cfg, const std::string& out) {
  if (!cfg.amplitude_sweep) {
    throw ConfigError(
        "'drive.amplitude_sweep' is required for simulate map-amplitude");
  }
  const SpectrumMap m = amplitude_map(
      cfg.active_site(), cfg.mode, cfg.laser, cfg.amplitude_sweep->linspace(),
      cfg.laser_grid.linspace(), cfg.constants, cfg.nu);
  write_map_csv(out, m);
  std::cout << "wrote amplitude map (" << m.axis.size() << " rows) to " << out
            << "\n";
  return 0;
}

int cmd_simulate_polarization(const RunConfig& cfg, const std::string& out) {
  const NvSite& site = cfg.active_site();
  const auto scan = synthesize_polarization_scan(
      site.orientation.group(), site_theta(site), cfg.laser,
      cfg.synth.scale_kcps * site.pl_scale_kcps, cfg.synth.n_phi,
      cfg.noise ? cfg.synth.sigma_kcps : 0.0, cfg.seed);
  write_polarization_csv(out, scan);
  std::cout << "wrote polarization scan (" << scan.size() << " angles) to "
            << out << "\n";
  return 0;
}

int cmd_synthesize_dataset(const RunConfig& cfg, const std::string& out) {
  EnsembleSpec spec;
  spec.sites = cfg.sites;
  spec.constants = cfg.constants;
  spec.nu = cfg.nu;
  spec.deflections_m = cfg.synth.deflections_m;
  if (cfg.strobe) {
    spec.phase_uncertainty_rad = cfg.strobe->phase_uncertainty_rad;
  }
  spec.noise = cfg.noise;
  spec.sigma_f_floor_hz = cfg.synth.sigma_f_floor_hz;
  spec.depth_sigma_m = cfg.depth_sigma_m;
  spec.seed = cfg.seed;
  const auto datasets = synthesize_datasets(spec);
  write_datasets_csv(out, datasets);
  std::cout << "wrote " << datasets.size() << " site datasets to " << out
            << "\n";
  return 0;
}

FitOptions fit_options(const RunConfig& cfg) {
  FitOptions o;
  o.max_iterations = cfg.fit.max_iterations;
  o.step_tol = cfg.fit.step_tol;
  o.calibration_fraction = cfg.calibration_fraction;
  o.nu = cfg.nu;
  if (!cfg.sites.empty()) o.f_zpl_hz = cfg.active_site().f_zpl_hz;
  return o;
}

int cmd_fit_lambdas(const RunConfig& cfg, const std::string& out) {
  if (cfg.fit.datasets_csv.empty()) {
    throw ConfigError("'fit.datasets_csv' is required for fit lambdas");
  }
  const auto datasets = read_datasets_csv(cfg.fit.datasets_csv);
  const LambdaFitReport rep = fit_lambdas(datasets, fit_options(cfg));

  json j;
  j["constants"] = {
      {"lambda_a1_hz_per_strain", rep.constants.lambda_a1},
      {"lambda_a1p_hz_per_strain", rep.constants.lambda_a1p},
      {"lambda_e_hz_per_strain", rep.constants.lambda_e},
      {"lambda_ep_hz_per_strain", rep.constants.lambda_ep},
  };
  j["fractional_uncertainty"] = {
      {"lambda_a1", rep.frac_lambda_a1},
      {"lambda_a1p", rep.frac_lambda_a1p},
      {"lambda_e", rep.frac_lambda_e},
      {"lambda_ep", rep.frac_lambda_ep},
  };
  j["calibration_fraction"] = rep.calibration_fraction;
  j["lambda_ep_identifiable"] = rep.lambda_ep_identifiable;
  j["residual_norm"] = {{"common_mode", rep.residual_common},
                        {"e_constants", rep.residual_e}};
  j["converged"] = rep.converged;
  json sites = json::array();
  for (size_t i = 0; i < rep.site_ids.size(); ++i) {
    sites.push_back({{"site_id", rep.site_ids[i]},
                     {"df_a1_hz", rep.per_site[i].df_a1_hz},
                     {"df_e1_hz", rep.per_site[i].df_e1_hz},
                     {"df_e2_hz", rep.per_site[i].df_e2_hz}});
  }
  j["per_site"] = sites;
  write_json(out, j);
  std::cout << "lambda_a1 " << rep.constants.lambda_a1 << " lambda_a1p "
            << rep.constants.lambda_a1p << " lambda_e " << rep.constants.lambda_e
            << " lambda_ep " << rep.constants.lambda_ep << "\n";
  return 0;
}

int cmd_fit_polarization(const RunConfig& cfg, const std::string& out) {
  if (cfg.fit.scan_csv.empty()) {
    throw ConfigError(
        "'fit_polarization.scan_csv' is required for fit polarization");
  }
  const auto scan = read_polarization_csv(cfg.fit.scan_csv);
  const PolarizationFit fit = fit_polarization(scan, cfg.fit.scan_group,
                                               cfg.laser.p_in_w,
                                               fit_options(cfg));
  json j;
  j["theta_deg"] = rad_to_deg(fit.theta_rad);
  j["psi_deg"] = rad_to_deg(fit.psi_rad);
  j["p_sat_w"] = fit.p_sat_w;
  j["scale_kcps"] = fit.scale_kcps;
  j["residual_norm"] = fit.residual_norm;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  json cov = json::array();
  for (int r = 0; r < 4; ++r) {
    json row = json::array();
    for (int c = 0; c < 4; ++c) row.push_back(fit.covariance(r, c));
    cov.push_back(row);
  }
  j["covariance"] = cov;
  write_json(out, j);
  std::cout << "theta " << rad_to_deg(fit.theta_rad) << " deg, psi "
            << rad_to_deg(fit.psi_rad) << " deg, p_sat " << fit.p_sat_w
            << " W\n";
  return 0;
}

int cmd_match_frequency(const RunConfig& cfg, const std::string& out) {
  if (!cfg.match_target_f_hz) {
    throw ConfigError("'match_frequency' section is required");
  }
  const NvSite& site = cfg.active_site();
  const double target = *cfg.match_target_f_hz;
  const double x_max = cfg.mode.x_max_m;
  if (!(x_max > 0.0)) {
    throw ConfigError(
        "'device.mode.x_max_m' must be positive to bound the search");
  }
  auto freq_at = [&](double x) {
    const TransitionFrequencies f = site.frequencies_at(x, cfg.constants, cfg.nu);
    return (cfg.match_transition_plus ? f.f_plus_hz : f.f_minus_hz) - target;
  };
  const int n_scan = 4001;
  double best_lo = 0.0, best_hi = 0.0;
  bool found = false;
  double prev_x = -x_max, prev_v = freq_at(prev_x);
  for (int i = 1; i < n_scan; ++i) {
    const double x = -x_max + 2.0 * x_max * i / (n_scan - 1);
    const double v = freq_at(x);
    if (prev_v == 0.0 || v == 0.0 || (prev_v < 0.0) != (v < 0.0)) {
      // prefer the bracket closest to zero deflection
      if (!found || std::min(std::abs(prev_x), std::abs(x)) <
                        std::min(std::abs(best_lo), std::abs(best_hi))) {
        best_lo = prev_x;
        best_hi = x;
        found = true;
      }
    }
    prev_x = x;
    prev_v = v;
  }
  if (!found) {
    throw FitError("target frequency is outside the reachable tuning range");
  }
  double lo = best_lo, hi = best_hi;
  double flo = freq_at(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = freq_at(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((flo < 0.0) != (fm < 0.0)) {
      hi = mid;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  const double x = 0.5 * (lo + hi);
  const TransitionFrequencies f = site.frequencies_at(x, cfg.constants, cfg.nu);
  json j;
  j["target_f_hz"] = target;
  j["transition"] = cfg.match_transition_plus ? "plus" : "minus";
  j["deflection_m"] = x;
  j["strain"] = site.strain_at(x);
  j["f_plus_hz"] = f.f_plus_hz;
  j["f_minus_hz"] = f.f_minus_hz;
  write_json(out, j);
  std::cout << "deflection " << x << " m reaches "
            << (cfg.match_transition_plus ? f.f_plus_hz : f.f_minus_hz)
            << " Hz\n";
  return 0;
}

int cmd_match_polarization(const RunConfig& cfg, const std::string& out) {
  if (!cfg.match_target_theta_rad) {
    throw ConfigError("'match_polarization' section is required");
  }
  const NvSite& site = cfg.active_site();
  const PolarizationMatch m = match_polarization(*cfg.match_target_theta_rad,
                                                 site, cfg.constants, cfg.nu);
  json j;
  j["target_theta_deg"] = rad_to_deg(*cfg.match_target_theta_rad);
  j["e1_shift_hz"] = m.e1_shift_hz;
  j["e2_shift_hz"] = m.e2_shift_hz;
  j["strain"] = m.strain;
  j["tip_deflection_m"] = m.tip_deflection_m;
  j["antinode_sign"] = m.antinode_sign;
  write_json(out, j);
  std::cout << "deflection " << m.tip_deflection_m << " m (antinode sign "
            << m.antinode_sign << ")\n";
  return 0;
}

int cmd_metrics_report(const RunConfig& cfg, const std::string& out) {
  DeviceProposal p;
  if (cfg.metrics) {
    p = *cfg.metrics;
  } else {
    p.constants = cfg.constants;
    p.nu = cfg.nu;
  }
  const MetricsReport r = device_report(p);
  json j;
  j["coupling"] = {
      {"coeff_literal_hz_per_strain", r.coupling.coeff_literal_hz_per_strain},
      {"coeff_quoted_hz_per_strain", r.coupling.coeff_quoted_hz_per_strain},
      {"g_literal_hz", r.coupling.g_literal_hz},
      {"g_quoted_hz", r.coupling.g_quoted_hz},
  };
  j["thermal_occupation"] = r.thermal_occupation;
  j["thermalization_rate_hz"] = r.thermalization_rate_hz;
  j["cooperativity"] = {{"literal", r.cooperativity_literal},
                        {"quoted", r.cooperativity_quoted}};
  j["cooling_rate_hz"] = {{"literal", r.cooling_literal.rate_hz},
                          {"quoted", r.cooling_quoted.rate_hz}};
  j["resolved_sideband"] = r.cooling_literal.resolved_sideband;
  j["steady_state_occupation"] = {{"literal", r.steady_state_literal},
                                  {"quoted", r.steady_state_quoted}};
  write_json(out, j);
  std::cout << "eta (quoted g) " << r.cooperativity_quoted
            << ", cooling rate " << r.cooling_quoted.rate_hz << " Hz\n";
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"strain-coupled NV orbital spectroscopy toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::function<int(const RunConfig&, const std::string&)> action;

  auto add_leaf = [&](CLI::App* parent, const char* name, const char* desc,
                      int (*fn)(const RunConfig&, const std::string&)) {
    CLI::App* leaf = parent->add_subcommand(name, desc);
    leaf->add_option("--config", config_path, "JSON run configuration")
        ->required();
    leaf->add_option("--out", out_path, "output file path")->required();
    leaf->callback([&action, fn]() { action = fn; });
    return leaf;
  };

  CLI::App* sim = app.add_subcommand("simulate", "synthesize spectra and maps");
  sim->require_subcommand(1);
  add_leaf(sim, "cw", "continuous-wave resonant-excitation spectrum",
           cmd_simulate_cw);
  add_leaf(sim, "strobe", "stroboscopic spectrum over the configured window",
           cmd_simulate_strobe);
  add_leaf(sim, "map-detuning", "spectra versus mechanical drive detuning",
           cmd_simulate_map_detuning);
  add_leaf(sim, "map-amplitude", "spectra versus resonant drive amplitude",
           cmd_simulate_map_amplitude);
  add_leaf(sim, "polarization", "PL versus laser polarization angle",
           cmd_simulate_polarization);

  CLI::App* fit = app.add_subcommand("fit", "parameter extraction");
  fit->require_subcommand(1);
  add_leaf(fit, "lambdas", "joint coupling-constant fit from dataset CSV",
           cmd_fit_lambdas);
  add_leaf(fit, "polarization", "mixing angle and saturation from a scan CSV",
           cmd_fit_polarization);

  CLI::App* match = app.add_subcommand("match", "inverse problems");
  match->require_subcommand(1);
  add_leaf(match, "frequency", "deflection that reaches a target frequency",
           cmd_match_frequency);
  add_leaf(match, "polarization", "deflection that reaches a target angle",
           cmd_match_polarization);

  CLI::App* metrics = app.add_subcommand("metrics", "device figures of merit");
  metrics->require_subcommand(1);
  add_leaf(metrics, "report", "coupling, cooperativity, cooling report",
           cmd_metrics_report);

  CLI::App* synth = app.add_subcommand("synthesize", "synthetic datasets");
  synth->require_subcommand(1);
  add_leaf(synth, "dataset", "per-site strain-scan dataset CSV",
           cmd_synthesize_dataset);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  try {
    const RunConfig cfg = load_config(config_path);
    return action(cfg, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const FitError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return 3;
  } catch (const DesignError& e) {
    std::cerr << "design error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const UnreachableAngleError& e) {
    std::cerr << "unreachable angle: " << e.what() << "\n";
    return 3;
  } catch (const DegenerateStrainError& e) {
    std::cerr << "degenerate strain: " << e.what() << "\n";
    return 3;
  } catch (const StrainRangeError& e) {
    std::cerr << "strain out of range: " << e.what() << "\n";
    return 3;
  } catch (const FrameError& e) {
    std::cerr << "frame error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 70;
  }
}

}  // namespace nvstrain::cli
