#include "nvstrain/config.hpp"

#include <fstream>
#include <json.hpp>

#include "nvstrain/errors.hpp"

namespace nvstrain {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& section,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      std::string msg =
          "unknown key '" + it.key() + "' in " + section + "; allowed:";
      for (const char* k : allowed) msg += std::string(" ") + k;
      throw ConfigError(msg);
    }
  }
}

const json& section(const json& j, const char* key) {
  const json& s = j.at(key);
  if (!s.is_object()) {
    throw ConfigError(std::string("'") + key + "' must be an object");
  }
  return s;
}

double num(const json& j, const std::string& section_name, const char* key,
           double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) {
    throw ConfigError(std::string("'") + key + "' in " + section_name +
                      " must be a number");
  }
  return v.get<double>();
}

int integer(const json& j, const std::string& section_name, const char* key,
            int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) {
    throw ConfigError(std::string("'") + key + "' in " + section_name +
                      " must be an integer");
  }
  return v.get<int>();
}

std::string text(const json& j, const std::string& section_name,
                 const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) {
    throw ConfigError(std::string("'") + key + "' in " + section_name +
                      " must be a string");
  }
  return v.get<std::string>();
}

GridSpec grid_spec(const json& j, const std::string& section_name,
                   const char* min_key, const char* max_key) {
  check_keys(j, section_name, {min_key, max_key, "points"});
  GridSpec g;
  g.min = num(j, section_name, min_key, 0.0);
  g.max = num(j, section_name, max_key, 0.0);
  g.points = integer(j, section_name, "points", 0);
  if (g.points < 2) {
    throw ConfigError("'points' in " + section_name + " must be >= 2");
  }
  if (!(g.max > g.min)) {
    throw ConfigError(section_name + " range must have max > min");
  }
  return g;
}

NvAxis parse_axis(const json& v, const std::string& section_name) {
  if (!v.is_array() || v.size() != 3) {
    throw ConfigError("'axis' in " + section_name +
                      " must be a 3-element array of +-1");
  }
  int a[3];
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number_integer()) {
      throw ConfigError("'axis' in " + section_name +
                        " must contain integers");
    }
    a[i] = v[i].get<int>();
    if (a[i] != 1 && a[i] != -1) {
      throw ConfigError("'axis' components in " + section_name +
                        " must be +1 or -1");
    }
  }
  if (a[0] == -1 && a[1] == -1 && a[2] == -1) return NvAxis::m1m1m1;
  if (a[0] == 1 && a[1] == 1 && a[2] == -1) return NvAxis::p1p1m1;
  if (a[0] == -1 && a[1] == 1 && a[2] == 1) return NvAxis::m1p1p1;
  if (a[0] == 1 && a[1] == -1 && a[2] == 1) return NvAxis::p1m1p1;
  throw ConfigError("'axis' in " + section_name +
                    " must be one of [-1,-1,-1],[1,1,-1],[-1,1,1],[1,-1,1]");
}

}  // namespace

std::vector<double> GridSpec::linspace() const {
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) {
    out[i] = min + (max - min) * i / (points - 1);
  }
  return out;
}

const NvSite& RunConfig::active_site() const {
  if (sites.empty()) throw ConfigError("config has no sites");
  if (active_site_id.empty()) return sites.front();
  for (const auto& s : sites) {
    if (s.site_id == active_site_id) return s;
  }
  throw ConfigError("active_site_id '" + active_site_id +
                    "' matches no configured site");
}

DriveState RunConfig::drive_state() const {
  DriveState d;
  d.mode = mode;
  d.f_piezo_hz = f_piezo_hz;
  d.x_c_m = x_c_m;
  d.validate();
  return d;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path);
  json root;
  try {
    root = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  check_keys(root, "config root",
             {"device", "constants", "sites", "active_site_id", "laser",
              "drive", "strobe", "seed", "noise", "synthesize", "fit",
              "fit_polarization", "match_frequency", "match_polarization",
              "metrics"});

  RunConfig cfg;

  if (root.contains("device")) {
    const json& dev = section(root, "device");
    check_keys(dev, "device",
               {"geometry", "mode", "temperature_k", "nu", "depth_sigma_m",
                "amplitude_calibration_fraction"});
    if (dev.contains("geometry")) {
      const json& g = section(dev, "geometry");
      check_keys(g, "device.geometry",
                 {"length_m", "width_m", "thickness_m", "nv_depth_m",
                  "nv_axial_z_m"});
      cfg.geometry.length_m =
          num(g, "device.geometry", "length_m", cfg.geometry.length_m);
      cfg.geometry.width_m =
          num(g, "device.geometry", "width_m", cfg.geometry.width_m);
      cfg.geometry.thickness_m =
          num(g, "device.geometry", "thickness_m", cfg.geometry.thickness_m);
      cfg.geometry.nv_depth_m =
          num(g, "device.geometry", "nv_depth_m", cfg.geometry.nv_depth_m);
      cfg.geometry.nv_axial_z_m = num(g, "device.geometry", "nv_axial_z_m",
                                      cfg.geometry.nv_axial_z_m);
      cfg.geometry.validate();
    }
    if (dev.contains("mode")) {
      const json& m = section(dev, "mode");
      check_keys(m, "device.mode", {"f_c_hz", "quality_q", "x_max_m"});
      cfg.mode.f_c_hz = num(m, "device.mode", "f_c_hz", cfg.mode.f_c_hz);
      cfg.mode.quality_q =
          num(m, "device.mode", "quality_q", cfg.mode.quality_q);
      cfg.mode.x_max_m = num(m, "device.mode", "x_max_m", cfg.mode.x_max_m);
      cfg.mode.validate();
    }
    cfg.temperature_k = num(dev, "device", "temperature_k", cfg.temperature_k);
    cfg.nu = num(dev, "device", "nu", cfg.nu);
    if (!(cfg.nu > -1.0 && cfg.nu < 0.5)) {
      throw ConfigError("'nu' in device must lie in (-1, 0.5)");
    }
    cfg.depth_sigma_m = num(dev, "device", "depth_sigma_m", cfg.depth_sigma_m);
    cfg.calibration_fraction = num(dev, "device",
                                   "amplitude_calibration_fraction",
                                   cfg.calibration_fraction);
  }

  if (root.contains("constants")) {
    const json& c = section(root, "constants");
    check_keys(c, "constants",
               {"lambda_a1_hz_per_strain", "lambda_a1p_hz_per_strain",
                "lambda_e_hz_per_strain", "lambda_ep_hz_per_strain"});
    cfg.constants.lambda_a1 = num(c, "constants", "lambda_a1_hz_per_strain",
                                  cfg.constants.lambda_a1);
    cfg.constants.lambda_a1p = num(c, "constants", "lambda_a1p_hz_per_strain",
                                   cfg.constants.lambda_a1p);
    cfg.constants.lambda_e = num(c, "constants", "lambda_e_hz_per_strain",
                                 cfg.constants.lambda_e);
    cfg.constants.lambda_ep = num(c, "constants", "lambda_ep_hz_per_strain",
                                  cfg.constants.lambda_ep);
  }

  if (root.contains("sites")) {
    const json& arr = root.at("sites");
    if (!arr.is_array()) throw ConfigError("'sites' must be an array");
    for (size_t i = 0; i < arr.size(); ++i) {
      const std::string name = "sites[" + std::to_string(i) + "]";
      const json& s = arr[i];
      if (!s.is_object()) throw ConfigError(name + " must be an object");
      check_keys(s, name,
                 {"site_id", "axis", "df_a1_hz", "df_e1_hz", "df_e2_hz",
                  "f_zpl_hz", "linewidth_gamma_hz", "pl_scale_kcps",
                  "nv_depth_m", "nv_axial_z_m"});
      NvSite site;
      site.site_id = text(s, name, "site_id", "NV" + std::to_string(i + 1));
      if (!s.contains("axis")) {
        throw ConfigError("'axis' is required in " + name);
      }
      site.orientation.axis = parse_axis(s.at("axis"), name);
      site.intrinsic.df_a1_hz = num(s, name, "df_a1_hz", 0.0);
      site.intrinsic.df_e1_hz = num(s, name, "df_e1_hz", 0.0);
      site.intrinsic.df_e2_hz = num(s, name, "df_e2_hz", 0.0);
      site.f_zpl_hz = num(s, name, "f_zpl_hz", site.f_zpl_hz);
      site.linewidth_gamma_hz =
          num(s, name, "linewidth_gamma_hz", site.linewidth_gamma_hz);
      site.pl_scale_kcps = num(s, name, "pl_scale_kcps", site.pl_scale_kcps);
      site.geometry = cfg.geometry;
      site.geometry.nv_depth_m =
          num(s, name, "nv_depth_m", cfg.geometry.nv_depth_m);
      site.geometry.nv_axial_z_m =
          num(s, name, "nv_axial_z_m", cfg.geometry.nv_axial_z_m);
      site.validate();
      cfg.sites.push_back(site);
    }
  }
  cfg.active_site_id = text(root, "config root", "active_site_id", "");
  if (!cfg.active_site_id.empty()) cfg.active_site();

  if (root.contains("laser")) {
    const json& l = section(root, "laser");
    check_keys(l, "laser", {"phi_deg", "psi_deg", "p_in_w", "p_sat_w", "grid"});
    cfg.laser.phi_rad = deg_to_rad(num(l, "laser", "phi_deg", 0.0));
    cfg.laser.psi_rad = deg_to_rad(num(l, "laser", "psi_deg", 54.0));
    cfg.laser.p_in_w = num(l, "laser", "p_in_w", cfg.laser.p_in_w);
    cfg.laser.p_sat_w = num(l, "laser", "p_sat_w", cfg.laser.p_sat_w);
    cfg.laser.validate();
    if (l.contains("grid")) {
      cfg.laser_grid = grid_spec(section(l, "grid"), "laser.grid", "min_hz",
                                 "max_hz");
    }
  }

  if (root.contains("drive")) {
    const json& d = section(root, "drive");
    check_keys(d, "drive",
               {"x_c_m", "f_piezo_hz", "piezo_sweep", "amplitude_sweep"});
    cfg.x_c_m = num(d, "drive", "x_c_m", cfg.x_c_m);
    cfg.f_piezo_hz = num(d, "drive", "f_piezo_hz", cfg.mode.f_c_hz);
    if (d.contains("piezo_sweep")) {
      cfg.piezo_sweep = grid_spec(section(d, "piezo_sweep"),
                                  "drive.piezo_sweep", "min_hz", "max_hz");
    }
    if (d.contains("amplitude_sweep")) {
      cfg.amplitude_sweep =
          grid_spec(section(d, "amplitude_sweep"), "drive.amplitude_sweep",
                    "min_m", "max_m");
    }
  } else {
    cfg.f_piezo_hz = cfg.mode.f_c_hz;
  }

  if (root.contains("strobe")) {
    const json& s = section(root, "strobe");
    check_keys(s, "strobe",
               {"antinode", "start_t_s", "tau_s", "phase_uncertainty_deg"});
    const double period = 1.0 / cfg.f_piezo_hz;
    const double tau = num(s, "strobe", "tau_s", 60e-9);
    StrobeWindow w;
    const std::string anti = text(s, "strobe", "antinode", "");
    if (!anti.empty() && s.contains("start_t_s")) {
      throw ConfigError(
          "'antinode' and 'start_t_s' in strobe are mutually exclusive");
    }
    if (anti == "down") {
      w = StrobeWindow::down_antinode(period, tau);
    } else if (anti == "up") {
      w = StrobeWindow::up_antinode(period, tau);
    } else if (anti.empty()) {
      w.start_t_s = num(s, "strobe", "start_t_s", 0.0);
      w.tau_s = tau;
    } else {
      throw ConfigError("'antinode' in strobe must be 'down' or 'up'");
    }
    w.phase_uncertainty_rad =
        deg_to_rad(num(s, "strobe", "phase_uncertainty_deg", 5.0));
    w.validate(period);
    cfg.strobe = w;
  }

  if (root.contains("seed")) {
    const json& v = root.at("seed");
    if (!v.is_number_integer()) {
      throw ConfigError("'seed' must be an integer");
    }
    cfg.seed = v.get<std::uint64_t>();
  }
  if (root.contains("noise")) {
    const json& v = root.at("noise");
    if (!v.is_boolean()) throw ConfigError("'noise' must be a boolean");
    cfg.noise = v.get<bool>();
  }

  if (root.contains("synthesize")) {
    const json& s = section(root, "synthesize");
    check_keys(s, "synthesize",
               {"deflections_m", "sigma_f_floor_hz", "n_phi", "sigma_kcps",
                "scale_kcps"});
    if (s.contains("deflections_m")) {
      const json& arr = s.at("deflections_m");
      if (!arr.is_array()) {
        throw ConfigError("'deflections_m' in synthesize must be an array");
      }
      for (const auto& v : arr) {
        if (!v.is_number()) {
          throw ConfigError("'deflections_m' entries must be numbers");
        }
        cfg.synth.deflections_m.push_back(v.get<double>());
      }
    }
    cfg.synth.sigma_f_floor_hz =
        num(s, "synthesize", "sigma_f_floor_hz", cfg.synth.sigma_f_floor_hz);
    cfg.synth.n_phi = integer(s, "synthesize", "n_phi", cfg.synth.n_phi);
    cfg.synth.sigma_kcps =
        num(s, "synthesize", "sigma_kcps", cfg.synth.sigma_kcps);
    cfg.synth.scale_kcps =
        num(s, "synthesize", "scale_kcps", cfg.synth.scale_kcps);
  }
  cfg.synth.depth_sigma_m = cfg.depth_sigma_m;

  if (root.contains("fit")) {
    const json& s = section(root, "fit");
    check_keys(s, "fit", {"max_iterations", "step_tol", "datasets_csv"});
    cfg.fit.max_iterations =
        integer(s, "fit", "max_iterations", cfg.fit.max_iterations);
    cfg.fit.step_tol = num(s, "fit", "step_tol", cfg.fit.step_tol);
    cfg.fit.datasets_csv = text(s, "fit", "datasets_csv", "");
  }

  if (root.contains("fit_polarization")) {
    const json& s = section(root, "fit_polarization");
    check_keys(s, "fit_polarization", {"scan_csv", "group"});
    cfg.fit.scan_csv = text(s, "fit_polarization", "scan_csv", "");
    const std::string g = text(s, "fit_polarization", "group", "A");
    if (g == "A") {
      cfg.fit.scan_group = NvGroup::A;
    } else if (g == "B") {
      cfg.fit.scan_group = NvGroup::B;
    } else {
      throw ConfigError("'group' in fit_polarization must be 'A' or 'B'");
    }
  }

  if (root.contains("match_frequency")) {
    const json& s = section(root, "match_frequency");
    check_keys(s, "match_frequency", {"target_f_hz", "transition"});
    if (!s.contains("target_f_hz")) {
      throw ConfigError("'target_f_hz' is required in match_frequency");
    }
    cfg.match_target_f_hz = num(s, "match_frequency", "target_f_hz", 0.0);
    const std::string t = text(s, "match_frequency", "transition", "plus");
    if (t == "plus") {
      cfg.match_transition_plus = true;
    } else if (t == "minus") {
      cfg.match_transition_plus = false;
    } else {
      throw ConfigError(
          "'transition' in match_frequency must be 'plus' or 'minus'");
    }
  }

  if (root.contains("match_polarization")) {
    const json& s = section(root, "match_polarization");
    check_keys(s, "match_polarization", {"target_theta_deg"});
    if (!s.contains("target_theta_deg")) {
      throw ConfigError("'target_theta_deg' is required in match_polarization");
    }
    cfg.match_target_theta_rad =
        deg_to_rad(num(s, "match_polarization", "target_theta_deg", 0.0));
  }

  if (root.contains("metrics")) {
    const json& s = section(root, "metrics");
    check_keys(s, "metrics",
               {"f_c_hz", "quality_q", "temperature_k", "eps_zero_point",
                "gamma2_hz", "rabi_omega_hz", "linewidth_gamma_hz"});
    DeviceProposal p;
    p.f_c_hz = num(s, "metrics", "f_c_hz", p.f_c_hz);
    p.quality_q = num(s, "metrics", "quality_q", p.quality_q);
    p.temperature_k = num(s, "metrics", "temperature_k", p.temperature_k);
    p.eps_zero_point = num(s, "metrics", "eps_zero_point", p.eps_zero_point);
    p.gamma2_hz = num(s, "metrics", "gamma2_hz", p.gamma2_hz);
    p.rabi_omega_hz = num(s, "metrics", "rabi_omega_hz", p.rabi_omega_hz);
    p.linewidth_gamma_hz =
        num(s, "metrics", "linewidth_gamma_hz", p.linewidth_gamma_hz);
    p.constants = cfg.constants;
    p.nu = cfg.nu;
    p.validate();
    cfg.metrics = p;
  }

  return cfg;
}

}  // namespace nvstrain
