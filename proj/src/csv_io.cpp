#include "nvstrain/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "nvstrain/errors.hpp"

namespace nvstrain {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open " + path + " for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path + " for reading");
  return f;
}

double parse_double(const std::string& tok, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || (end && *end != '\0')) {
    throw ConfigError("bad number '" + tok + "' in " + path);
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream ss(line);
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

// "# key=value key=value" comment payloads
std::map<std::string, std::string> parse_comment(const std::string& line) {
  std::map<std::string, std::string> out;
  std::istringstream ss(line.substr(1));
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) {
      out[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_spectrum_csv(const std::string& path, const Spectrum& spec) {
  auto f = open_out(path);
  f << "# site_id=" << spec.meta.site_id
    << " f_reference_hz=" << format_double(spec.meta.f_reference_hz)
    << " xc_m=" << format_double(spec.meta.x_c_m)
    << " f_piezo_hz=" << format_double(spec.meta.f_piezo_hz)
    << " strobed=" << (spec.meta.strobed ? 1 : 0);
  if (spec.meta.strobed) {
    f << " strobe_start_s=" << format_double(spec.meta.strobe_start_s)
      << " strobe_tau_s=" << format_double(spec.meta.strobe_tau_s);
  }
  f << "\n";
  f << "detuning_hz,signal_kcps\n";
  for (size_t i = 0; i < spec.detunings_hz.size(); ++i) {
    f << format_double(spec.detunings_hz[i]) << ','
      << format_double(spec.signal_kcps[i]) << "\n";
  }
}

Spectrum read_spectrum_csv(const std::string& path) {
  auto f = open_in(path);
  Spectrum spec;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto kv = parse_comment(line);
      if (kv.count("site_id")) spec.meta.site_id = kv["site_id"];
      if (kv.count("f_reference_hz")) {
        spec.meta.f_reference_hz = parse_double(kv["f_reference_hz"], path);
      }
      if (kv.count("xc_m")) spec.meta.x_c_m = parse_double(kv["xc_m"], path);
      if (kv.count("f_piezo_hz")) {
        spec.meta.f_piezo_hz = parse_double(kv["f_piezo_hz"], path);
      }
      if (kv.count("strobed")) spec.meta.strobed = kv["strobed"] == "1";
      if (kv.count("strobe_start_s")) {
        spec.meta.strobe_start_s = parse_double(kv["strobe_start_s"], path);
      }
      if (kv.count("strobe_tau_s")) {
        spec.meta.strobe_tau_s = parse_double(kv["strobe_tau_s"], path);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "detuning_hz,signal_kcps") {
        throw ConfigError("unexpected spectrum header in " + path);
      }
      header_seen = true;
      continue;
    }
    auto toks = split_csv(line);
    if (toks.size() != 2) throw ConfigError("bad spectrum row in " + path);
    spec.detunings_hz.push_back(parse_double(toks[0], path));
    spec.signal_kcps.push_back(parse_double(toks[1], path));
  }
  if (!header_seen) throw ConfigError("missing spectrum header in " + path);
  return spec;
}

void write_map_csv(const std::string& path, const SpectrumMap& map) {
  auto f = open_out(path);
  const char* key = map.axis_kind == MapAxis::PiezoHz ? "piezo_hz" : "xc_m";
  f << "# axis=" << key << "\n";
  f << "detuning_hz,signal_kcps\n";
  for (size_t i = 0; i < map.axis.size(); ++i) {
    f << "# " << key << '=' << format_double(map.axis[i]) << "\n";
    for (size_t j = 0; j < map.detunings_hz.size(); ++j) {
      f << format_double(map.detunings_hz[j]) << ','
        << format_double(map.rows[i][j]) << "\n";
    }
  }
}

SpectrumMap read_map_csv(const std::string& path) {
  auto f = open_in(path);
  SpectrumMap map;
  std::string line;
  bool header_seen = false;
  bool first_block_done = false;
  std::vector<double>* row = nullptr;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto kv = parse_comment(line);
      if (kv.count("axis")) {
        map.axis_kind =
            kv["axis"] == "xc_m" ? MapAxis::AmplitudeM : MapAxis::PiezoHz;
        continue;
      }
      const char* key =
          map.axis_kind == MapAxis::PiezoHz ? "piezo_hz" : "xc_m";
      if (kv.count(key)) {
        if (!map.rows.empty()) first_block_done = true;
        map.axis.push_back(parse_double(kv[key], path));
        map.rows.emplace_back();
        row = &map.rows.back();
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    if (row == nullptr) throw ConfigError("map row before axis line in " + path);
    auto toks = split_csv(line);
    if (toks.size() != 2) throw ConfigError("bad map row in " + path);
    if (!first_block_done) {
      map.detunings_hz.push_back(parse_double(toks[0], path));
    }
    row->push_back(parse_double(toks[1], path));
  }
  for (const auto& r : map.rows) {
    if (r.size() != map.detunings_hz.size()) {
      throw ConfigError("ragged map block in " + path);
    }
  }
  return map;
}

void write_datasets_csv(const std::string& path,
                        const std::vector<NvDataset>& datasets) {
  auto f = open_out(path);
  f << "site_id,group,eps,f_plus_hz,f_minus_hz,sigma_f_hz,sigma_eps\n";
  for (const auto& d : datasets) {
    f << "# site=" << d.site_id
      << " theta_obs_rad=" << format_double(d.theta_obs_rad)
      << " delta_f0_obs_hz=" << format_double(d.delta_f0_obs_hz) << "\n";
    for (const auto& p : d.points) {
      f << d.site_id << ',' << (d.group == NvGroup::A ? 'A' : 'B') << ','
        << format_double(p.eps) << ',' << format_double(p.f_plus_hz) << ','
        << format_double(p.f_minus_hz) << ',' << format_double(p.sigma_f_hz)
        << ',' << format_double(p.sigma_eps) << "\n";
    }
  }
}

std::vector<NvDataset> read_datasets_csv(const std::string& path) {
  auto f = open_in(path);
  std::vector<NvDataset> out;
  std::map<std::string, size_t> index;
  std::map<std::string, std::pair<double, double>> seeds;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto kv = parse_comment(line);
      if (kv.count("site")) {
        double th = 0.0, df = 0.0;
        if (kv.count("theta_obs_rad")) {
          th = parse_double(kv["theta_obs_rad"], path);
        }
        if (kv.count("delta_f0_obs_hz")) {
          df = parse_double(kv["delta_f0_obs_hz"], path);
        }
        seeds[kv["site"]] = {th, df};
      }
      continue;
    }
    if (!header_seen) {
      if (line != "site_id,group,eps,f_plus_hz,f_minus_hz,sigma_f_hz,sigma_eps") {
        throw ConfigError("unexpected dataset header in " + path);
      }
      header_seen = true;
      continue;
    }
    auto toks = split_csv(line);
    if (toks.size() != 7) throw ConfigError("bad dataset row in " + path);
    const std::string& id = toks[0];
    if (!index.count(id)) {
      index[id] = out.size();
      NvDataset d;
      d.site_id = id;
      if (toks[1] == "A") {
        d.group = NvGroup::A;
      } else if (toks[1] == "B") {
        d.group = NvGroup::B;
      } else {
        throw ConfigError("bad group '" + toks[1] + "' in " + path);
      }
      out.push_back(std::move(d));
    }
    NvDataset& d = out[index[id]];
    StrainScanPoint p;
    p.eps = parse_double(toks[2], path);
    p.f_plus_hz = parse_double(toks[3], path);
    p.f_minus_hz = parse_double(toks[4], path);
    p.sigma_f_hz = parse_double(toks[5], path);
    p.sigma_eps = parse_double(toks[6], path);
    d.points.push_back(p);
  }
  if (!header_seen) throw ConfigError("missing dataset header in " + path);
  for (auto& d : out) {
    auto it = seeds.find(d.site_id);
    if (it != seeds.end()) {
      d.theta_obs_rad = it->second.first;
      d.delta_f0_obs_hz = it->second.second;
    }
  }
  return out;
}

void write_polarization_csv(const std::string& path,
                            const std::vector<PolarizationScanPoint>& scan) {
  auto f = open_out(path);
  f << "phi_deg,pl_ex_kcps,pl_ey_kcps\n";
  for (const auto& p : scan) {
    f << format_double(rad_to_deg(p.phi_rad)) << ','
      << format_double(p.pl_ex_kcps) << ',' << format_double(p.pl_ey_kcps)
      << "\n";
  }
}

std::vector<PolarizationScanPoint> read_polarization_csv(
    const std::string& path) {
  auto f = open_in(path);
  std::vector<PolarizationScanPoint> out;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "phi_deg,pl_ex_kcps,pl_ey_kcps") {
        throw ConfigError("unexpected polarization header in " + path);
      }
      header_seen = true;
      continue;
    }
    auto toks = split_csv(line);
    if (toks.size() != 3) throw ConfigError("bad polarization row in " + path);
    PolarizationScanPoint p;
    p.phi_rad = deg_to_rad(parse_double(toks[0], path));
    p.pl_ex_kcps = parse_double(toks[1], path);
    p.pl_ey_kcps = parse_double(toks[2], path);
    out.push_back(p);
  }
  if (!header_seen) throw ConfigError("missing polarization header in " + path);
  return out;
}

}  // namespace nvstrain
