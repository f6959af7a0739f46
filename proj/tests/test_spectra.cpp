#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "nvstrain/peaks.hpp"
#include "nvstrain/spectra.hpp"

using namespace nvstrain;
using nvtest::linspace;
using nvtest::trapz;

namespace {

NvSite probe_site() {
  NvSite s = nvtest::make_site(NvAxis::m1p1p1, 0.0, 3e9, 1e9, "probe");
  s.pl_scale_kcps = 100.0;
  return s;
}

DriveState resonant_drive(double x_c) {
  DriveState d;
  d.mode = {870e3, 20000.0, std::max(x_c, 1e-12)};
  d.f_piezo_hz = 870e3;
  d.x_c_m = x_c;
  return d;
}

double lorentz(double f, double center, double gamma) {
  const double hg = 0.5 * gamma;
  return hg * hg / (hg * hg + (f - center) * (f - center));
}

std::vector<double> local_maxima(const std::vector<double>& x,
                                 const std::vector<double>& y,
                                 double threshold) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] >= threshold) {
      out.push_back(x[i]);
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("spectra") {

TEST_CASE("undriven spectrum is the two-Lorentzian comb") {
  NvSite site = probe_site();
  DriveState d = resonant_drive(0.0);
  LaserPolarization pol;
  std::vector<double> grid = linspace(-20e9, 20e9, 161);
  Spectrum spec = cw_spectrum(site, d, pol, grid);

  const double theta = stuckelberg_angle(site.intrinsic, SymmetryShifts{});
  DipolePattern ip = saturated_intensity(NvGroup::B, theta, pol);
  TransitionFrequencies f =
      transition_frequencies(site.f_zpl_hz, site.intrinsic, SymmetryShifts{});
  const double g = site.linewidth_gamma_hz;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double fl = site.f_zpl_hz + grid[i];
    const double want =
        site.pl_scale_kcps * (ip.i_ex * lorentz(fl, f.f_plus_hz, g) +
                              ip.i_ey * lorentz(fl, f.f_minus_hz, g));
    CHECK(spec.signal_kcps[i] == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(spec.meta.f_reference_hz == site.f_zpl_hz);
  CHECK_FALSE(spec.meta.strobed);
}

TEST_CASE("full-period strobe window reproduces the cw spectrum bitwise") {
  NvSite site = probe_site();
  DriveState d = resonant_drive(1e-9);
  LaserPolarization pol;
  std::vector<double> grid = linspace(-25e9, 10e9, 141);
  Spectrum cw = cw_spectrum(site, d, pol, grid);
  StrobeWindow w;
  w.start_t_s = 0.0;
  w.tau_s = d.period_s();
  Spectrum strobed = strobe_spectrum(site, d, pol, w, grid);
  REQUIRE(strobed.signal_kcps.size() == cw.signal_kcps.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(strobed.signal_kcps[i] == cw.signal_kcps[i]);
  }
  CHECK(strobed.meta.strobed);
}

TEST_CASE("antinode strobes put peaks at the turning-point frequencies") {
  NvSite site = probe_site();
  DriveState d = resonant_drive(1e-9);
  LaserPolarization pol;
  std::vector<double> grid = linspace(-25e9, 15e9, 801);
  const double p = d.period_s();
  CouplingConstants k;

  Spectrum down = strobe_spectrum(site, d, pol,
                                  StrobeWindow::down_antinode(p, p / 200.0),
                                  grid);
  Spectrum up = strobe_spectrum(site, d, pol,
                                StrobeWindow::up_antinode(p, p / 200.0), grid);

  TransitionFrequencies f_dn =
      site.frequencies_at(-d.x_c_m, k, kDefaultPoissonRatio);
  TransitionFrequencies f_up =
      site.frequencies_at(d.x_c_m, k, kDefaultPoissonRatio);
  const double bound = site.linewidth_gamma_hz / 100.0;

  PeakFit fit_dn = fit_lorentzian_peaks(down.detunings_hz, down.signal_kcps, 2);
  REQUIRE(fit_dn.peaks.size() == 2);
  CHECK(std::abs(fit_dn.peaks[0].center_hz -
                 (f_dn.f_minus_hz - site.f_zpl_hz)) < bound);
  CHECK(std::abs(fit_dn.peaks[1].center_hz -
                 (f_dn.f_plus_hz - site.f_zpl_hz)) < bound);

  PeakFit fit_up = fit_lorentzian_peaks(up.detunings_hz, up.signal_kcps, 2);
  REQUIRE(fit_up.peaks.size() == 2);
  CHECK(std::abs(fit_up.peaks[0].center_hz -
                 (f_up.f_minus_hz - site.f_zpl_hz)) < bound);
  CHECK(std::abs(fit_up.peaks[1].center_hz -
                 (f_up.f_plus_hz - site.f_zpl_hz)) < bound);

  // Opposite antinodes shift the lines in opposite directions.
  CHECK(fit_dn.peaks[1].center_hz < 0.0);
  CHECK(fit_up.peaks[1].center_hz > 0.0);
}

TEST_CASE("cw horns stay inside the strobed antinode bracket") {
  NvSite site = probe_site();
  DriveState d = resonant_drive(1e-9);
  LaserPolarization pol;
  std::vector<double> grid = linspace(-25e9, 15e9, 801);
  const double p = d.period_s();

  Spectrum cw = cw_spectrum(site, d, pol, grid);
  Spectrum down = strobe_spectrum(site, d, pol,
                                  StrobeWindow::down_antinode(p, p / 200.0),
                                  grid);
  Spectrum up = strobe_spectrum(site, d, pol,
                                StrobeWindow::up_antinode(p, p / 200.0), grid);
  PeakFit fd = fit_lorentzian_peaks(down.detunings_hz, down.signal_kcps, 2);
  PeakFit fu = fit_lorentzian_peaks(up.detunings_hz, up.signal_kcps, 2);

  double lo = 1e300, hi = -1e300;
  for (const auto& pk : {fd.peaks[0], fd.peaks[1], fu.peaks[0], fu.peaks[1]}) {
    lo = std::min(lo, pk.center_hz);
    hi = std::max(hi, pk.center_hz);
  }
  const double slack = site.linewidth_gamma_hz / 50.0;
  const double top = *std::max_element(cw.signal_kcps.begin(),
                                       cw.signal_kcps.end());
  for (double pos : local_maxima(cw.detunings_hz, cw.signal_kcps, 0.02 * top)) {
    CHECK(pos > lo - slack);
    CHECK(pos < hi + slack);
  }
}

TEST_CASE("drive moves spectral weight without creating or destroying it") {
  NvSite site = nvtest::make_site(NvAxis::m1p1p1, 0.0, 5e9, 0.0, "cons");
  site.pl_scale_kcps = 40.0;
  LaserPolarization pol;
  pol.phi_rad = deg_to_rad(20.0);
  std::vector<double> grid = linspace(-200e9, 200e9, 4001);
  SpectraOptions opts;
  opts.rel_tol = 1e-8;
  opts.modulate_intensity = false;

  Spectrum still = cw_spectrum(site, resonant_drive(0.0), pol, grid,
                               CouplingConstants{}, kDefaultPoissonRatio, opts);
  Spectrum driven = cw_spectrum(site, resonant_drive(0.25e-9), pol, grid,
                                CouplingConstants{}, kDefaultPoissonRatio,
                                opts);
  const double w0 = trapz(grid, still.signal_kcps);
  const double w1 = trapz(grid, driven.signal_kcps);
  CHECK(w1 == doctest::Approx(w0).epsilon(1e-6));
}

TEST_CASE("halving the quadrature tolerance leaves the signal stable") {
  NvSite site = probe_site();
  DriveState d = resonant_drive(1e-9);
  LaserPolarization pol;
  std::vector<double> grid = linspace(-25e9, 10e9, 141);
  SpectraOptions loose;
  loose.rel_tol = 1e-6;
  SpectraOptions tight;
  tight.rel_tol = 1e-9;
  Spectrum a = cw_spectrum(site, d, pol, grid, CouplingConstants{},
                           kDefaultPoissonRatio, loose);
  Spectrum b = cw_spectrum(site, d, pol, grid, CouplingConstants{},
                           kDefaultPoissonRatio, tight);
  double top = *std::max_element(b.signal_kcps.begin(), b.signal_kcps.end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(a.signal_kcps[i] - b.signal_kcps[i]) <=
          1e-5 * std::max(std::abs(b.signal_kcps[i]), 1e-6 * top));
  }
}

TEST_CASE("cw average agrees with Monte Carlo phase sampling") {
  NvSite site = probe_site();
  DriveState d = resonant_drive(1e-9);
  LaserPolarization pol;
  std::vector<double> grid = linspace(-20e9, 12e9, 33);
  Spectrum cw = cw_spectrum(site, d, pol, grid);

  CouplingConstants k;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, d.period_s());
  const int n_draws = 200000;
  std::vector<double> mc(grid.size(), 0.0);
  const double g = site.linewidth_gamma_hz;
  for (int t = 0; t < n_draws; ++t) {
    const double x = displacement(d, u(rng));
    const SymmetryShifts s = site.shifts_at(x, k, kDefaultPoissonRatio);
    TransitionFrequencies f =
        transition_frequencies(site.f_zpl_hz, site.intrinsic, s);
    const double theta = stuckelberg_angle(site.intrinsic, s);
    DipolePattern ip = saturated_intensity(NvGroup::B, theta, pol);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double fl = site.f_zpl_hz + grid[i];
      mc[i] += site.pl_scale_kcps * (ip.i_ex * lorentz(fl, f.f_plus_hz, g) +
                                     ip.i_ey * lorentz(fl, f.f_minus_hz, g));
    }
  }
  const double top = *std::max_element(cw.signal_kcps.begin(),
                                       cw.signal_kcps.end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(mc[i] / n_draws - cw.signal_kcps[i]) < 0.01 * top);
  }
}

TEST_CASE("signals are nonnegative and runs are deterministic") {
  NvSite site = probe_site();
  DriveState d = resonant_drive(1e-9);
  LaserPolarization pol;
  std::vector<double> grid = linspace(-25e9, 10e9, 301);
  Spectrum a = cw_spectrum(site, d, pol, grid);
  Spectrum b = cw_spectrum(site, d, pol, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(a.signal_kcps[i] >= 0.0);
    CHECK(a.signal_kcps[i] == b.signal_kcps[i]);
  }
}

TEST_CASE("drive-detuning map envelope has the mechanical linewidth") {
  NvSite site = probe_site();
  MechanicalMode mode{870e3, 20000.0, 1e-9};
  LaserPolarization pol;
  const double gamma = mode.f_c_hz / mode.quality_q;
  std::vector<double> piezo = {mode.f_c_hz - 20.0 * gamma,
                               mode.f_c_hz - gamma / 2.0, mode.f_c_hz};
  std::vector<double> laser = linspace(-25e9, 15e9, 1601);
  SpectrumMap map = drive_detuning_map(site, mode, pol, piezo, laser);
  REQUIRE(map.rows.size() == piezo.size());

  // Rightmost quarter-max crossing of each row, linearly interpolated.
  auto right_edge = [&](const std::vector<double>& row) {
    const double cut = 0.25 * *std::max_element(row.begin(), row.end());
    for (std::size_t i = row.size() - 1; i > 0; --i) {
      if (row[i - 1] >= cut && row[i] < cut) {
        const double frac = (row[i - 1] - cut) / (row[i - 1] - row[i]);
        return laser[i - 1] + frac * (laser[i] - laser[i - 1]);
      }
    }
    return laser.back();
  };
  const double e_far = right_edge(map.rows[0]);
  const double e_half = right_edge(map.rows[1]);
  const double e_res = right_edge(map.rows[2]);
  CHECK(e_res > e_far + 1e9);  // resonant drive broadens the envelope
  CHECK((e_half - e_far) / (e_res - e_far) == doctest::Approx(0.5).epsilon(0.15));
}

TEST_CASE("amplitude map support widens monotonically") {
  NvSite site = probe_site();
  MechanicalMode mode{870e3, 20000.0, 1e-9};
  LaserPolarization pol;
  std::vector<double> amps = {0.1e-9, 0.5e-9, 1e-9};
  std::vector<double> laser = linspace(-25e9, 15e9, 801);
  SpectrumMap map = amplitude_map(site, mode, pol, amps, laser);
  REQUIRE(map.rows.size() == 3);
  CHECK(map.axis_kind == MapAxis::AmplitudeM);

  auto support = [&](const std::vector<double>& row) {
    const double cut = 0.1 * *std::max_element(row.begin(), row.end());
    double lo = laser.back(), hi = laser.front();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] >= cut) {
        lo = std::min(lo, laser[i]);
        hi = std::max(hi, laser[i]);
      }
    }
    return hi - lo;
  };
  CHECK(support(map.rows[0]) < support(map.rows[1]));
  CHECK(support(map.rows[1]) < support(map.rows[2]));
}

TEST_CASE("strobe window validation") {
  const double p = 1.0 / 870e3;
  StrobeWindow w;
  w.tau_s = 2.0 * p;
  CHECK_THROWS_AS(w.validate(p), ConfigError);
  StrobeWindow w2;
  w2.tau_s = 0.0;
  CHECK_THROWS_AS(w2.validate(p), ConfigError);
  StrobeWindow w3;
  w3.start_t_s = 1.5 * p;
  w3.tau_s = 60e-9;
  CHECK_THROWS_AS(w3.validate(p), ConfigError);
  CHECK_NOTHROW(StrobeWindow::down_antinode(p).validate(p));
  CHECK_NOTHROW(StrobeWindow::up_antinode(p, p / 200.0).validate(p));
}

TEST_CASE("grid validation and quadrature failure") {
  NvSite site = probe_site();
  DriveState d = resonant_drive(1e-9);
  LaserPolarization pol;
  CHECK_THROWS_AS(cw_spectrum(site, d, pol, {}), ConfigError);
  CHECK_THROWS_AS(cw_spectrum(site, d, pol, {1e9, 1e9}), ConfigError);
  CHECK_THROWS_AS(cw_spectrum(site, d, pol, {2e9, 1e9}), ConfigError);

  SpectraOptions starved;
  starved.rel_tol = 1e-13;
  starved.max_samples = 1024;
  std::vector<double> grid = nvtest::linspace(-25e9, 10e9, 31);
  CHECK_THROWS_AS(cw_spectrum(site, d, pol, grid, CouplingConstants{},
                              kDefaultPoissonRatio, starved),
                  NumericError);
}

}  // TEST_SUITE
