#include "nvstrain/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace nvstrain {

StrobeWindow StrobeWindow::down_antinode(double period_s, double tau_s) {
  StrobeWindow w;
  w.start_t_s = 0.5 * period_s - 0.5 * tau_s;
  w.tau_s = tau_s;
  return w;
}

StrobeWindow StrobeWindow::up_antinode(double period_s, double tau_s) {
  StrobeWindow w;
  w.start_t_s = period_s - 0.5 * tau_s;
  w.tau_s = tau_s;
  return w;
}

void StrobeWindow::validate(double period_s) const {
  if (!(tau_s > 0.0) || tau_s > period_s * (1.0 + 1e-12)) {
    throw ConfigError("strobe tau_s must lie in (0, period]");
  }
  if (start_t_s < 0.0 || start_t_s >= period_s) {
    throw ConfigError("strobe start_t_s must lie in [0, period)");
  }
}

int spectra_thread_count() {
  if (const char* env = std::getenv("NVSTRAIN_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace {

// Per-time-sample state of the two transitions.
struct SamplePoint {
  double f_plus;
  double f_minus;
  double i_plus;
  double i_minus;
};

struct Integrand {
  const NvSite& site;
  const DriveState& drive;
  const LaserPolarization& pol;
  double strain_per_x;
  double frozen_theta;  // used when modulation is disabled
  bool modulate;
  const CouplingConstants& k;
  double nu;

  SamplePoint at(double t_s) const {
    const double x = displacement(drive, t_s);
    const SymmetryShifts s =
        x == 0.0 ? SymmetryShifts{}
                 : site.shifts_at(x, k, nu);
    const TransitionFrequencies f =
        transition_frequencies(site.f_zpl_hz, site.intrinsic, s);
    double theta = frozen_theta;
    if (modulate) {
      try {
        theta = stuckelberg_angle(site.intrinsic, s);
      } catch (const DegenerateStrainError&) {
        theta = 0.0;  // measure-zero crossing, both intensities equal there
      }
    }
    const DipolePattern d =
        saturated_intensity(site.orientation.group(), theta, pol);
    return {f.f_plus_hz, f.f_minus_hz, site.pl_scale_kcps * d.i_ex,
            site.pl_scale_kcps * d.i_ey};
  }
};

double lorentzian(double f, double center, double half_gamma) {
  const double d = f - center;
  return half_gamma * half_gamma / (half_gamma * half_gamma + d * d);
}

// Accumulate the trapezoid sum of the two-transition Lorentzian comb over
// the given samples for every grid point, in parallel over the grid.
void accumulate(const std::vector<SamplePoint>& samples,
                const std::vector<double>& weights,
                const std::vector<double>& grid, double half_gamma,
                double f_ref, std::vector<double>& out) {
  const int nf = static_cast<int>(grid.size());
  const int threads =
      std::min(spectra_thread_count(), std::max(1, nf / 16) );
  auto work = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      const double f = f_ref + grid[i];
      double acc = 0.0;
      for (size_t s = 0; s < samples.size(); ++s) {
        const SamplePoint& sp = samples[s];
        acc += weights[s] * (sp.i_plus * lorentzian(f, sp.f_plus, half_gamma) +
                             sp.i_minus * lorentzian(f, sp.f_minus, half_gamma));
      }
      out[i] = acc;
    }
  };
  if (threads <= 1) {
    work(0, nf);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (nf + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(nf, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(work, lo, hi);
  }
  for (auto& th : pool) th.join();
}

// Trapezoid over [t0, t0+tau] with step-halving until every grid value is
// stable to rel_tol. Returns the averaged signal (divided by tau).
std::vector<double> integrate_window(const Integrand& g, double t0, double tau,
                                     const std::vector<double>& grid,
                                     double half_gamma, double f_ref,
                                     const SpectraOptions& opts,
                                     int start_samples) {
  const int nf = static_cast<int>(grid.size());
  int n = start_samples;
  const double h0 = tau / n;

  std::vector<SamplePoint> samples(n + 1);
  for (int i = 0; i <= n; ++i) samples[i] = g.at(t0 + h0 * i);
  std::vector<double> weights(n + 1, h0);
  weights.front() = 0.5 * h0;
  weights.back() = 0.5 * h0;

  std::vector<double> sum(nf, 0.0);
  accumulate(samples, weights, grid, half_gamma, f_ref, sum);

  while (true) {
    // refine: midpoints of the current intervals
    const double h = tau / n;
    std::vector<SamplePoint> mids(n);
    for (int i = 0; i < n; ++i) mids[i] = g.at(t0 + h * (i + 0.5));
    std::vector<double> mid_weights(n, 0.5 * h);
    std::vector<double> mid_sum(nf, 0.0);
    accumulate(mids, mid_weights, grid, half_gamma, f_ref, mid_sum);

    std::vector<double> refined(nf);
    double scale = 0.0;
    for (int i = 0; i < nf; ++i) {
      refined[i] = 0.5 * sum[i] + mid_sum[i];
      scale = std::max(scale, std::abs(refined[i]));
    }
    n *= 2;

    double worst = 0.0;
    for (int i = 0; i < nf; ++i) {
      const double diff = std::abs(refined[i] - sum[i]);
      const double denom = std::max(std::abs(refined[i]), 1e-9 * scale);
      if (denom > 0.0) worst = std::max(worst, diff / denom);
    }
    sum.swap(refined);
    if (worst <= opts.rel_tol) break;
    if (n >= opts.max_samples) {
      throw NumericError(
          "time quadrature did not reach " + std::to_string(opts.rel_tol) +
          " relative agreement at " + std::to_string(n) + " samples");
    }
  }

  for (double& v : sum) v /= tau;
  return sum;
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("laser grid is empty");
  for (size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw ConfigError("laser grid must be strictly increasing");
    }
  }
}

Spectrum spectrum_over_window(const NvSite& site, const DriveState& drive,
                              const LaserPolarization& pol, double t0,
                              double tau, const std::vector<double>& grid,
                              const CouplingConstants& k, double nu,
                              const SpectraOptions& opts, int start_samples,
                              bool strobed) {
  site.validate();
  drive.validate();
  pol.validate();
  check_grid(grid);

  Integrand g{site, drive, pol, mode_strain(site.geometry, 1.0), 0.0,
              opts.modulate_intensity, k, nu};
  if (!opts.modulate_intensity) {
    try {
      g.frozen_theta = stuckelberg_angle(site.intrinsic, SymmetryShifts{});
    } catch (const DegenerateStrainError&) {
      g.frozen_theta = 0.0;
    }
  }

  Spectrum spec;
  spec.detunings_hz = grid;
  spec.signal_kcps =
      integrate_window(g, t0, tau, grid, 0.5 * site.linewidth_gamma_hz,
                       site.f_zpl_hz, opts, start_samples);
  spec.meta.site_id = site.site_id;
  spec.meta.f_reference_hz = site.f_zpl_hz;
  spec.meta.x_c_m = drive.x_c_m;
  spec.meta.f_piezo_hz = drive.f_piezo_hz;
  spec.meta.strobed = strobed;
  spec.meta.strobe_start_s = strobed ? t0 : 0.0;
  spec.meta.strobe_tau_s = strobed ? tau : 0.0;
  return spec;
}

}  // namespace

Spectrum cw_spectrum(const NvSite& site, const DriveState& drive,
                     const LaserPolarization& pol,
                     const std::vector<double>& grid_hz,
                     const CouplingConstants& k, double nu,
                     const SpectraOptions& opts) {
  return spectrum_over_window(site, drive, pol, 0.0, drive.period_s(), grid_hz,
                              k, nu, opts, 512, false);
}

Spectrum strobe_spectrum(const NvSite& site, const DriveState& drive,
                         const LaserPolarization& pol,
                         const StrobeWindow& window,
                         const std::vector<double>& grid_hz,
                         const CouplingConstants& k, double nu,
                         const SpectraOptions& opts) {
  const double period = drive.period_s();
  window.validate(period);
  const double frac = window.tau_s / period;
  int start = 512;
  if (frac < 1.0) {
    start = std::max(64, static_cast<int>(std::lround(512.0 * frac)));
  }
  return spectrum_over_window(site, drive, pol, window.start_t_s, window.tau_s,
                              grid_hz, k, nu, opts, start, true);
}

SpectrumMap drive_detuning_map(const NvSite& site, const MechanicalMode& mode,
                               const LaserPolarization& pol,
                               const std::vector<double>& piezo_grid_hz,
                               const std::vector<double>& laser_grid_hz,
                               const CouplingConstants& k, double nu,
                               const SpectraOptions& opts) {
  check_grid(piezo_grid_hz);
  SpectrumMap map;
  map.axis_kind = MapAxis::PiezoHz;
  map.axis = piezo_grid_hz;
  map.detunings_hz = laser_grid_hz;
  for (double f_piezo : piezo_grid_hz) {
    DriveState d{mode, f_piezo, drive_response(mode, f_piezo)};
    map.rows.push_back(
        cw_spectrum(site, d, pol, laser_grid_hz, k, nu, opts).signal_kcps);
  }
  return map;
}

SpectrumMap amplitude_map(const NvSite& site, const MechanicalMode& mode,
                          const LaserPolarization& pol,
                          const std::vector<double>& amplitude_grid_m,
                          const std::vector<double>& laser_grid_hz,
                          const CouplingConstants& k, double nu,
                          const SpectraOptions& opts) {
  if (amplitude_grid_m.empty()) throw ConfigError("amplitude grid is empty");
  for (size_t i = 1; i < amplitude_grid_m.size(); ++i) {
    if (!(amplitude_grid_m[i] > amplitude_grid_m[i - 1])) {
      throw ConfigError("amplitude grid must be strictly increasing");
    }
  }
  SpectrumMap map;
  map.axis_kind = MapAxis::AmplitudeM;
  map.axis = amplitude_grid_m;
  map.detunings_hz = laser_grid_hz;
  for (double x_c : amplitude_grid_m) {
    MechanicalMode m = mode;
    if (m.x_max_m < x_c) m.x_max_m = x_c;  // resonant drive realizes x_c
    DriveState d{m, m.f_c_hz, x_c};
    map.rows.push_back(
        cw_spectrum(site, d, pol, laser_grid_hz, k, nu, opts).signal_kcps);
  }
  return map;
}

}  // namespace nvstrain
