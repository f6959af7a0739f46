#include "nvstrain/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nvstrain/levmar.hpp"

namespace nvstrain {

namespace {

struct Candidate {
  int index;
  double prominence;
  double half_width_hz;
};

// Classic prominence: drop to the highest saddle separating the peak from
// any higher terrain; the spectrum edges count as terrain ends.
std::vector<Candidate> pick_peaks(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  std::vector<Candidate> found;
  for (int i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1]) || !(y[i] >= y[i + 1])) continue;
    if (y[i] == y[i + 1]) {
      int j = i + 1;
      while (j + 1 < n && y[j] == y[j + 1]) ++j;
      if (j + 1 < n && y[j] < y[j + 1]) continue;  // plateau then rise
    }
    double left_base = y[i], right_base = y[i];
    for (int j = i - 1; j >= 0; --j) {
      if (y[j] > y[i]) break;
      left_base = std::min(left_base, y[j]);
    }
    for (int j = i + 1; j < n; ++j) {
      if (y[j] > y[i]) break;
      right_base = std::min(right_base, y[j]);
    }
    const double prom = y[i] - std::max(left_base, right_base);
    if (!(prom > 0.0)) continue;

    const double half = y[i] - 0.5 * prom;
    double lo = x.front(), hi = x.back();
    for (int j = i - 1; j >= 0; --j) {
      if (y[j] <= half) {
        lo = x[j];
        break;
      }
    }
    for (int j = i + 1; j < n; ++j) {
      if (y[j] <= half) {
        hi = x[j];
        break;
      }
    }
    double hw = 0.5 * (hi - lo);
    if (!(hw > 0.0)) hw = (x.back() - x.front()) / static_cast<double>(n);
    found.push_back({i, prom, hw});
  }
  std::sort(found.begin(), found.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.prominence != b.prominence) return a.prominence > b.prominence;
    return a.index < b.index;
  });
  return found;
}

}  // namespace

PeakFit fit_lorentzian_peaks(const std::vector<double>& detunings_hz,
                             const std::vector<double>& signal_kcps,
                             int n_peaks) {
  if (n_peaks != 1 && n_peaks != 2) {
    throw ConfigError("n_peaks must be 1 or 2");
  }
  const int n = static_cast<int>(detunings_hz.size());
  if (signal_kcps.size() != detunings_hz.size()) {
    throw ConfigError("detuning and signal lengths differ");
  }
  if (n < 8 * n_peaks) {
    throw ConfigError("need at least 8 samples per fitted peak");
  }
  for (int i = 1; i < n; ++i) {
    if (!(detunings_hz[i] > detunings_hz[i - 1])) {
      throw ConfigError("detuning grid must be strictly increasing");
    }
  }

  std::vector<Candidate> cands = pick_peaks(detunings_hz, signal_kcps);
  if (static_cast<int>(cands.size()) < n_peaks) {
    throw FitError("found " + std::to_string(cands.size()) +
                   " prominent peaks, need " + std::to_string(n_peaks));
  }
  cands.resize(n_peaks);

  const double baseline = *std::min_element(signal_kcps.begin(), signal_kcps.end());

  // Width seed from the summit curvature: matching a w^2/(w^2 + d^2) to the
  // local parabola gives hwhm = sqrt(2a/|y''|). The half-prominence width is
  // saddle-limited for overlapping peaks, so it serves only as a fallback.
  auto seed_half_width = [&](const Candidate& cand, double amp) {
    const int i = cand.index;
    const double hl = detunings_hz[i] - detunings_hz[i - 1];
    const double hr = detunings_hz[i + 1] - detunings_hz[i];
    const double curv = 2.0 *
                        (signal_kcps[i - 1] * hr - signal_kcps[i] * (hl + hr) +
                         signal_kcps[i + 1] * hl) /
                        (hl * hr * (hl + hr));
    if (std::isfinite(curv) && curv < 0.0 && amp > 0.0) {
      const double w = std::sqrt(-2.0 * amp / curv);
      if (std::isfinite(w) && w > 0.0) {
        return std::min(w, detunings_hz.back() - detunings_hz.front());
      }
    }
    return cand.half_width_hz;
  };

  // params: [bg, (center, fwhm, amplitude) x n_peaks]
  Eigen::VectorXd p0(1 + 3 * n_peaks);
  p0[0] = baseline;
  for (int k = 0; k < n_peaks; ++k) {
    const double amp = signal_kcps[cands[k].index] - baseline;
    p0[1 + 3 * k] = detunings_hz[cands[k].index];
    p0[2 + 3 * k] = 2.0 * seed_half_width(cands[k], amp);
    p0[3 + 3 * k] = amp;
  }

  auto residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                      Eigen::MatrixXd* jac) {
    for (int i = 0; i < n; ++i) {
      double model = p[0];
      if (jac) (*jac)(i, 0) = 1.0;
      for (int k = 0; k < n_peaks; ++k) {
        const double c = p[1 + 3 * k];
        const double w = 0.5 * p[2 + 3 * k];
        const double a = p[3 + 3 * k];
        const double d = detunings_hz[i] - c;
        const double den = d * d + w * w;
        const double shape = den > 0.0 ? w * w / den : 1.0;
        model += a * shape;
        if (jac) {
          const double den2 = den * den;
          (*jac)(i, 1 + 3 * k) = den2 > 0.0 ? a * w * w * 2.0 * d / den2 : 0.0;
          (*jac)(i, 2 + 3 * k) = den2 > 0.0 ? a * w * d * d / den2 : 0.0;
          (*jac)(i, 3 + 3 * k) = shape;
        }
      }
      r[i] = model - signal_kcps[i];
    }
  };

  LevMarResult res = levmar_fit(residual, p0, n, LevMarOptions{});
  if (!res.converged) {
    throw FitError("peak fit did not converge", std::sqrt(2.0 * res.cost));
  }

  const int n_params = 1 + 3 * n_peaks;
  const double dof = std::max(1, n - n_params);
  const double s2 = 2.0 * res.cost / dof;
  const Eigen::MatrixXd cov = covariance_from_jtj(res.jtj) * s2;

  PeakFit out;
  out.background = res.params[0];
  out.sigma_background = std::sqrt(std::max(0.0, cov(0, 0)));
  out.converged = res.converged;
  out.cost = res.cost;
  out.iterations = res.iterations;
  for (int k = 0; k < n_peaks; ++k) {
    LorentzianPeak pk;
    pk.center_hz = res.params[1 + 3 * k];
    pk.fwhm_hz = std::abs(res.params[2 + 3 * k]);
    pk.amplitude = res.params[3 + 3 * k];
    pk.sigma_center_hz = std::sqrt(std::max(0.0, cov(1 + 3 * k, 1 + 3 * k)));
    pk.sigma_fwhm_hz = std::sqrt(std::max(0.0, cov(2 + 3 * k, 2 + 3 * k)));
    pk.sigma_amplitude = std::sqrt(std::max(0.0, cov(3 + 3 * k, 3 + 3 * k)));
    out.peaks.push_back(pk);
  }
  std::sort(out.peaks.begin(), out.peaks.end(),
            [](const LorentzianPeak& a, const LorentzianPeak& b) {
              return a.center_hz < b.center_hz;
            });
  if (n_peaks == 2) {
    const double gap = out.peaks[1].center_hz - out.peaks[0].center_hz;
    const double fw = std::max(out.peaks[0].fwhm_hz, out.peaks[1].fwhm_hz);
    out.degenerate = gap < 0.25 * fw;
  }
  return out;
}

}  // namespace nvstrain
