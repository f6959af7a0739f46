#include "nvstrain/inference.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "nvstrain/levmar.hpp"

namespace nvstrain {

double common_mode_slope(NvGroup group, double lambda_a1, double lambda_a1p,
                         double nu) {
  if (group == NvGroup::A) {
    return lambda_a1 * (2.0 - nu) / 3.0 + lambda_a1p * (1.0 - 5.0 * nu) / 3.0;
  }
  return -lambda_a1 * nu + lambda_a1p * (1.0 - nu);
}

double e1_slope(NvGroup group, double lambda_e, double lambda_ep, double nu) {
  if (group == NvGroup::A) {
    return -(1.0 + nu) / 3.0 * (lambda_e + 2.0 * std::sqrt(2.0) * lambda_ep);
  }
  return lambda_e * (1.0 + nu);
}

namespace {

int count_distinct_eps(const NvDataset& d) {
  std::set<double> s;
  for (const auto& p : d.points) s.insert(p.eps);
  return static_cast<int>(s.size());
}

struct FlatPoint {
  int site;
  NvGroup group;
  double eps;
  double f_plus;
  double f_minus;
  double sigma_f;
  double sigma_eps;
};

std::vector<FlatPoint> flatten(const std::vector<NvDataset>& sets, int site0) {
  std::vector<FlatPoint> out;
  for (size_t s = 0; s < sets.size(); ++s) {
    for (const auto& p : sets[s].points) {
      out.push_back({site0 + static_cast<int>(s), sets[s].group, p.eps,
                     p.f_plus_hz, p.f_minus_hz, p.sigma_f_hz, p.sigma_eps});
    }
  }
  return out;
}

}  // namespace

CommonModeFit fit_common_mode(const std::vector<NvDataset>& group_a,
                              const std::vector<NvDataset>& group_b,
                              const FitOptions& opts) {
  if (group_a.empty() || group_b.empty()) {
    throw DesignError(
        "common-mode fit needs data from both orientation groups: the two "
        "slope equations are otherwise rank deficient");
  }
  for (const auto* grp : {&group_a, &group_b}) {
    for (const auto& d : *grp) {
      if (count_distinct_eps(d) < 2) {
        throw DesignError("dataset " + d.site_id +
                          " needs >= 2 distinct eps values");
      }
    }
  }

  std::vector<FlatPoint> pts = flatten(group_a, 0);
  {
    auto more = flatten(group_b, static_cast<int>(group_a.size()));
    pts.insert(pts.end(), more.begin(), more.end());
  }
  const int n_sites = static_cast<int>(group_a.size() + group_b.size());
  const int n = static_cast<int>(pts.size());
  const int n_params = n_sites + 2;

  const bool has_sigmas = std::any_of(pts.begin(), pts.end(), [](const FlatPoint& p) {
    return p.sigma_f > 0.0 || p.sigma_eps > 0.0;
  });

  // Two passes: unweighted solve fixes the slope entering the effective
  // variance, then the weighted solve produces the reported fit.
  double la1 = 0.0, la1p = 0.0;
  Eigen::MatrixXd cov_full;
  Eigen::VectorXd beta;
  double rss = 0.0;
  const int passes = has_sigmas ? 2 : 1;
  for (int pass = 0; pass < passes; ++pass) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n_params);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      const FlatPoint& p = pts[i];
      double w = 1.0;
      if (has_sigmas && pass > 0) {
        const double slope = common_mode_slope(p.group, la1, la1p, opts.nu);
        const double var =
            p.sigma_f * p.sigma_f + slope * slope * p.sigma_eps * p.sigma_eps;
        w = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
      }
      const double c1 = common_mode_slope(p.group, 1.0, 0.0, opts.nu);
      const double c2 = common_mode_slope(p.group, 0.0, 1.0, opts.nu);
      x(i, p.site) = w;
      x(i, n_sites) = w * c1 * p.eps;
      x(i, n_sites + 1) = w * c2 * p.eps;
      y[i] = w * 0.5 * (p.f_plus + p.f_minus);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < n_params) {
      throw DesignError(
          "rank-deficient design matrix: strain range or group coverage "
          "cannot separate the common-mode couplings");
    }
    beta = qr.solve(y);
    la1 = beta[n_sites];
    la1p = beta[n_sites + 1];
    rss = (y - x * beta).squaredNorm();
    cov_full = covariance_from_jtj(x.transpose() * x);
    if (!has_sigmas) {
      const int dof = std::max(1, n - n_params);
      cov_full *= rss / dof;
    }
  }

  CommonModeFit out;
  out.lambda_a1 = la1;
  out.lambda_a1p = la1p;
  out.covariance = cov_full.block(n_sites, n_sites, 2, 2);
  out.site_offsets_hz.assign(beta.data(), beta.data() + n_sites);
  out.residual_norm = std::sqrt(rss);
  out.points_used = n;
  return out;
}

namespace {

// Data-driven seed for lambda_e: the squared half-splitting is quadratic in
// eps, h^2 = c^2 eps^2 + 2 c e1 eps + (e1^2 + e2^2), so its curvature gives
// |c| and the linear term (with the e1 seed) gives the sign.
double seed_lambda_e(const std::vector<NvDataset>& datasets, double nu) {
  double acc = 0.0;
  int used = 0;
  for (const auto& d : datasets) {
    if (count_distinct_eps(d) < 3) continue;
    const int m = static_cast<int>(d.points.size());
    Eigen::MatrixXd x(m, 3);
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) {
      const double e = d.points[i].eps;
      const double h = 0.5 * (d.points[i].f_plus_hz - d.points[i].f_minus_hz);
      x(i, 0) = 1.0;
      x(i, 1) = e;
      x(i, 2) = e * e;
      y[i] = h * h;
    }
    Eigen::Vector3d q = x.colPivHouseholderQr().solve(y);
    if (!(q[2] > 0.0)) continue;
    const double c_abs = std::sqrt(q[2]);
    const double e1_seed =
        0.5 * d.delta_f0_obs_hz * std::cos(2.0 * d.theta_obs_rad);
    double c = c_abs;
    if (e1_seed != 0.0 && q[1] != 0.0) {
      c = (q[1] / (2.0 * e1_seed) < 0.0) ? -c_abs : c_abs;
    } else {
      c = -c_abs;  // defaults' sign
    }
    // invert the group slope with lambda_ep treated as 0 at seed time
    const double lam = d.group == NvGroup::B ? c / (1.0 + nu)
                                             : -3.0 * c / (1.0 + nu);
    acc += lam;
    ++used;
  }
  return used > 0 ? acc / used : -0.85e15;
}

}  // namespace

EConstantsFit fit_e_constants(const std::vector<NvDataset>& datasets,
                              double lambda_a1, double lambda_a1p,
                              const FitOptions& opts) {
  if (datasets.empty()) throw DesignError("no datasets supplied");
  for (const auto& d : datasets) {
    if (d.points.empty()) {
      throw DesignError("dataset " + d.site_id + " has no points");
    }
  }
  const bool has_a = std::any_of(datasets.begin(), datasets.end(),
                                 [](const NvDataset& d) { return d.group == NvGroup::A; });
  const bool has_b = std::any_of(datasets.begin(), datasets.end(),
                                 [](const NvDataset& d) { return d.group == NvGroup::B; });
  // Without group A the model has no lambda_ep term; without group B the
  // two constants only appear in one linear combination. Either way
  // lambda_ep is held at zero and flagged.
  const bool fit_ep = has_a && has_b;

  const int n_sites = static_cast<int>(datasets.size());
  const int p_site0 = fit_ep ? 2 : 1;
  const int n_params = p_site0 + 3 * n_sites;

  std::vector<FlatPoint> pts = flatten(datasets, 0);
  const int n_pts = static_cast<int>(pts.size());
  const int n_res = 2 * n_pts;

  const bool has_sigmas = std::any_of(pts.begin(), pts.end(), [](const FlatPoint& p) {
    return p.sigma_f > 0.0 || p.sigma_eps > 0.0;
  });

  // Seeds
  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(n_params);
  p0[0] = seed_lambda_e(datasets, opts.nu);
  if (fit_ep) p0[1] = 0.0;
  for (int s = 0; s < n_sites; ++s) {
    const NvDataset& d = datasets[s];
    const double slope =
        common_mode_slope(d.group, lambda_a1, lambda_a1p, opts.nu);
    double off = 0.0;
    for (const auto& pt : d.points) {
      off += 0.5 * (pt.f_plus_hz + pt.f_minus_hz) - slope * pt.eps;
    }
    off /= static_cast<double>(d.points.size());
    p0[p_site0 + 3 * s] = off;
    p0[p_site0 + 3 * s + 1] =
        0.5 * d.delta_f0_obs_hz * std::cos(2.0 * d.theta_obs_rad);
    p0[p_site0 + 3 * s + 2] =
        0.5 * d.delta_f0_obs_hz * std::sin(2.0 * d.theta_obs_rad);
  }

  // Weights fixed from the seed model (deterministic single evaluation).
  std::vector<double> w_plus(n_pts, 1.0), w_minus(n_pts, 1.0);
  if (has_sigmas) {
    for (int i = 0; i < n_pts; ++i) {
      const FlatPoint& pt = pts[i];
      const double slope =
          common_mode_slope(pt.group, lambda_a1, lambda_a1p, opts.nu);
      const double c = e1_slope(pt.group, p0[0], fit_ep ? p0[1] : 0.0, opts.nu);
      const double e1 = c * pt.eps + p0[p_site0 + 3 * pt.site + 1];
      const double e2 = p0[p_site0 + 3 * pt.site + 2];
      const double r = std::max(std::hypot(e1, e2), 1e-6);
      for (int sgn : {+1, -1}) {
        const double dfdeps = slope + sgn * c * e1 / r;
        const double var = pt.sigma_f * pt.sigma_f +
                           dfdeps * dfdeps * pt.sigma_eps * pt.sigma_eps;
        const double w = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
        (sgn > 0 ? w_plus : w_minus)[i] = w;
      }
    }
  }

  auto residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                      Eigen::MatrixXd* jac) {
    if (jac) jac->setZero();
    const double le = p[0];
    const double lep = fit_ep ? p[1] : 0.0;
    for (int i = 0; i < n_pts; ++i) {
      const FlatPoint& pt = pts[i];
      const int s = pt.site;
      const double off = p[p_site0 + 3 * s];
      const double e1s = p[p_site0 + 3 * s + 1];
      const double e2s = p[p_site0 + 3 * s + 2];
      const double c = e1_slope(pt.group, le, lep, opts.nu);
      const double dc_dle = e1_slope(pt.group, 1.0, 0.0, opts.nu);
      const double dc_dlep = e1_slope(pt.group, 0.0, 1.0, opts.nu);
      const double slope =
          common_mode_slope(pt.group, lambda_a1, lambda_a1p, opts.nu);
      const double u = c * pt.eps + e1s;
      const double v = e2s;
      const double root = std::max(std::hypot(u, v), 1e-6);
      const double common = off + slope * pt.eps;
      const double obs[2] = {pt.f_plus, pt.f_minus};
      const double wgt[2] = {w_plus[i], w_minus[i]};
      for (int half = 0; half < 2; ++half) {
        const double sgn = half == 0 ? 1.0 : -1.0;
        const int row = 2 * i + half;
        r[row] = (common + sgn * root - obs[half]) * wgt[half];
        if (jac) {
          const double du = sgn * u / root * wgt[half];
          (*jac)(row, 0) = du * dc_dle * pt.eps;
          if (fit_ep) (*jac)(row, 1) = du * dc_dlep * pt.eps;
          (*jac)(row, p_site0 + 3 * s) = wgt[half];
          (*jac)(row, p_site0 + 3 * s + 1) = du;
          (*jac)(row, p_site0 + 3 * s + 2) = sgn * v / root * wgt[half];
        }
      }
    }
  };

  LevMarOptions lm;
  lm.max_iterations = opts.max_iterations;
  lm.step_tol = opts.step_tol;
  LevMarResult res = levmar_fit(residual, p0, n_res, lm);
  if (!res.converged) {
    throw FitError("E-constant fit hit the iteration cap",
                   std::sqrt(2.0 * res.cost));
  }

  Eigen::MatrixXd cov = covariance_from_jtj(res.jtj);
  if (!has_sigmas) {
    const int dof = std::max(1, n_res - n_params);
    cov *= 2.0 * res.cost / dof;
  }

  EConstantsFit out;
  out.lambda_e = res.params[0];
  out.lambda_ep = fit_ep ? res.params[1] : 0.0;
  out.lambda_ep_identifiable = fit_ep;
  out.covariance = Eigen::Matrix2d::Zero();
  out.covariance(0, 0) = cov(0, 0);
  if (fit_ep) {
    out.covariance(0, 1) = cov(0, 1);
    out.covariance(1, 0) = cov(1, 0);
    out.covariance(1, 1) = cov(1, 1);
  }
  for (int s = 0; s < n_sites; ++s) {
    out.site_ids.push_back(datasets[s].site_id);
    const double off = res.params[p_site0 + 3 * s];
    IntrinsicStrain intr;
    intr.df_a1_hz = off - opts.f_zpl_hz;
    intr.df_e1_hz = res.params[p_site0 + 3 * s + 1];
    intr.df_e2_hz = res.params[p_site0 + 3 * s + 2];
    out.per_site.push_back(intr);
    out.site_offsets_hz.push_back(off);
  }
  out.residual_norm = std::sqrt(2.0 * res.cost);
  out.converged = res.converged;
  out.iterations = res.iterations;
  out.cost_history = res.cost_history;
  return out;
}

LambdaFitReport fit_lambdas(const std::vector<NvDataset>& datasets,
                            const FitOptions& opts) {
  std::vector<NvDataset> group_a, group_b;
  for (const auto& d : datasets) {
    (d.group == NvGroup::A ? group_a : group_b).push_back(d);
  }
  const CommonModeFit cm = fit_common_mode(group_a, group_b, opts);
  // Keep the original site order for the E-stage so report rows match input.
  const EConstantsFit ef =
      fit_e_constants(datasets, cm.lambda_a1, cm.lambda_a1p, opts);

  LambdaFitReport rep;
  rep.constants.lambda_a1 = cm.lambda_a1;
  rep.constants.lambda_a1p = cm.lambda_a1p;
  rep.constants.lambda_e = ef.lambda_e;
  rep.constants.lambda_ep = ef.lambda_ep;
  rep.calibration_fraction = opts.calibration_fraction;
  auto frac = [&](double sigma2, double value) {
    const double stat =
        value != 0.0 ? std::sqrt(std::max(0.0, sigma2)) / std::abs(value) : 0.0;
    return std::max(stat, opts.calibration_fraction);
  };
  rep.frac_lambda_a1 = frac(cm.covariance(0, 0), cm.lambda_a1);
  rep.frac_lambda_a1p = frac(cm.covariance(1, 1), cm.lambda_a1p);
  rep.frac_lambda_e = frac(ef.covariance(0, 0), ef.lambda_e);
  rep.frac_lambda_ep = frac(ef.covariance(1, 1), ef.lambda_ep);
  rep.lambda_ep_identifiable = ef.lambda_ep_identifiable;
  rep.site_ids = ef.site_ids;
  rep.per_site = ef.per_site;
  rep.residual_common = cm.residual_norm;
  rep.residual_e = ef.residual_norm;
  rep.converged = ef.converged;
  rep.cov_a1 = cm.covariance;
  rep.cov_e = ef.covariance;
  return rep;
}

PolarizationFit fit_polarization(const std::vector<PolarizationScanPoint>& scan,
                                 NvGroup group, double p_in_w,
                                 const FitOptions& opts) {
  if (!(p_in_w > 0.0)) throw ConfigError("p_in_w must be positive");
  std::set<long long> distinct;
  double phi_min = 0.0, phi_max = 0.0;
  bool first = true;
  for (const auto& pt : scan) {
    distinct.insert(std::llround(pt.phi_rad * 1e12));
    if (first || pt.phi_rad < phi_min) phi_min = pt.phi_rad;
    if (first || pt.phi_rad > phi_max) phi_max = pt.phi_rad;
    first = false;
  }
  if (static_cast<int>(distinct.size()) < 8 ||
      phi_max - phi_min < deg_to_rad(150.0) - 1e-9) {
    throw DesignError(
        "polarization scan needs >= 8 distinct angles spanning >= 150 deg");
  }

  double pl_max = 0.0;
  for (const auto& pt : scan) {
    pl_max = std::max({pl_max, pt.pl_ex_kcps, pt.pl_ey_kcps});
  }
  if (!(pl_max > 0.0)) throw FitError("polarization scan is identically zero");

  const int n_pts = static_cast<int>(scan.size());
  const int n_res = 2 * n_pts;

  // params: theta, ln(p_sat), psi, ln(scale)
  auto residual = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r,
                      Eigen::MatrixXd* jac) {
    const double theta = q[0];
    const double p_sat = std::exp(q[1]);
    const double psi = q[2];
    const double scale = std::exp(q[3]);
    const double s = p_in_w / p_sat;
    const double cpsi = std::cos(psi);
    const double spsi = std::sin(psi);
    const double st = std::sin(theta), ct = std::cos(theta);
    for (int i = 0; i < n_pts; ++i) {
      const double phi = scan[i].phi_rad;
      const double sp = std::sin(phi), cp = std::cos(phi);
      // ex channel: a, b and their theta derivatives
      double a[2], b[2], da[2], db[2], obs[2];
      if (group == NvGroup::A) {
        a[0] = st * sp; da[0] = ct * sp;
        b[0] = ct * cp / std::sqrt(3.0); db[0] = -st * cp / std::sqrt(3.0);
        a[1] = -ct * sp; da[1] = st * sp;
        b[1] = st * cp / std::sqrt(3.0); db[1] = ct * cp / std::sqrt(3.0);
      } else {
        a[0] = st * cp; da[0] = ct * cp;
        b[0] = ct * sp / std::sqrt(3.0); db[0] = -st * sp / std::sqrt(3.0);
        a[1] = -ct * cp; da[1] = st * cp;
        b[1] = st * sp / std::sqrt(3.0); db[1] = ct * sp / std::sqrt(3.0);
      }
      obs[0] = scan[i].pl_ex_kcps;
      obs[1] = scan[i].pl_ey_kcps;
      for (int ch = 0; ch < 2; ++ch) {
        const double qd = a[ch] * a[ch] + b[ch] * b[ch] -
                          2.0 * a[ch] * b[ch] * cpsi;
        const double expo = std::exp(-s * qd);
        const double intensity = 1.0 - expo;
        const int row = 2 * i + ch;
        r[row] = scale * intensity - obs[ch];
        if (jac) {
          const double dq_dtheta = 2.0 * a[ch] * da[ch] + 2.0 * b[ch] * db[ch] -
                                   2.0 * cpsi * (da[ch] * b[ch] + a[ch] * db[ch]);
          (*jac)(row, 0) = scale * expo * s * dq_dtheta;
          (*jac)(row, 1) = -scale * expo * s * qd;  // d s/d ln p_sat = -s
          (*jac)(row, 2) = scale * expo * s * 2.0 * a[ch] * b[ch] * spsi;
          (*jac)(row, 3) = scale * intensity;
        }
      }
    }
  };

  LevMarOptions lm;
  lm.max_iterations = opts.max_iterations;
  lm.step_tol = opts.step_tol;

  LevMarResult best;
  bool have_best = false;
  for (double theta0_deg : {-75.0, -45.0, -15.0, 15.0, 45.0, 75.0}) {
    Eigen::VectorXd q0(4);
    q0[0] = deg_to_rad(theta0_deg);
    q0[1] = std::log(p_in_w);
    q0[2] = deg_to_rad(54.0);
    q0[3] = std::log(pl_max / 0.8);
    LevMarResult res = levmar_fit(residual, q0, n_res, lm);
    if (!have_best || res.cost < best.cost) {
      best = res;
      have_best = true;
    }
  }
  if (!best.converged) {
    throw FitError("polarization fit hit the iteration cap",
                   std::sqrt(2.0 * best.cost));
  }

  double theta = best.params[0];
  double psi = best.params[2];
  const double p_sat = std::exp(best.params[1]);
  const double scale = std::exp(best.params[3]);

  Eigen::MatrixXd cov_q = covariance_from_jtj(best.jtj);
  const int dof = std::max(1, n_res - 4);
  cov_q *= 2.0 * best.cost / dof;
  // to (theta, p_sat, psi, scale) space
  Eigen::Vector4d dd(1.0, p_sat, 1.0, scale);
  Eigen::Matrix4d cov = dd.asDiagonal() * cov_q * dd.asDiagonal();

  // Canonical branch: the model depends on psi only through cos(psi) and is
  // invariant under (theta, psi) -> (-theta, pi - psi); report cos(psi) >= 0
  // and theta in (-pi/2, pi/2].
  const double cpsi = std::cos(psi);
  const bool flip = cpsi < 0.0;
  psi = std::acos(std::min(1.0, std::abs(cpsi)));
  if (flip) theta = -theta;
  theta = std::remainder(theta, kPi);
  if (theta <= -0.5 * kPi) theta += kPi;
  if (std::abs(cpsi) < 1e-12 && theta < 0.0) theta = -theta;
  if (flip) {
    Eigen::Vector4d f(-1.0, 1.0, -1.0, 1.0);
    cov = f.asDiagonal() * cov * f.asDiagonal();
  }

  PolarizationFit out;
  out.theta_rad = theta;
  out.p_sat_w = p_sat;
  out.psi_rad = psi;
  out.scale_kcps = scale;
  out.covariance = cov;
  out.residual_norm = std::sqrt(2.0 * best.cost);
  out.converged = best.converged;
  out.iterations = best.iterations;
  return out;
}

PointUncertainty propagate_uncertainties(const NvSite& site,
                                         const CouplingConstants& k, double nu,
                                         double antinode_deflection_m,
                                         double phase_uncertainty_rad,
                                         double depth_sigma_m) {
  site.validate();
  PointUncertainty out;

  double fp_min = 0.0, fp_max = 0.0, fm_min = 0.0, fm_max = 0.0;
  const int n = 41;
  for (int i = 0; i < n; ++i) {
    const double delta =
        phase_uncertainty_rad * (2.0 * i / (n - 1.0) - 1.0);
    const double x = antinode_deflection_m * std::cos(delta);
    const TransitionFrequencies f = site.frequencies_at(x, k, nu);
    if (i == 0) {
      fp_min = fp_max = f.f_plus_hz;
      fm_min = fm_max = f.f_minus_hz;
    } else {
      fp_min = std::min(fp_min, f.f_plus_hz);
      fp_max = std::max(fp_max, f.f_plus_hz);
      fm_min = std::min(fm_min, f.f_minus_hz);
      fm_max = std::max(fm_max, f.f_minus_hz);
    }
  }
  out.sigma_f_hz = std::max(fp_max - fp_min, fm_max - fm_min);

  const double l = site.geometry.length_m;
  const double eps_per_r0 = antinode_deflection_m / (2.0 * l * l) *
                            kModeWavenumber * kModeWavenumber *
                            mode_shape_bracket(site.geometry.nv_axial_z_m / l);
  out.sigma_eps = std::abs(eps_per_r0) * depth_sigma_m;
  return out;
}

}  // namespace nvstrain
