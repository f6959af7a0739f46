#include "nvstrain/levmar.hpp"

#include <cmath>
#include <limits>

#include "nvstrain/errors.hpp"

namespace nvstrain {

LevMarResult levmar_fit(const ResidualFn& fn, Eigen::VectorXd p0,
                        int residual_size, const LevMarOptions& opts) {
  const int n = static_cast<int>(p0.size());
  Eigen::VectorXd r(residual_size);
  Eigen::MatrixXd jac(residual_size, n);

  fn(p0, r, &jac);
  if (!r.allFinite() || !jac.allFinite()) {
    throw FitError("non-finite residual or Jacobian at the initial point");
  }

  LevMarResult out;
  out.params = p0;
  out.cost = 0.5 * r.squaredNorm();
  out.cost_history.push_back(out.cost);
  out.jtj = jac.transpose() * jac;

  double lambda = opts.lambda0;
  Eigen::VectorXd g = jac.transpose() * r;

  int performed = 0;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    ++performed;
    // Marquardt scaling keeps the damping meaningful when parameters
    // differ by many orders of magnitude.
    Eigen::VectorXd diag = out.jtj.diagonal();
    for (int i = 0; i < n; ++i) {
      if (diag[i] <= 0.0) diag[i] = 1.0;
    }

    bool accepted = false;
    while (lambda <= opts.lambda_max) {
      Eigen::MatrixXd a = out.jtj;
      a.diagonal() += lambda * diag;
      Eigen::VectorXd step = a.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= opts.lambda_up;
        continue;
      }
      Eigen::VectorXd trial = out.params + step;
      Eigen::VectorXd r_trial(residual_size);
      fn(trial, r_trial, nullptr);
      const double cost_trial =
          r_trial.allFinite() ? 0.5 * r_trial.squaredNorm()
                              : std::numeric_limits<double>::infinity();
      if (cost_trial < out.cost) {
        const double step_size = step.norm();
        const double scale = out.params.norm() + opts.step_tol;
        out.params = trial;
        out.cost = cost_trial;
        out.cost_history.push_back(cost_trial);
        fn(out.params, r, &jac);
        if (!jac.allFinite()) {
          throw FitError("non-finite Jacobian during fit", std::sqrt(2.0 * out.cost));
        }
        out.jtj = jac.transpose() * jac;
        g = jac.transpose() * r;
        lambda = std::max(lambda / opts.lambda_down, 1e-15);
        accepted = true;
        if (step_size <= opts.step_tol * scale) {
          out.converged = true;
          out.message = "step below tolerance";
        }
        break;
      }
      lambda *= opts.lambda_up;
    }

    if (!accepted) {
      // No downhill direction at any damping: stationary point.
      out.converged = true;
      out.message = "no decreasing step (gradient ~ 0)";
      break;
    }
    if (out.converged) break;
  }

  out.iterations = performed;
  if (!out.converged) {
    out.message = "iteration cap reached";
  }
  return out;
}

Eigen::MatrixXd covariance_from_jtj(const Eigen::MatrixXd& jtj) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jtj);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cutoff = ev.cwiseAbs().maxCoeff() * 1e-14;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff) inv[i] = 1.0 / ev[i];
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace nvstrain
