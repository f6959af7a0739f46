#pragma once

// Damped Gauss-Newton (Levenberg) nonlinear least squares with analytic
// Jacobians. Deterministic: fixed damping schedule, accepted steps strictly
// decrease the cost.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace nvstrain {

// Fills r (size m) and, when J != nullptr, J (m x n) at params p.
using ResidualFn =
    std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r,
                       Eigen::MatrixXd* jac)>;

struct LevMarOptions {
  int max_iterations = 200;
  double step_tol = 1e-12;   // relative step size stopping criterion
  double lambda0 = 1e-3;     // initial damping
  double lambda_up = 10.0;   // rejection multiplier
  double lambda_down = 10.0; // acceptance divisor
  double lambda_max = 1e12;
};

struct LevMarResult {
  Eigen::VectorXd params;
  bool converged = false;
  int iterations = 0;
  double cost = 0.0;  // 0.5 * ||r||^2 at the solution
  std::vector<double> cost_history;  // accepted costs, monotone decreasing
  Eigen::MatrixXd jtj;  // J^T J at the solution
  std::string message;
};

LevMarResult levmar_fit(const ResidualFn& fn, Eigen::VectorXd p0,
                        int residual_size, const LevMarOptions& opts = {});

// (J^T J)^-1 via eigendecomposition, tolerant of rank deficiency.
Eigen::MatrixXd covariance_from_jtj(const Eigen::MatrixXd& jtj);

}  // namespace nvstrain
