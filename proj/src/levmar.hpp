#pragma once

#include <cmath>
#include <functional>

#include <Eigen/Dense>

namespace nanopair::detail {

struct LevMarResult {
  Eigen::VectorXd params;
  double cost = 0.0;  // ½ Σ r²
  int iterations = 0;
  bool converged = false;
};

// Residual callback fills r (size m) for parameters p.
using ResidualFn = std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r)>;

// Levenberg-Marquardt with forward-difference Jacobian and multiplicative damping.
inline LevMarResult levenberg_marquardt(const ResidualFn& residual, Eigen::VectorXd params,
                                        int m, int max_iter = 500, double rel_tol = 1e-12) {
  const int n = static_cast<int>(params.size());
  Eigen::VectorXd r(m), r_trial(m), r_step(m);
  Eigen::MatrixXd jac(m, n);
  residual(params, r);
  double cost = 0.5 * r.squaredNorm();
  double lambda = 1e-3;
  LevMarResult out;

  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    for (int j = 0; j < n; ++j) {
      const double h = 1e-7 * std::max(std::abs(params[j]), 1e-6);
      Eigen::VectorXd shifted = params;
      shifted[j] += h;
      residual(shifted, r_step);
      jac.col(j) = (r_step - r) / h;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    if (jtr.cwiseAbs().maxCoeff() <= 1e-30) {
      out.converged = true;
      break;
    }

    bool improved = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
      const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
      const Eigen::VectorXd trial = params + step;
      residual(trial, r_trial);
      const double trial_cost = 0.5 * r_trial.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        const double decrease = cost - trial_cost;
        params = trial;
        r = r_trial;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        const bool small_step = step.norm() <= rel_tol * (params.norm() + rel_tol);
        const bool flat = decrease <= rel_tol * (cost + 1e-300);
        cost = trial_cost;
        if (small_step || flat) out.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) {
      out.converged = true;  // no descent direction left at this precision
      break;
    }
    if (out.converged) break;
  }
  out.params = params;
  out.cost = cost;
  return out;
}

}  // namespace nanopair::detail
