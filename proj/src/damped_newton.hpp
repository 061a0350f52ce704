#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "twistring/errors.hpp"
#include "twistring/newton_solver.hpp"

namespace twistring::detail {

/// Backtracking Newton iteration on a square system. `residual(x)` returns
/// F(x); `jacobian(x)` returns DF(x). `x` is updated in place.
template <class Residual, class Jacobian>
SolveReport damped_newton(Eigen::VectorXd& x, Residual&& residual, Jacobian&& jacobian,
                          const NewtonOptions& opts) {
  SolveReport report;
  Eigen::VectorXd r = residual(x);
  double norm = r.norm();
  report.residual_history.push_back(norm);

  while (std::isfinite(norm) && norm > opts.tol_residual && report.iterations < opts.max_iter) {
    const Eigen::MatrixXd jac = jacobian(x);
    const Eigen::VectorXd dx = jac.partialPivLu().solve(-r);
    ++report.iterations;
    if (!dx.allFinite()) {
      throw SingularJacobian(report.iterations, "Newton linear solve produced a non-finite step");
    }
    double t = 1.0;
    bool accepted = false;
    while (t >= opts.min_step) {
      Eigen::VectorXd trial = x + t * dx;
      Eigen::VectorXd r_trial = residual(trial);
      const double trial_norm = r_trial.norm();
      if (std::isfinite(trial_norm) && trial_norm < norm) {
        x = std::move(trial);
        r = std::move(r_trial);
        norm = trial_norm;
        accepted = true;
        break;
      }
      t *= opts.damping;
    }
    if (!accepted) break;
    report.residual_history.push_back(norm);
  }
  report.final_residual_norm = norm;
  report.converged = std::isfinite(norm) && norm <= opts.tol_residual;
  return report;
}

}  // namespace twistring::detail
