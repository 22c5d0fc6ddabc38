#pragma once

#include <algorithm>
#include <cmath>

#include "skt/crn.hpp"

namespace skt::detail {

struct LmOptions {
  int max_iter = 300;
  double tol = 1e-14;    // on max |r|
  double bound = 60.0;   // |x_i| beyond this counts as divergence
};

struct LmResult {
  Vector x;
  double max_abs_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Levenberg-Marquardt with Nielsen's damping update for zero-residual
/// least-squares problems. `fn(x, r, J)` fills the residual r and its
/// Jacobian J (J may be rank deficient; the damping handles null directions).
template <typename Fn>
LmResult levenberg_marquardt(Fn&& fn, Vector x, const LmOptions& opt = {}) {
  Vector r;
  Matrix J;
  fn(x, r, J);
  LmResult out;
  const Eigen::Index n = x.size();

  Matrix JtJ = J.transpose() * J;
  double mu = 1e-3 * std::max(1e-12, JtJ.diagonal().size() ? JtJ.diagonal().maxCoeff() : 1.0);
  double nu = 2.0;
  double cost = 0.5 * r.squaredNorm();

  Vector r_trial;
  Matrix J_trial;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    if (r.size() == 0 || r.cwiseAbs().maxCoeff() <= opt.tol) break;
    if (x.cwiseAbs().maxCoeff() > opt.bound) break;
    const Vector g = J.transpose() * r;
    if (g.cwiseAbs().maxCoeff() <= 1e-300) break;

    const Matrix H = JtJ + mu * Matrix::Identity(n, n);
    const Vector step = H.ldlt().solve(-g);
    if (!step.allFinite()) break;
    if (step.norm() <= 1e-15 * (x.norm() + 1e-15)) break;

    const Vector x_trial = x + step;
    fn(x_trial, r_trial, J_trial);
    const double cost_trial = r_trial.allFinite() ? 0.5 * r_trial.squaredNorm() : INFINITY;
    const double predicted = 0.5 * step.dot(mu * step - g);
    const double rho = predicted > 0 ? (cost - cost_trial) / predicted : -1.0;
    if (rho > 0) {
      x = x_trial;
      r.swap(r_trial);
      J.swap(J_trial);
      JtJ = J.transpose() * J;
      cost = cost_trial;
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
      nu = 2.0;
    } else {
      mu *= nu;
      nu *= 2.0;
      if (!std::isfinite(mu)) break;
    }
  }

  out.x = std::move(x);
  out.iterations = it;
  out.max_abs_residual = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
  out.converged = out.max_abs_residual <= opt.tol && out.x.cwiseAbs().maxCoeff() <= opt.bound;
  return out;
}

}  // namespace skt::detail
