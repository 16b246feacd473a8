#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "milnorlab/errors.hpp"

namespace milnorlab {

/// Residual system r(x); the Jacobian callback may be empty, in which case
/// it is approximated by central differences.
struct ResidualSystem {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residual;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;  // optional
};

struct GaussNewtonOptions {
  int max_iters = 25;
  double residual_tol = 1e-10;
  double step_tol = 1e-15;
  double max_step = 0.0;  // 0 disables the per-iteration step clamp
  double fd_step = 1e-7;  // central-difference step for numeric Jacobians
};

struct GaussNewtonResult {
  Eigen::VectorXd x;
  double residual_norm = std::numeric_limits<double>::infinity();
  int iters = 0;
  bool converged = false;
};

/// Damped Gauss-Newton with SVD least-squares steps.  Underdetermined
/// systems take the minimum-norm step.  Evaluation failures (domain errors,
/// non-finite values) reject the trial step; a failure at the starting point
/// reports non-convergence.
GaussNewtonResult gauss_newton(const ResidualSystem& sys, const Eigen::VectorXd& x0,
                               const GaussNewtonOptions& opts = {});

/// Central-difference Jacobian of a residual function.
Eigen::MatrixXd numeric_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x, double h);

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  int max_steps = 100000;
  double initial_step = 1e-3;
  double max_step = 0.0;  // 0 disables the step-size cap
};

enum class OdeStatus {
  event,        // terminal event located
  finished,     // reached t_end without event
  aborted,      // observer or derivative requested an abort
  step_failure  // step budget or step-size underflow
};

struct OdeResult {
  OdeStatus status = OdeStatus::finished;
  std::string message;
  double t = 0.0;
  Eigen::VectorXd y;
};

/// Dormand-Prince 5(4) with PI step control.  `deriv` may throw; the error
/// aborts the run with its message.  `event`, when supplied, terminates the
/// run at a sign change of its value, refined by step bisection to
/// |event| <= event_tol.  `observer` sees every accepted step and may abort.
OdeResult integrate_dopri5(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& deriv,
    double t0, const Eigen::VectorXd& y0, double t_end, const OdeOptions& opts,
    const std::function<double(double, const Eigen::VectorXd&)>& event = nullptr,
    double event_tol = 1e-12,
    const std::function<bool(double, const Eigen::VectorXd&)>& observer = nullptr);

/// Uniform point in the unit ball of R^n.
Eigen::VectorXd sample_ball(std::mt19937_64& rng, int n);
/// Uniform point on the unit sphere of R^n.
Eigen::VectorXd sample_sphere(std::mt19937_64& rng, int n);
/// Point in the unit ball with log-uniform radius in [rmin, 1]; stratifies
/// samples toward the origin, where conic structure lives.
Eigen::VectorXd sample_ball_log(std::mt19937_64& rng, int n, double rmin);

/// Orthonormal basis of the hyperplane orthogonal to v (n x (n-1)).
Eigen::MatrixXd orth_complement(const Eigen::VectorXd& v);

/// Singular values of A in decreasing order.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& A);

/// rank deficiency of A against a relative threshold: number of singular
/// values <= tol * sigma_max among the first min(rows, cols).  A matrix with
/// sigma_max below `floor` counts as rank zero.
int rank_deficiency(const Eigen::MatrixXd& A, double tol, double floor = 1e-12);

/// Run fn(i) for i in [0, count) on up to `jobs` threads.  Work items must
/// write only to their own index so results are independent of the thread
/// count.
void parallel_for_index(int count, int jobs, const std::function<void(int)>& fn);

}  // namespace milnorlab
