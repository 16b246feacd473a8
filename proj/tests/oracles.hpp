#pragma once

// Independent reference computations the suites check the library against.
// Everything here is deliberately naive: central differences, closed forms
// and exhaustive geometry, no shared code with the implementations under
// test beyond the germ evaluator itself.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "milnorlab/germ.hpp"

namespace oracles {

/// Central-difference Jacobian with a fixed step.
inline Eigen::MatrixXd fd_jacobian(const milnorlab::MapGerm& g,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
  const int n = g.source_dim();
  const int k = g.target_dim();
  Eigen::MatrixXd J(k, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    J.col(j) = (g.eval(xp) - g.eval(xm)) / (2.0 * h);
  }
  return J;
}

/// Worst relative row error between two Jacobians, scale-free per row.
inline double jacobian_rel_error(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  double worst = 0.0;
  for (int i = 0; i < A.rows(); ++i) {
    const double scale = std::max(1.0, std::max(A.row(i).norm(), B.row(i).norm()));
    worst = std::max(worst, (A.row(i) - B.row(i)).norm() / scale);
  }
  return worst;
}

/// The flat-pair discriminant curve C(s) = (e^{-1/(s(2-s))}, e^{-1/(s(4-s))})
/// for s in (0, 2).
inline Eigen::Vector2d psi_curve(double s) {
  Eigen::Vector2d c;
  c << std::exp(-1.0 / (s * (2.0 - s))), std::exp(-1.0 / (s * (4.0 - s)));
  return c;
}

/// An interior point of the flat-pair discriminant sector at parameter s:
/// the curve's first coordinate paired with the log-midpoint of the wall
/// heights v_curve(s) and v_axis-side continuation.
inline Eigen::Vector2d psi_interior_target(double s) {
  const double u = std::exp(-1.0 / (s * (2.0 - s)));
  const double d1 = s * (4.0 - s);
  const double d2 = 4.0 - s * s;
  Eigen::Vector2d t;
  t << u, std::exp(-0.5 * (1.0 / d1 + 1.0 / d2));
  return t;
}

/// Geometry of the flat-pair fiber for n = 2: the fiber over an interior
/// target (u, v) is the intersection of the circle of radius r1 about
/// (1, 0) with the circle of radius r2 about (2, 0), a two-point set
/// symmetric across the x1-axis.  Returns the two radii, the common x1,
/// and the vertical gap 2 |x2| between the points.
struct PsiPairFiber {
  double r1 = 0.0;
  double r2 = 0.0;
  double x1 = 0.0;
  double gap = 0.0;
  bool exists = false;
};

inline PsiPairFiber psi_pair_fiber(double u, double v) {
  PsiPairFiber f;
  if (!(u > 0.0) || !(v > 0.0)) return f;
  const double r1sq = 1.0 + 1.0 / std::log(u);
  const double r2sq = 4.0 + 1.0 / std::log(v);
  if (!(r1sq > 0.0) || !(r2sq > 0.0)) return f;
  f.r1 = std::sqrt(r1sq);
  f.r2 = std::sqrt(r2sq);
  f.x1 = (3.0 + r1sq - r2sq) / 2.0;  // centers at 1 and 2 on the x1-axis
  const double x2sq = r1sq - (f.x1 - 1.0) * (f.x1 - 1.0);
  if (x2sq < 0.0) return f;
  f.gap = 2.0 * std::sqrt(x2sq);
  f.exists = true;
  return f;
}

/// For n = 3 the same construction yields a circle of radius rho about
/// (x1, 0, 0) in the plane {x1 = const}.
inline double psi_triple_fiber_radius(double u, double v) {
  const PsiPairFiber f = psi_pair_fiber(u, v);
  return f.exists ? f.gap / 2.0 : -1.0;
}

/// Explicit convex-combination certificate that 0 lies in the hull of the
/// three coefficient pairs (2,1), (-1,1), (0,-1).
inline bool hull_certificate_standard() {
  const double c1 = 1.0 / 6.0, c2 = 1.0 / 3.0, c3 = 1.0 / 2.0;
  const double x = c1 * 2.0 + c2 * -1.0 + c3 * 0.0;
  const double y = c1 * 1.0 + c2 * 1.0 + c3 * -1.0;
  return std::abs(x) < 1e-15 && std::abs(y) < 1e-15 && c1 + c2 + c3 == 1.0;
}

/// Deterministic points in the ball of radius r (rejection-free: direction
/// times a radius with the right density).
inline Eigen::VectorXd ball_point(std::mt19937_64& rng, int n, double r) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = gauss(rng);
  x.normalize();
  return r * std::pow(unif(rng), 1.0 / n) * x;
}

}  // namespace oracles
