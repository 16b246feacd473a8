#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "milnorlab/errors.hpp"

namespace milnorlab {

/// First-order jet: a value together with its gradient with respect to the
/// evaluation variables.  Arithmetic on jets is forward-mode automatic
/// differentiation; the gradient dimension is fixed at seeding time.
struct Jet {
  double v = 0.0;
  Eigen::VectorXd d;

  Jet() = default;
  explicit Jet(double value) : v(value) {}
  Jet(double value, Eigen::VectorXd grad) : v(value), d(std::move(grad)) {}

  /// Constant of known gradient dimension.
  static Jet constant(double value, Eigen::Index n) {
    return Jet(value, Eigen::VectorXd::Zero(n));
  }
  /// Seed for variable i of n.
  static Jet variable(double value, Eigen::Index i, Eigen::Index n) {
    Jet j(value, Eigen::VectorXd::Zero(n));
    j.d(i) = 1.0;
    return j;
  }

  double value() const { return v; }
};

inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d + b.d}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d - b.d}; }
inline Jet operator-(const Jet& a) { return {-a.v, -a.d}; }
inline Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.v * b.d + b.v * a.d};
}
inline Jet operator/(const Jet& a, const Jet& b) {
  if (b.v == 0.0) throw DomainError("division by zero");
  const double q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  // When the value underflows to zero the true scaled derivative does too;
  // forcing it avoids 0 * inf = NaN for arguments like -1/t as t -> 0+.
  if (e == 0.0) return Jet::constant(0.0, a.d.size());
  return {e, e * a.d};
}

inline Jet log(const Jet& a) {
  if (a.v < 0.0) throw DomainError("log of a negative number");
  if (a.v == 0.0) throw DomainError("derivative of log at zero");
  return {std::log(a.v), a.d / a.v};
}

/// Integer power by repeated squaring; exponent must be >= 0.
inline Jet ipow(Jet base, long long e) {
  Eigen::Index n = base.d.size();
  Jet acc = Jet::constant(1.0, n);
  while (e > 0) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return acc;
}

inline double ipow(double base, long long e) {
  double acc = 1.0;
  while (e > 0) {
    if (e & 1) acc *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return acc;
}

/// q-th root.  Even q requires a nonnegative argument; odd q is defined on
/// all of R and preserves sign.  Derivative is unbounded at 0, so a jet
/// evaluated exactly there raises.
inline double nthroot(double t, int q) {
  if (q % 2 == 0) {
    if (t < 0.0) throw DomainError("even root of a negative number");
    return q == 2 ? std::sqrt(t) : std::pow(t, 1.0 / q);
  }
  const double r = q == 3 ? std::cbrt(std::fabs(t)) : std::pow(std::fabs(t), 1.0 / q);
  return t < 0.0 ? -r : r;
}

inline Jet nthroot(const Jet& a, int q) {
  if (a.v == 0.0) throw BranchBoundary("derivative of root at zero");
  const double r = nthroot(a.v, q);
  // d/dt t^(1/q) = r / (q t)
  return {r, (r / (q * a.v)) * a.d};
}

/// Flat bump e^{-1/t} for t > 0, identically 0 for t <= 0.  Both the value
/// and the derivative are exactly zero on the closed left half line.
inline double bump(double t) {
  if (t <= 0.0) return 0.0;
  return std::exp(-1.0 / t);
}

inline Jet bump(const Jet& a) {
  if (a.v <= 0.0) return Jet::constant(0.0, a.d.size());
  const double e = std::exp(-1.0 / a.v);
  // e underflows long before 1/t^2 overflows; zeroing the derivative with it
  // keeps the product finite for all arguments.
  if (e == 0.0) return Jet::constant(0.0, a.d.size());
  return {e, (e / (a.v * a.v)) * a.d};
}

}  // namespace milnorlab
