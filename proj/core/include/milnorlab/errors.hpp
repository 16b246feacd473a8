#pragma once

#include <stdexcept>
#include <string>

namespace milnorlab {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Evaluation left the mathematical domain of a node (log of a negative
/// number, even root of a negative number, division by zero).
struct DomainError : Error {
  using Error::Error;
};

/// Differentiation requested exactly on a piecewise boundary without a
/// one-sided mode.
struct BranchBoundary : Error {
  using Error::Error;
};

/// A pair of coefficient vectors in a quadratic-family germ is linearly
/// dependent, so the family is not weakly hyperbolic.
struct HyperbolicityViolation : Error {
  using Error::Error;
};

/// Unknown catalog or component name.
struct UnknownName : Error {
  using Error::Error;
};

/// Source text failed to parse.  Carries the 1-based location and a short
/// description of what was expected there.
struct SyntaxError : Error {
  int line;
  int col;
  std::string expected;
  SyntaxError(int line_, int col_, std::string expected_)
      : Error("syntax error at " + std::to_string(line_) + ":" +
              std::to_string(col_) + ": expected " + expected_),
        line(line_), col(col_), expected(std::move(expected_)) {}
};

/// Component count or variable index inconsistent with the declared arity.
struct ArityError : Error {
  using Error::Error;
};

/// The argument lies on the zero fiber, where f/|f| is undefined.
struct OnFiberV : Error {
  using Error::Error;
};

/// No closed-form discriminant is known for this germ.
struct NoOracle : Error {
  using Error::Error;
};

/// An operation needed discriminant data and none was available.
struct NoDiscriminant : Error {
  using Error::Error;
};

/// A point cloud operation received no points.
struct EmptyCloud : Error {
  using Error::Error;
};

/// The map is not a submersion at the requested point.
struct NotSubmersion : Error {
  using Error::Error;
};

/// The radial projection defining the flow field degenerated (the ray
/// preimage is tangent to the sphere through the point).
struct DegenerateProjection : Error {
  using Error::Error;
};

/// The ODE integrator could not complete a step within its budget.
struct StepFailure : Error {
  using Error::Error;
};

/// An operation's documented precondition was not met by the caller.
struct PreconditionError : Error {
  using Error::Error;
};

}  // namespace milnorlab
