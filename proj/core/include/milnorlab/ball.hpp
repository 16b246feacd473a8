#pragma once

#include <cstdint>
#include <optional>

#include "milnorlab/errors.hpp"
#include "milnorlab/germ.hpp"

namespace milnorlab {

/// Radii for desk-scale checks: the source ball B_eps, the target ball
/// B_delta over which fibers are inspected, and an optional cone radius eta
/// in the target.  Requires 0 < delta < eps <= eps0 and eta <= delta when
/// eta is present.  eps0 is the caller-supplied working scale; nothing here
/// certifies it is a Milnor radius.
struct BallConfig {
  double eps0 = 1.0;
  double eps = 0.5;
  double delta = 0.025;
  std::optional<double> eta;

  void validate() const {
    if (!(eps0 > 0.0) || !(eps > 0.0) || !(delta > 0.0))
      throw PreconditionError("ball radii must be positive");
    if (!(delta < eps) || !(eps <= eps0))
      throw PreconditionError("ball radii must satisfy 0 < delta < eps <= eps0");
    if (eta && !(*eta > 0.0 && *eta <= delta))
      throw PreconditionError("eta must satisfy 0 < eta <= delta");
  }
};

/// delta heuristic: eps^2/10 for polynomial germs.  For the psi family the
/// image of B_eps hugs the curve scale e^{-1/eps^2}, which is also the
/// largest discriminant height reached from inside B_eps, so that value is
/// used instead.
double default_delta(const MapGerm& g, double eps);

/// Default configuration for a germ at a chosen eps.
BallConfig default_ball(const MapGerm& g, double eps);

/// Deterministic sampling parameters shared by the samplers.
struct SamplingPlan {
  std::uint64_t seed = 20240817;
  int points = 4096;   // seeds for volume sampling
  int directions = 360;  // directions for sphere/ray scans
  int jobs = 1;
};

}  // namespace milnorlab
