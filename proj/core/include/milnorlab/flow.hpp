#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "milnorlab/ball.hpp"
#include "milnorlab/germ.hpp"
#include "milnorlab/regularity.hpp"
#include "milnorlab/solvers.hpp"

namespace milnorlab {

/// The radial field tangent to the ray preimages: the orthogonal
/// projection of x onto the tangent space of E_{phi(x)} at x, rescaled so
/// <w, x> = |x|^2 (hence |x(t)| = |x(0)| e^t along the flow).  Raises
/// OnFiberV on the zero fiber and DegenerateProjection when the projection
/// is too orthogonal to x (<p, x> <= 1e-10 |x|^2) to rescale.
Eigen::VectorXd milnor_vector_field(const MapGerm& g, const Eigen::VectorXd& x);

struct FlowSample {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd phi;  // f(x)/|f(x)|
  double norm_x = 0.0;
  double norm_f = 0.0;
};

enum class FlowTermination {
  reached_sphere,   // |x| = eps located
  degenerate,       // field degenerated (OnFiberV / DegenerateProjection)
  near_critical,    // entered the guard zone of a critical point
  step_failure,     // integrator budget or step underflow
  horizon           // ran out of flow time before the sphere
};

struct FlowTrace {
  std::vector<FlowSample> samples;
  FlowTermination termination = FlowTermination::horizon;
  std::string message;
  double phi_drift = 0.0;       // max angle (rad) between phi(x(t)) and phi(x(0))
  bool norm_x_monotone = true;  // |x| strictly increased sample to sample
  bool norm_f_monotone = true;  // |f(x)| strictly increased sample to sample
};

struct FlowOptions {
  /// Flow-time budget as a multiple of ln(eps/|x0|), plus one.
  double horizon_factor = 4.0;
  /// Abort when x comes within 1e-3 * eps of one of these points.
  std::vector<Eigen::VectorXd> guard_points;
  OdeOptions ode;
};

/// Integrates xdot = w(x) from x0 until |x| reaches eps (event refined to
/// |x| - eps| <= 1e-10 * eps).  phi should be constant along the flow;
/// the trace records the observed drift and the norm monotonicity flags.
FlowTrace flow_to_sphere(const MapGerm& g, const Eigen::VectorXd& x0, double eps,
                         const FlowOptions& opts = {});

struct TauProbe {
  int seeds = 0;     // starting points attempted
  int skipped = 0;   // seeds on the zero fiber or inside a guard zone
  int reached = 0;   // flows that hit the target sphere
  double max_phi_drift = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::vector<FlowTrace> failures;  // traces that did not reach the sphere
  std::vector<std::string> notes;
};

/// Flows points from the eps/8 sphere out to the eps sphere along the
/// radial field, checking that every start away from the critical guard
/// zone reaches the sphere with phi drift below 1e-6: the flow is then a
/// fiber-preserving match between the small and large sphere pictures.
/// Requires a passed d-regularity report for g; raises PreconditionError
/// otherwise.
TauProbe tau_equivalence_probe(const MapGerm& g, const RegularityReport& dreg,
                               const BallConfig& cfg, const SamplingPlan& plan);

}  // namespace milnorlab
