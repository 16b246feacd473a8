#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "milnorlab/germ.hpp"
#include "milnorlab/regularity.hpp"
#include "milnorlab/solvers.hpp"

namespace milnorlab {

/// Riemannian metric as a field of SPD matrices; an empty function means
/// the Euclidean metric.
using MetricField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// A horizontal distribution as a frame field: x -> n x k matrix whose
/// columns span the horizontal space at x.
using FrameField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// An Ehresmann connection for a submersion germ: vertical spaces are
/// ker Df, horizontal spaces default to the metric-orthogonal complement
/// G^{-1} range(Df^T) and may be overridden by an explicit frame.
struct ConnectionSpec {
  MapGerm germ;
  MetricField metric;      // empty: identity
  FrameField horizontal;   // empty: derived from the metric
};

/// n x (n-k) orthonormal basis of ker Df(x).  Raises NotSubmersion when
/// Df(x) drops below full row rank (relative tol 1e-10).
Eigen::MatrixXd vertical_space(const ConnectionSpec& c, const Eigen::VectorXd& x);

/// n x k horizontal frame at x; columns are G^{-1} Df^T (or the user
/// frame).  Raises NotSubmersion as above.
Eigen::MatrixXd horizontal_space(const ConnectionSpec& c, const Eigen::VectorXd& x);

/// Parametrized curve in the target.  An empty `velocity` falls back to
/// central differences of `at`.
struct BaseCurve {
  std::function<Eigen::VectorXd(double)> at;
  std::function<Eigen::VectorXd(double)> velocity;
  double t0 = 0.0;
  double t1 = 1.0;
};

BaseCurve segment_curve(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
/// Full counterclockwise turn, t in [0, 1].
BaseCurve circle_curve(const Eigen::VectorXd& center, double radius);

struct LiftResult {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  /// sup |f(x(t)) - curve(t)| along the lift; the invariant is <= 1e-6.
  double max_defect = 0.0;
  bool completed = false;
  std::string message;
};

/// Horizontal lift: integrates xdot = H(x) (Df(x) H(x))^{-1} curve'(t)
/// from x0.  Requires f(x0) = curve(t0) to 1e-8 (PreconditionError).
/// A rank drop along the way aborts the lift with completed = false.
LiftResult horizontal_lift(const ConnectionSpec& c, const BaseCurve& curve,
                           const Eigen::VectorXd& x0, const OdeOptions& opts = {});

/// Endpoint of the horizontal lift: the fiber translation of x0 along the
/// curve.  Raises StepFailure when the lift does not complete.
Eigen::VectorXd fiber_translation(const ConnectionSpec& c, const BaseCurve& curve,
                                  const Eigen::VectorXd& x0,
                                  const OdeOptions& opts = {});

/// g o f as a germ, by substituting the components of f into g's trees.
MapGerm compose_germ(const MapGerm& outer, const MapGerm& inner);

/// Horizontal frame for g o f assembled from connections for f and g: the
/// horizontal space of f is split by pulling the vertical/horizontal
/// decomposition of g at f(x) back through Df restricted to H^f, and the
/// part over H^g is the composite's horizontal space.  The frame is
/// H^f (Df H^f)^{-1} H^g, an n x r matrix (r = target dim of g).
FrameField composed_connection(const ConnectionSpec& cf, const ConnectionSpec& cg);

struct CompositionProbe {
  int starts = 0;
  int completed = 0;
  /// sup over starts of |endpoint via composed connection - endpoint via
  /// the two-stage lift (through g, then through f)|.
  double sup_error = 0.0;
  /// least singular value of D(g o f) restricted to the composed frame,
  /// over all visited points.
  double min_sigma = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> notes;
};

/// Checks that the composed connection transports fibers the same way as
/// lifting the curve through g and then lifting the lifted curve through
/// f.  Pass needs every start to complete, sup_error <= 1e-5 and
/// min_sigma > 1e-8.
CompositionProbe composition_lemma_probe(const ConnectionSpec& cf,
                                         const ConnectionSpec& cg,
                                         const BaseCurve& curve,
                                         const std::vector<Eigen::VectorXd>& starts,
                                         const OdeOptions& opts = {});

}  // namespace milnorlab
