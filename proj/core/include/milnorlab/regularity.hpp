#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "milnorlab/ball.hpp"
#include "milnorlab/critical_locus.hpp"
#include "milnorlab/germ.hpp"

namespace milnorlab {

enum class Verdict { pass, fail, inconclusive };

/// "pass", "fail" or "inconclusive".
const char* verdict_name(Verdict v);

/// A located transversality failure.  `theta_or_y` is the ray direction
/// (d-regularity checks) or the target value (fiber checks) the point
/// certifies.  `sigma_min` is the smallest singular value of the stacked
/// transversality system at x relative to its largest, `residual` the
/// constraint residual at convergence.
struct Witness {
  Eigen::VectorXd x;
  Eigen::VectorXd theta_or_y;
  double sigma_min = 0.0;
  double residual = 0.0;
};

struct RegularityReport {
  Verdict verdict = Verdict::inconclusive;
  std::string method;  // "rays", "submersion", "both", "transversality"
  std::vector<Witness> witnesses;
  unsigned long long seed = 0;
  int directions_scanned = 0;
  std::vector<double> radii_scanned;
  long long points_scanned = 0;
  long long excluded = 0;   // probe points skipped by the exclusion set
  long long empty_count = 0;  // (direction, radius) cells with no membership solution
  std::vector<std::string> notes;
};

/// Directions on the target sphere near which regularity makes no claim,
/// held as unit vectors.  Antipodes are distinct: excluding a direction
/// says nothing about its opposite.
struct ExclusionSet {
  std::vector<Eigen::VectorXd> directions;
  // Target components whose whole coordinate hyperplane {y_i = 0} is
  // excluded, for discriminants that contain the hyperplane rather than
  // finitely many rays in it (flattened conic modifications).
  std::vector<int> hyperplane_components;
  double angular_tol = 1e-3;  // radians

  /// True when u points within angular_tol of a stored direction, or is
  /// too short (norm <= 1e-14) to define a direction at all.
  bool excludes(const Eigen::VectorXd& u) const;

  /// Normalizes and stores u unless an existing entry already covers it
  /// to within half the angular tolerance.  Near-zero u is ignored.
  void add_direction(const Eigen::VectorXd& u);

  /// Adds the directions of all sample images and oracle branch points.
  void add_from_model(const DiscriminantModel& model);

  static ExclusionSet from_model(const DiscriminantModel& model,
                                 double tol = 1e-3);
};

/// f(x)/|f(x)|.  Raises OnFiberV when |f(x)| <= 1e-14.
Eigen::VectorXd phi(const MapGerm& g, const Eigen::VectorXd& x);

/// |x| f(x)/|f(x)|, the map carrying spheres S_eps to spheres of the same
/// radius.  Raises OnFiberV on the zero fiber.
Eigen::VectorXd spherefication(const MapGerm& g, const Eigen::VectorXd& x);

enum class FiberSphereStatus { transverse, tangency, empty };

struct FiberSphereResult {
  FiberSphereStatus status = FiberSphereStatus::empty;
  std::vector<Witness> tangencies;
  int points_found = 0;  // sampled points of f^{-1}(y) on the sphere
};

/// Samples f^{-1}(y) on the sphere of radius eps and inspects the stacked
/// matrix [Df; x^T] at each point: a relative rank drop below `tol` is a
/// tangency.  `empty` means no intersection point was found at the plan's
/// resolution.
FiberSphereResult fiber_sphere_transverse(const MapGerm& g,
                                          const Eigen::VectorXd& y, double eps,
                                          double tol, const SamplingPlan& plan);

/// Transversality property: fibers over the punctured delta-disk minus the
/// discriminant must meet the boundary sphere transversally.  Fails when
/// some critical point of f restricted to S_eps maps inside the delta-disk
/// away from the sampled discriminant; such images are reported as
/// witnesses with theta_or_y = f(x).
RegularityReport transversality_property(const MapGerm& g, const BallConfig& cfg,
                                         const SamplingPlan& plan);

/// d-regularity by ray membership: for directions theta outside `excl`,
/// solve f(x) = t theta on spheres of radius eps, eps/2, eps/4, eps/8 and
/// hunt for points where the ray preimage is tangent to the sphere.
/// Candidates are refined with theta and the radius free, so tangencies
/// between scan rays are still found.
RegularityReport d_regular_via_rays(const MapGerm& g, const BallConfig& cfg,
                                    const SamplingPlan& plan,
                                    const ExclusionSet& excl);

/// d-regularity through the sphere restriction of phi = f/|f|: at sampled
/// sphere points whose direction phi(x) is outside `excl`, the differential
/// of phi restricted to the sphere must have full rank k-1.  Rank-drop
/// candidates are refined before they count as witnesses.
RegularityReport d_regular_via_submersion(const MapGerm& g, const BallConfig& cfg,
                                          const SamplingPlan& plan,
                                          const ExclusionSet& excl);

/// Runs both methods against a shared exclusion set built from `model`
/// (sampled fresh when null) plus oracle branch directions.  Agreeing
/// verdicts pass through with method "both"; a disagreement comes back
/// inconclusive with both witness lists merged.
RegularityReport d_regular(const MapGerm& g, const BallConfig& cfg,
                           const SamplingPlan& plan,
                           const DiscriminantModel* model = nullptr);

}  // namespace milnorlab
