#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "milnorlab/critical_locus.hpp"
#include "milnorlab/germ.hpp"
#include "milnorlab/regularity.hpp"

namespace milnorlab {

/// A homeomorphism of the target (R^k, 0) fixing 0, given componentwise by
/// expression trees in k variables for both directions.  "Conic" is the
/// intended use, not a checked property: the catalog entries send rays to
/// smooth arcs and are smooth submersions away from their gluing sets.
struct ConicHomeo {
  int k = 2;
  std::vector<ExprPtr> forward;  // h
  std::vector<ExprPtr> inverse;  // h^{-1}
  double eta = 0.25;             // target-ball radius the entry certifies
  std::string tag;               // catalog name, or "user"
  std::string domain_note;       // caveats on where the formulas apply

  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& u) const;
};

/// Catalog entries, all with k = 2:
///   "identity"
///   "cube"        h = (u, v^3)
///   "inv_cube"    h = (u, cbrt v); modifying by it cubes the second
///                 component of the germ
///   "sqrt_sign"   h = (sgn(u) sqrt|u|, v/2)
///   "parity(p,q)" h = (sgn(u)|u|^{1/q}, sgn(v)|v|^{1/p}); the roots are
///                 plain odd roots when the exponent is odd, sign-split
///                 when it is even
///   "psi_exp"     h = (e^{1/(u(u-2))}, e^{1/(v(v-4))}) on (0,1)^2,
///                 extended by 0; straightens the flat-pair discriminant
/// Unknown names raise UnknownName.
ConicHomeo catalog_homeo(const std::string& name);

/// Accepted catalog names, with "parity(p,q)" listed schematically.
const std::vector<std::string>& homeo_names();

/// The conic modification f_h = h^{-1} o f, built by substituting the
/// components of f into the inverse trees.  The result carries
/// FamilyModified{base, tag, inverse} so discriminant oracles pull back
/// through h^{-1}.  Spot-checks h(f_h(x)) = f(x) on a few points near 0
/// and raises PreconditionError past 1e-9 relative error.
MapGerm conic_modify(const MapGerm& g, const ConicHomeo& h);

/// xi_h(y) = h(eta h^{-1}(y)/|h^{-1}(y)|): projects y along the h-image of
/// rays onto the h-image of the eta-sphere.  eta <= 0 uses h.eta.  Raises
/// DomainError when h^{-1}(y) is too short to direct a ray.
Eigen::VectorXd xi_h(const ConicHomeo& h, const Eigen::VectorXd& y,
                     double eta = 0.0);

struct LinearizationReport {
  Verdict verdict = Verdict::inconclusive;
  double eta = 0.0;
  /// Largest distance from a pulled-back discriminant point to its fitted
  /// ray, absolute; pass needs max_perp_residual < 1e-4 * eta.
  double max_perp_residual = 0.0;
  std::vector<Eigen::VectorXd> ray_directions;  // unit vectors, one per cluster
  int points_used = 0;
  std::vector<std::string> notes;
};

/// Does h^{-1} send the discriminant of g inside the eta-ball to a union
/// of rays through 0?  Pulls the model's sample images and oracle branch
/// grids (reachable parameter range only) through h^{-1}, keeps points
/// with |h^{-1}(p)| <= eta, fits one ray per branch half (parameter sign)
/// and greedy direction clusters (0.05 rad) for loose samples.  Vacuous
/// pass when nothing lands in the ball.  Raises NoDiscriminant when the
/// model carries neither samples nor branches.
LinearizationReport is_linearization(const ConicHomeo& h, const MapGerm& g,
                                     const DiscriminantModel& model);

/// d_h-regularity: d-regularity of the conic modification f_h.  First
/// checks that h linearizes g's discriminant (raises PreconditionError on
/// a failed, non-vacuous fit), then samples f_h's own discriminant, adds
/// the pulled-back oracle branch directions, and delegates to d_regular.
RegularityReport d_h_regular(const MapGerm& g, const ConicHomeo& h,
                             const BallConfig& cfg, const SamplingPlan& plan);

}  // namespace milnorlab
