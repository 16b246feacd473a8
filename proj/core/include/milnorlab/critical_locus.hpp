#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "milnorlab/ball.hpp"
#include "milnorlab/germ.hpp"

namespace milnorlab {

/// Rank deficiency of Df(x): target_dim - rank, with rank counted by
/// singular values above tol * sigma_max (sigma_max below 1e-12 counts as
/// rank zero).  BranchBoundary from the Jacobian propagates.
int rank_defect(const MapGerm& g, const Eigen::VectorXd& x, double tol = 1e-8);

/// A refined critical point and its image.
struct CriticalSample {
  Eigen::VectorXd x;
  Eigen::VectorXd image;
  int defect = 0;
  double residual = 0.0;  // final norm of the stacked vanishing minors
};

/// Points of B_eps where Df drops rank, found by Gauss-Newton on the
/// stacked k x k minors of Df from stratified random seeds (uniform /
/// log-radius / near-sphere).  Accepted points have minor residual < 1e-10
/// and rank_defect >= 1.
std::vector<CriticalSample> sample_critical_set(const MapGerm& g, const BallConfig& cfg,
                                                const SamplingPlan& plan);

/// One closed-form discriminant branch: a parametrized curve in the target.
/// [t_lo, t_hi] is the nominal parameter range; [reach_lo, reach_hi] the
/// subrange whose preimage meets B_eps and whose image stays in the closed
/// delta-disc, used for coverage scoring.
struct OracleBranch {
  std::string name;
  double t_lo = 0.0, t_hi = 0.0;
  double reach_lo = 0.0, reach_hi = 0.0;
  std::function<Eigen::VectorXd(double)> at;
  std::vector<double> grid;  // canonical export grid over [t_lo, t_hi]
};

/// Discriminant samples with traceable preimages, plus oracle branches when
/// the family has a closed form.
struct DiscriminantModel {
  BallConfig cfg;
  std::vector<CriticalSample> points;   // deduplicated in the image at 1e-4 * delta
  std::vector<OracleBranch> branches;   // empty when no oracle is known
  // Target components i whose whole coordinate hyperplane {y_i = 0} belongs
  // to the discriminant, beyond what finitely many rays can represent.  Set
  // by callers with structural knowledge, e.g. a conic modification whose
  // inverse flattens component i and thereby makes every {f_i = 0} critical.
  std::vector<int> hyperplane_components;
  std::uint64_t seed = 0;
  int seeds_tried = 0;
  std::vector<std::string> notes;
};

/// Critical images of sampled critical points, deduplicated on a grid of
/// resolution 1e-4 * delta.  Oracle branches are attached when available.
DiscriminantModel discriminant_sample(const MapGerm& g, const BallConfig& cfg,
                                      const SamplingPlan& plan);

/// Closed-form discriminant branches for the known families.  Raises
/// NoOracle when the family is untagged.  A submersion yields an empty list.
std::vector<OracleBranch> oracle_discriminant(const MapGerm& g, const BallConfig& cfg);

struct OracleComparison {
  double max_distance = 0.0;   // largest sample-to-oracle distance
  double coverage = 1.0;       // fraction of reachable oracle points near a sample
  double coverage_radius = 0.0;
  int samples = 0;
  int oracle_points = 0;
};

/// One-sided distances between sampled and closed-form discriminants.
/// Coverage counts oracle grid points over the reachable range with a
/// sample within coverage_radius (default 0.05 * delta).
OracleComparison compare_to_oracle(const DiscriminantModel& model,
                                   double coverage_radius = 0.0);

/// Critical points of the restriction f|S_eps: points of the sphere where
/// [Df; x^T] drops below rank k+1, with their images.
struct BoundaryCritical {
  std::vector<CriticalSample> points;
  /// Boundary images inside B_delta that are not within tolerance of the
  /// interior discriminant (a nonempty list falsifies the strong
  /// transversality picture at this scale).
  std::vector<Eigen::VectorXd> new_inside_delta;
};

BoundaryCritical boundary_critical(const MapGerm& g, const DiscriminantModel& interior,
                                   const SamplingPlan& plan);

/// Numerical check of the tangency geometry behind the psi family's delta
/// heuristic: points on S_eps at distance exactly 1 from (1,0,...,0) lie on
/// a common sphere about (2,0,...,0); returns the recovered squared radius
/// spread and the image height of that sphere.
struct SphereFamilyCheck {
  double eps = 0.0;
  double r2_min = 0.0;      // recovered min of |x - p2|^2 over the circle
  double r2_max = 0.0;      // recovered max
  double r2_closed_form = 0.0;  // 4 - eps^2
  /// Image height of the sphere family under the second component: the
  /// derived value e^{-1/(4 - r^2)}.
  double derived_height = 0.0;
  /// The often-quoted closed form e^{-1/(r(4-r))} for the same height; kept
  /// for comparison because it does not match the derivation.
  double quoted_height = 0.0;
  bool heights_disagree = false;
};

SphereFamilyCheck psi_sphere_radius_check(int n, double eps, const SamplingPlan& plan);

/// Note appended to psi-family reports when the quoted and derived sphere
/// image heights disagree.
std::string psi_height_note(const SphereFamilyCheck& chk);

}  // namespace milnorlab
