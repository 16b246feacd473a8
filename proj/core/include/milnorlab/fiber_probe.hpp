#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "milnorlab/ball.hpp"
#include "milnorlab/critical_locus.hpp"
#include "milnorlab/germ.hpp"
#include "milnorlab/regularity.hpp"

namespace milnorlab {

struct FiberCloud {
  Eigen::VectorXd target;
  double ball = 0.0;  // sampling ball radius around the origin
  std::vector<Eigen::VectorXd> points;  // each with |f(p) - target| <= 1e-9
  double linking_radius = 0.0;  // 3 x median nearest-neighbor distance
};

/// Samples f^{-1}(target) inside the ball of radius `ball` by Gauss-Newton
/// from plan.points seeds, deduplicated at linking_radius/4 spacing.  An
/// empty cloud is a valid answer: the fiber misses the ball (or the target
/// is outside the image).
FiberCloud sample_fiber(const MapGerm& g, const Eigen::VectorXd& target,
                        double ball, const SamplingPlan& plan);

/// Connected components of the graph linking cloud points closer than the
/// given radius (cloud.linking_radius by default).  Raises EmptyCloud.
int component_count(const FiberCloud& cloud);
int component_count(const FiberCloud& cloud, double linking_radius);

/// Advisory local dimension estimate: PCA over linking-radius
/// neighborhoods, counting principal directions that hold more than 10%
/// of the leading variance.  Raises EmptyCloud.
struct LocalDim {
  double mean_dim = 0.0;
  int anchors = 0;
};
LocalDim local_dimension(const FiberCloud& cloud);

/// Chains a k = 2 discriminant model's branch grids into one closed
/// polyline (greedy nearest-endpoint order, branches reversed as needed).
/// Raises NoDiscriminant when the model has no branch points; a chain
/// whose largest gap exceeds 5% of its diameter raises PreconditionError
/// naming the gap.
std::vector<Eigen::VectorXd> assemble_loop(const DiscriminantModel& model);

/// Winding-number test of y against a closed polyline, k = 2.
bool inside_loop(const std::vector<Eigen::VectorXd>& loop,
                 const Eigen::VectorXd& y);

struct SectorReport {
  Eigen::VectorXd target;
  bool inside = false;   // inside the discriminant loop
  int components = 0;    // 0 when the fiber misses the ball
  double local_dim = 0.0;
};

struct SurjectivityProbe {
  std::vector<SectorReport> sectors;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> notes;
};

/// For k = 2 germs whose discriminant model closes into a loop: classifies
/// each target as inside or outside, samples its fiber, and checks the
/// sampled image matches the classification (inside targets have points,
/// outside targets none).
SurjectivityProbe surjectivity_probe(const MapGerm& g,
                                     const DiscriminantModel& model,
                                     const std::vector<Eigen::VectorXd>& targets,
                                     double ball, const SamplingPlan& plan);

}  // namespace milnorlab
