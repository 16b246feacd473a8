#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "milnorlab/ball.hpp"
#include "milnorlab/errors.hpp"
#include "milnorlab/flow.hpp"
#include "milnorlab/germ.hpp"
#include "milnorlab/regularity.hpp"
#include "milnorlab/solvers.hpp"

using namespace milnorlab;

namespace {
const std::vector<std::pair<double, double>> kStandardLambda = {
    {2.0, 1.0}, {-1.0, 1.0}, {0.0, -1.0}};
}

TEST_CASE("the flow field is outward and tangent to the projection fibers") {
  const MapGerm g = builtin_ldm(2, 2, kStandardLambda);
  std::mt19937_64 rng(5);
  int tested = 0;
  while (tested < 100) {
    const Eigen::VectorXd x = 0.3 * sample_sphere(rng, 3);
    Eigen::VectorXd w;
    try {
      w = milnor_vector_field(g, x);
    } catch (const Error&) {
      continue;  // sampled too close to the zero fiber
    }
    ++tested;
    REQUIRE(std::fabs(w.dot(x) - x.squaredNorm()) <= 1e-10 * x.squaredNorm());

    // phi = f/|f| must be first-order constant along the field.
    const double h = 1e-6 / (1.0 + w.norm());
    const Eigen::VectorXd dphi =
        (phi(g, x + h * w) - phi(g, x - h * w)) / (2.0 * h);
    REQUIRE(dphi.norm() <= 1e-6 * (1.0 + w.norm()));
  }
}

TEST_CASE("field degenerations raise typed errors") {
  const MapGerm g = builtin_ldm(2, 2, kStandardLambda);
  Eigen::VectorXd on_fiber(3);  // 2x^2 = y^2 and x^2 + y^2 = z^2
  on_fiber << 0.1, 0.1 * std::sqrt(2.0), 0.1 * std::sqrt(3.0);
  CHECK_THROWS_AS(milnor_vector_field(g, on_fiber), OnFiberV);

  const MapGerm ex6 = builtin_catalog("ex6");
  Eigen::VectorXd bad(3);  // on the tangency line {x = z, y = 0}
  bad << 0.05, 0.0, 0.05;
  CHECK_THROWS_AS(milnor_vector_field(ex6, bad), DegenerateProjection);
}

TEST_CASE("flows from the inner sphere reach the boundary along rays") {
  const MapGerm g = builtin_ldm(2, 2, kStandardLambda);
  const double eps = 0.5;
  std::mt19937_64 rng(17);
  int flows = 0;
  while (flows < 10) {
    const Eigen::VectorXd x0 = (eps / 8.0) * sample_sphere(rng, 3);
    FlowTrace tr;
    try {
      tr = flow_to_sphere(g, x0, eps);
    } catch (const Error&) {
      continue;
    }
    if (tr.termination != FlowTermination::reached_sphere &&
        tr.samples.empty())
      continue;  // degenerate start, try another
    ++flows;
    REQUIRE(tr.termination == FlowTermination::reached_sphere);
    REQUIRE(!tr.samples.empty());
    const FlowSample& last = tr.samples.back();
    CHECK(std::fabs(last.norm_x - eps) <= 1e-8 * eps);
    CHECK(tr.phi_drift <= 1e-6);
    CHECK(tr.norm_x_monotone);
    CHECK(tr.norm_f_monotone);

    // The scaling family is homogeneous, so the flow lines are rays.
    const Eigen::VectorXd expected = (eps / x0.norm()) * x0;
    CHECK((last.x - expected).norm() <= 1e-6);
  }
}

TEST_CASE("a guard zone at the start aborts immediately") {
  const MapGerm g = builtin_ldm(2, 2, kStandardLambda);
  Eigen::VectorXd x0(3);
  x0 << 0.0625, 0.0, 0.0;
  FlowOptions opts;
  opts.guard_points = {x0};
  const FlowTrace tr = flow_to_sphere(g, x0, 0.5, opts);
  CHECK(tr.termination == FlowTermination::near_critical);
  CHECK(tr.message.find("guard") != std::string::npos);
}

TEST_CASE("a degenerate start is reported, not thrown") {
  const MapGerm ex6 = builtin_catalog("ex6");
  Eigen::VectorXd bad(3);
  bad << 0.05, 0.0, 0.05;
  const FlowTrace tr = flow_to_sphere(ex6, bad, 0.5);
  CHECK(tr.termination == FlowTermination::degenerate);
  CHECK(tr.message.find("vanished") != std::string::npos);
}

TEST_CASE("an exhausted time budget reports horizon") {
  const MapGerm g = builtin_ldm(2, 2, kStandardLambda);
  Eigen::VectorXd x0(3);
  x0 << 0.05, 0.03, 0.01;
  FlowOptions opts;
  opts.horizon_factor = 0.0;  // budget 1 flow-time unit, ln(eps/|x0|) > 2
  const FlowTrace tr = flow_to_sphere(g, x0, 0.5, opts);
  CHECK(tr.termination == FlowTermination::horizon);
  REQUIRE(!tr.samples.empty());
  CHECK(tr.samples.back().norm_x < 0.5);
  CHECK(tr.norm_x_monotone);
}

TEST_CASE("tube equivalence probe on the scaling family") {
  const MapGerm g = builtin_ldm(2, 2, kStandardLambda);
  const BallConfig cfg = default_ball(g, 0.5);
  SamplingPlan plan;
  plan.points = 100;
  const RegularityReport dreg = d_regular(g, cfg, plan);
  REQUIRE(dreg.verdict == Verdict::pass);

  const TauProbe probe = tau_equivalence_probe(g, dreg, cfg, plan);
  CHECK(probe.verdict == Verdict::pass);
  CHECK(probe.seeds == 100);
  CHECK(probe.reached == probe.seeds - probe.skipped);
  CHECK(probe.failures.empty());
  CHECK(probe.max_phi_drift <= 1e-6);
}

TEST_CASE("the probe refuses to run without d-regularity") {
  const MapGerm g = builtin_catalog("ex6");
  const BallConfig cfg = default_ball(g, 0.5);
  SamplingPlan plan;
  plan.points = 10;
  RegularityReport failed;
  failed.verdict = Verdict::fail;
  failed.method = "both";
  CHECK_THROWS_AS(tau_equivalence_probe(g, failed, cfg, plan), PreconditionError);
}
