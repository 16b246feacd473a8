#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "milnorlab/ball.hpp"
#include "milnorlab/critical_locus.hpp"
#include "milnorlab/errors.hpp"
#include "milnorlab/germ.hpp"
#include "milnorlab/regularity.hpp"
#include "oracles.hpp"

using namespace milnorlab;

namespace {
const std::vector<std::pair<double, double>> kStandardLambda = {
    {2.0, 1.0}, {-1.0, 1.0}, {0.0, -1.0}};

MapGerm scaled_copy(const MapGerm& g, const std::vector<double>& scales) {
  std::vector<ExprPtr> comps;
  for (int i = 0; i < g.target_dim(); ++i)
    comps.push_back(make_mul(make_const(scales[static_cast<std::size_t>(i)]),
                             g.components()[static_cast<std::size_t>(i)]));
  return MapGerm(g.source_dim(), g.target_dim(), comps, g.smoothness());
}
}  // namespace

TEST_CASE("phi and spherefication at anchor points") {
  const MapGerm proj = builtin_catalog("projection");
  Eigen::VectorXd x(3);
  x << 3.0, 4.0, 0.0;
  const Eigen::VectorXd u = phi(proj, x);
  CHECK(u(0) == doctest::Approx(0.6));
  CHECK(u(1) == doctest::Approx(0.8));

  Eigen::VectorXd y(3);
  y << 0.0, 2.0, std::sqrt(5.0);  // |y| = 3, f(y) = (0, 2)
  const Eigen::VectorXd s = spherefication(proj, y);
  CHECK(s(0) == doctest::Approx(0.0));
  CHECK(s(1) == doctest::Approx(3.0));

  Eigen::VectorXd z(3);
  z << 0.0, 0.0, 0.5;  // on the zero fiber of the projection
  CHECK_THROWS_AS(phi(proj, z), OnFiberV);
}

TEST_CASE("exclusion sets are directional, not antipodal") {
  ExclusionSet excl;
  Eigen::Vector2d e1(1.0, 0.0);
  excl.add_direction(e1);
  CHECK(excl.excludes(e1));
  CHECK(excl.excludes(Eigen::Vector2d(1.0, 5e-4)));   // within angular_tol
  CHECK(!excl.excludes(Eigen::Vector2d(1.0, 5e-3)));  // outside
  CHECK(!excl.excludes(Eigen::Vector2d(-1.0, 0.0)));  // antipode is distinct
  CHECK(excl.excludes(Eigen::Vector2d(1e-15, 0.0)));  // too short to direct a ray

  // Deduplication keeps nearby directions as one entry.
  excl.add_direction(Eigen::Vector2d(1.0, 1e-4));
  CHECK(excl.directions.size() == 1);
  excl.add_direction(Eigen::Vector2d(0.0, 1.0));
  CHECK(excl.directions.size() == 2);
}

TEST_CASE("hyperplane exclusions cover whole coordinate walls") {
  ExclusionSet excl;
  excl.hyperplane_components = {1};
  CHECK(excl.excludes(Eigen::Vector2d(1.0, 0.0)));
  CHECK(excl.excludes(Eigen::Vector2d(-1.0, 5e-4)));
  CHECK(!excl.excludes(Eigen::Vector2d(0.0, 1.0)));
  CHECK(!excl.excludes(Eigen::Vector2d(1.0, 0.5).normalized()));
}

TEST_CASE("d-regularity verdicts across the catalog") {
  SamplingPlan plan;

  SUBCASE("ldm(2,2) standard passes with both methods agreeing") {
    const MapGerm g = builtin_ldm(2, 2, kStandardLambda);
    const BallConfig cfg = default_ball(g, 0.5);
    const RegularityReport rep = d_regular(g, cfg, plan);
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.method == "both");
    CHECK(rep.witnesses.empty());
  }

  SUBCASE("linear projections pass") {
    const MapGerm g = builtin_catalog("projection");
    const BallConfig cfg = default_ball(g, 0.5);
    const RegularityReport rep = d_regular(g, cfg, plan);
    CHECK(rep.verdict == Verdict::pass);
  }

  SUBCASE("ex6 fails with a witness on the tangency line") {
    const MapGerm g = builtin_catalog("ex6");
    const BallConfig cfg = default_ball(g, 0.5);
    const RegularityReport rep = d_regular(g, cfg, plan);
    REQUIRE(rep.verdict == Verdict::fail);
    REQUIRE(!rep.witnesses.empty());
    double best = 1e9;
    for (const auto& w : rep.witnesses) {
      const double d = std::sqrt(0.5 * (w.x(0) - w.x(2)) * (w.x(0) - w.x(2)) +
                                 w.x(1) * w.x(1));
      best = std::min(best, d);
    }
    CHECK(best <= 1e-2);
  }

  SUBCASE("nondreg4 fails on its non-linearizable discriminant") {
    const MapGerm g = builtin_catalog("nondreg4");
    const BallConfig cfg = default_ball(g, 0.5);
    const RegularityReport rep = d_regular(g, cfg, plan);
    CHECK(rep.verdict == Verdict::fail);
    CHECK(!rep.witnesses.empty());
  }
}

TEST_CASE("ray and submersion methods agree case by case") {
  SamplingPlan plan;
  struct Case {
    MapGerm g;
    Verdict expected;
  };
  std::vector<Case> cases;
  cases.push_back({builtin_ldm(2, 2, kStandardLambda), Verdict::pass});
  cases.push_back({builtin_ldm(3, 3, kStandardLambda), Verdict::pass});
  cases.push_back({builtin_catalog("projection"), Verdict::pass});
  cases.push_back({builtin_catalog("ex6"), Verdict::fail});
  cases.push_back({builtin_catalog("nondreg4"), Verdict::fail});

  for (const auto& c : cases) {
    CAPTURE(describe(c.g));
    const BallConfig cfg = default_ball(c.g, 0.5);
    const DiscriminantModel model = discriminant_sample(c.g, cfg, plan);
    ExclusionSet excl = ExclusionSet::from_model(model);
    const RegularityReport rays = d_regular_via_rays(c.g, cfg, plan, excl);
    const RegularityReport subm = d_regular_via_submersion(c.g, cfg, plan, excl);
    CHECK(rays.verdict == c.expected);
    CHECK(subm.verdict == c.expected);
  }
}

TEST_CASE("verdicts are invariant under row rescaling of the germ") {
  SamplingPlan plan;
  const MapGerm base = builtin_ldm(2, 2, kStandardLambda);
  const MapGerm scaled = scaled_copy(base, {3.0, 0.125});
  const BallConfig cfg_base = default_ball(base, 0.5);
  BallConfig cfg_scaled = cfg_base;  // same source geometry, same image scale class

  const RegularityReport a = d_regular(base, cfg_base, plan);
  const RegularityReport b = d_regular(scaled, cfg_scaled, plan);
  CHECK(a.verdict == Verdict::pass);
  CHECK(b.verdict == a.verdict);

  const MapGerm bad = builtin_catalog("ex6");
  std::vector<ExprPtr> comps;
  comps.push_back(make_mul(make_const(2.5), bad.components()[0]));
  comps.push_back(make_mul(make_const(0.2), bad.components()[1]));
  const MapGerm bad_scaled(3, 2, comps, bad.smoothness());
  const RegularityReport c = d_regular(bad_scaled, default_ball(bad_scaled, 0.5), plan);
  CHECK(c.verdict == Verdict::fail);
}

TEST_CASE("transversality property across the catalog") {
  SamplingPlan plan;
  const auto run = [&](const MapGerm& g) {
    return transversality_property(g, default_ball(g, 0.5), plan);
  };

  CHECK(run(builtin_ldm(2, 2, kStandardLambda)).verdict == Verdict::pass);
  CHECK(run(builtin_catalog("parabola")).verdict == Verdict::pass);
  CHECK(run(builtin_catalog("projection")).verdict == Verdict::pass);
  CHECK(run(builtin_psi(3)).verdict == Verdict::pass);

  // nondreg4 keeps the tube transversality even though d-regularity fails:
  // the two properties split exactly here.
  CHECK(run(builtin_catalog("nondreg4")).verdict == Verdict::pass);

  const RegularityReport ex6 = run(builtin_catalog("ex6"));
  REQUIRE(ex6.verdict == Verdict::fail);
  CHECK(!ex6.witnesses.empty());
}

TEST_CASE("reports carry their sampling provenance") {
  SamplingPlan plan;
  plan.seed = 99;
  const MapGerm g = builtin_ldm(2, 2, kStandardLambda);
  const BallConfig cfg = default_ball(g, 0.5);
  const RegularityReport rep = d_regular(g, cfg, plan);
  CHECK(rep.seed == 99);
  CHECK(rep.directions_scanned > 0);
  CHECK(rep.points_scanned > 0);
  CHECK(!rep.radii_scanned.empty());
}
