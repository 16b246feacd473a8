#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "milnorlab/ball.hpp"
#include "milnorlab/conic.hpp"
#include "milnorlab/critical_locus.hpp"
#include "milnorlab/errors.hpp"
#include "milnorlab/germ.hpp"
#include "milnorlab/parser.hpp"
#include "oracles.hpp"

using namespace milnorlab;

namespace {
const std::vector<std::pair<double, double>> kStandardLambda = {
    {2.0, 1.0}, {-1.0, 1.0}, {0.0, -1.0}};
}

TEST_CASE("catalog homeomorphisms round-trip on their domains") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> total = {
      "identity", "cube",        "inv_cube",    "sqrt_sign",
      "parity(2,2)", "parity(2,3)", "parity(3,2)", "parity(3,3)"};
  for (const auto& name : total) {
    CAPTURE(name);
    const ConicHomeo h = catalog_homeo(name);
    REQUIRE(h.k == 2);
    CHECK(h.tag == name);
    for (int i = 0; i < 500; ++i) {
      const Eigen::VectorXd y = 2.0 * oracles::ball_point(rng, 2, 1.0);
      const Eigen::VectorXd back = h.apply_inverse(h.apply(y));
      const Eigen::VectorXd there = h.apply(h.apply_inverse(y));
      REQUIRE((back - y).norm() <= 1e-11 * (1.0 + y.norm()));
      REQUIRE((there - y).norm() <= 1e-11 * (1.0 + y.norm()));
    }
  }

  // psi_exp is a bijection (0,1)x(0,2) -> (0,e^-1)x(0,e^-1/4); round-trip
  // away from the edges where the inverse cancels catastrophically.
  const ConicHomeo psi = catalog_homeo("psi_exp");
  std::uniform_real_distribution<double> ua(0.05, 0.95);
  std::uniform_real_distribution<double> ub(0.05, 1.95);
  for (int i = 0; i < 500; ++i) {
    Eigen::Vector2d y(ua(rng), ub(rng));
    const Eigen::VectorXd back = psi.apply_inverse(psi.apply(y));
    REQUIRE((back - y).norm() <= 1e-9);
  }
  CHECK(!psi.domain_note.empty());
}

TEST_CASE("catalog anchor values") {
  const ConicHomeo cube = catalog_homeo("cube");
  Eigen::Vector2d y(1.0, 2.0);
  CHECK(cube.apply(y)(1) == doctest::Approx(8.0));
  Eigen::Vector2d img(1.0, 8.0);
  CHECK(cube.apply_inverse(img)(1) == doctest::Approx(2.0));

  const ConicHomeo par = catalog_homeo("parity(3,3)");
  Eigen::Vector2d z(2.0, 0.5);
  const Eigen::VectorXd zi = par.apply_inverse(z);
  CHECK(zi(0) == doctest::Approx(8.0));
  CHECK(zi(1) == doctest::Approx(0.125));

  const ConicHomeo ss = catalog_homeo("sqrt_sign");
  Eigen::Vector2d w(4.0, 6.0);
  CHECK(ss.apply(w)(0) == doctest::Approx(2.0));
  CHECK(ss.apply(w)(1) == doctest::Approx(3.0));
  Eigen::Vector2d wn(-4.0, 6.0);
  CHECK(ss.apply(wn)(0) == doctest::Approx(-2.0));

  CHECK_THROWS_AS(catalog_homeo("octic"), UnknownName);
  CHECK_THROWS_AS(catalog_homeo("parity(x)"), UnknownName);
  CHECK(homeo_names().size() >= 6);
}

TEST_CASE("psi_exp inverse straightens the image curve to the diagonal") {
  const ConicHomeo h = catalog_homeo("psi_exp");
  for (double s : {0.25, 0.5, 0.75, 1.0}) {
    CAPTURE(s);
    const Eigen::Vector2d c = oracles::psi_curve(s);
    const Eigen::VectorXd pre = h.apply_inverse(c);
    CHECK(std::fabs(pre(0) - s) <= 1e-8);
    CHECK(std::fabs(pre(1) - s) <= 1e-8);
  }
}

TEST_CASE("conic modification rewrites the germ through the inverse") {
  const MapGerm ex6 = builtin_catalog("ex6");
  const MapGerm mod = conic_modify(ex6, catalog_homeo("inv_cube"));
  const MapGerm expected =
      parse_germ("map 3 -> 2 { u = x1^2*x3 + x2^3; v = x1^3; }");

  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd x = oracles::ball_point(rng, 3, 0.8);
    REQUIRE((mod.eval(x) - expected.eval(x)).norm() <= 1e-12);
  }
  CHECK(mod.smoothness() == Smoothness::analytic);
  REQUIRE(std::holds_alternative<FamilyModified>(mod.family()));
  const auto& fam = std::get<FamilyModified>(mod.family());
  CHECK(fam.homeo_tag == "inv_cube");
  CHECK(fam.base->target_dim() == 2);
}

TEST_CASE("modification soundness: h recovers the original image") {
  std::mt19937_64 rng(13);
  const struct {
    MapGerm g;
    std::string homeo;
  } cases[] = {
      {builtin_catalog("parabola"), "sqrt_sign"},
      {builtin_catalog("ex6"), "inv_cube"},
      {builtin_ldm(2, 3, kStandardLambda), "parity(2,3)"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.homeo);
    const ConicHomeo h = catalog_homeo(c.homeo);
    const MapGerm mod = conic_modify(c.g, h);
    if (c.homeo != "inv_cube") CHECK(mod.smoothness() == Smoothness::finite_class);
    for (int i = 0; i < 100; ++i) {
      const Eigen::VectorXd x = oracles::ball_point(rng, c.g.source_dim(), 0.3);
      const Eigen::VectorXd fx = c.g.eval(x);
      const Eigen::VectorXd hfx = h.apply(mod.eval(x));
      REQUIRE((fx - hfx).norm() <= 1e-9 * (1.0 + fx.norm()));
    }
  }

  // Target dimension must match the homeomorphism's.
  CHECK_THROWS_AS(conic_modify(builtin_catalog("nondreg4"), catalog_homeo("cube")),
                  PreconditionError);
}

TEST_CASE("xi_h projects along homeomorphism images of rays") {
  const ConicHomeo id = catalog_homeo("identity");
  Eigen::Vector2d y(3.0, 4.0);
  const Eigen::VectorXd p = xi_h(id, y, 0.3);
  CHECK(p(0) == doctest::Approx(0.3 * 0.6));
  CHECK(p(1) == doctest::Approx(0.3 * 0.8));

  // eta <= 0 falls back to the homeomorphism's own collar width.
  const Eigen::VectorXd q = xi_h(id, y);
  CHECK(q.norm() == doctest::Approx(id.eta));

  const ConicHomeo cube = catalog_homeo("cube");
  Eigen::Vector2d z(0.0, 8.0);
  const Eigen::VectorXd r = xi_h(cube, z, 0.25);
  CHECK(r(0) == doctest::Approx(0.0));
  CHECK(r(1) == doctest::Approx(0.015625));

  Eigen::Vector2d tiny(1e-16, 0.0);
  CHECK_THROWS_AS(xi_h(id, tiny, 0.25), DomainError);
}

TEST_CASE("linearization verdicts for the image discriminants") {
  SamplingPlan plan;

  SUBCASE("sqrt_sign straightens the parabola discriminant") {
    const MapGerm g = builtin_catalog("parabola");
    const BallConfig cfg = default_ball(g, 0.5);
    const DiscriminantModel model = discriminant_sample(g, cfg, plan);
    const ConicHomeo h = catalog_homeo("sqrt_sign");
    const LinearizationReport rep = is_linearization(h, g, model);
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.points_used > 0);
    CHECK(rep.max_perp_residual < 1e-4 * rep.eta);
    CHECK(!rep.ray_directions.empty());
  }

  SUBCASE("cube bends it instead") {
    const MapGerm g = builtin_catalog("parabola");
    const BallConfig cfg = default_ball(g, 0.5);
    const DiscriminantModel model = discriminant_sample(g, cfg, plan);
    const LinearizationReport rep =
        is_linearization(catalog_homeo("cube"), g, model);
    CHECK(rep.verdict == Verdict::fail);
  }

  SUBCASE("psi_exp straightens the flat image curve") {
    const MapGerm g = builtin_psi(3);
    const BallConfig cfg = default_ball(g, 0.5);
    const DiscriminantModel model = discriminant_sample(g, cfg, plan);
    const LinearizationReport rep =
        is_linearization(catalog_homeo("psi_exp"), g, model);
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.points_used > 0);
  }

  SUBCASE("ex6 pullback misses the collar: vacuous pass") {
    const MapGerm g = builtin_catalog("ex6");
    const BallConfig cfg = default_ball(g, 0.5);
    const DiscriminantModel model = discriminant_sample(g, cfg, plan);
    const LinearizationReport rep =
        is_linearization(catalog_homeo("inv_cube"), g, model);
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.points_used == 0);
  }
}

TEST_CASE("d_h-regularity across the modified catalog") {
  SamplingPlan plan;

  SUBCASE("ex6 becomes regular under inv_cube") {
    const MapGerm g = builtin_catalog("ex6");
    const RegularityReport rep =
        d_h_regular(g, catalog_homeo("inv_cube"), default_ball(g, 0.5), plan);
    CHECK(rep.verdict == Verdict::pass);
    CHECK(rep.witnesses.empty());
  }

  SUBCASE("parabola under sqrt_sign") {
    const MapGerm g = builtin_catalog("parabola");
    const RegularityReport rep =
        d_h_regular(g, catalog_homeo("sqrt_sign"), default_ball(g, 0.5), plan);
    CHECK(rep.verdict == Verdict::pass);
  }

  SUBCASE("flat family under psi_exp") {
    const MapGerm g = builtin_psi(3);
    const RegularityReport rep =
        d_h_regular(g, catalog_homeo("psi_exp"), default_ball(g, 0.5), plan);
    CHECK(rep.verdict == Verdict::pass);
  }

  SUBCASE("parity modifications of the mixed-degree family") {
    const MapGerm g23 = builtin_ldm(2, 3, kStandardLambda);
    const RegularityReport a = d_h_regular(g23, catalog_homeo("parity(2,3)"),
                                           default_ball(g23, 0.5), plan);
    CHECK(a.verdict == Verdict::pass);
    CHECK(a.witnesses.empty());

    const MapGerm g33 = builtin_ldm(3, 3, kStandardLambda);
    const RegularityReport b = d_h_regular(g33, catalog_homeo("parity(3,3)"),
                                           default_ball(g33, 0.5), plan);
    CHECK(b.verdict == Verdict::pass);
  }

  SUBCASE("a failed non-vacuous linearization is a precondition error") {
    const MapGerm g = builtin_catalog("parabola");
    CHECK_THROWS_AS(
        d_h_regular(g, catalog_homeo("cube"), default_ball(g, 0.5), plan),
        PreconditionError);
  }
}
