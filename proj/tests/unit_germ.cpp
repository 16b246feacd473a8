#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "milnorlab/errors.hpp"
#include "milnorlab/germ.hpp"
#include "milnorlab/parser.hpp"
#include "oracles.hpp"

using namespace milnorlab;

namespace {
const std::vector<std::pair<double, double>> kStandardLambda = {
    {2.0, 1.0}, {-1.0, 1.0}, {0.0, -1.0}};
}

TEST_CASE("ldm builtin evaluates the diagonal quadratic pair") {
  const MapGerm g = builtin_ldm(2, 2, kStandardLambda);
  REQUIRE(g.source_dim() == 3);
  REQUIRE(g.target_dim() == 2);
  Eigen::VectorXd x(3);
  x << 1.0, 1.0, 1.0;
  const Eigen::VectorXd y = g.eval(x);
  CHECK(y(0) == doctest::Approx(1.0));  // 2 - 1 + 0
  CHECK(y(1) == doctest::Approx(1.0));  // 1 + 1 - 1
  const Eigen::MatrixXd J = g.jacobian(x);
  CHECK(J(0, 0) == doctest::Approx(4.0));
  CHECK(J(0, 1) == doctest::Approx(-2.0));
  CHECK(J(0, 2) == doctest::Approx(0.0));
  CHECK(J(1, 0) == doctest::Approx(2.0));
  CHECK(J(1, 1) == doctest::Approx(2.0));
  CHECK(J(1, 2) == doctest::Approx(-2.0));
}

TEST_CASE("ldm mixed exponents follow (p, q)") {
  const MapGerm g = builtin_ldm(2, 3, kStandardLambda);
  Eigen::VectorXd x(3);
  x << 0.5, -0.5, 0.25;
  const Eigen::VectorXd y = g.eval(x);
  CHECK(y(0) == doctest::Approx(2 * 0.25 - 0.25));
  CHECK(y(1) == doctest::Approx(0.125 - 0.125 - 0.015625));
}

TEST_CASE("weak hyperbolicity is enforced at construction") {
  CHECK_THROWS_AS(builtin_ldm(2, 2, {{2.0, 1.0}, {4.0, 2.0}, {0.0, -1.0}}),
                  HyperbolicityViolation);
  CHECK_THROWS_AS(builtin_ldm(2, 2, {{1.0, 0.0}}), HyperbolicityViolation);
  CHECK_NOTHROW(builtin_ldm(3, 2, {{1.0, 0.0}, {0.0, 1.0}}));
}

TEST_CASE("psi builtin hits its closed-form anchor values") {
  const MapGerm psi = builtin_psi(3);
  REQUIRE(psi.source_dim() == 3);
  REQUIRE(psi.target_dim() == 2);
  REQUIRE(psi.smoothness() == Smoothness::smooth);

  Eigen::VectorXd p1(3), p2(3);
  p1 << 1.0, 0.0, 0.0;
  p2 << 2.0, 0.0, 0.0;

  const Eigen::VectorXd at_p1 = psi.eval(p1);
  CHECK(at_p1(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(at_p1(1) == doctest::Approx(std::exp(-1.0 / 3.0)).epsilon(1e-15));

  // At p2 the first bump is exactly flat and the second sits at its apex.
  const Eigen::VectorXd at_p2 = psi.eval(p2);
  CHECK(at_p2(0) == 0.0);
  CHECK(at_p2(1) == doctest::Approx(std::exp(-0.25)).epsilon(1e-15));

  const MapGerm psi2 = builtin_psi(2);
  Eigen::VectorXd h(2);
  h << 0.5, 0.0;
  const Eigen::VectorXd y = psi2.eval(h);
  CHECK(y(0) == doctest::Approx(std::exp(-1.0 / 0.75)).epsilon(1e-15));
  CHECK(y(1) == doctest::Approx(std::exp(-1.0 / 1.75)).epsilon(1e-15));
}

TEST_CASE("psi gradient matches -(2/a^2) f (x - center) away from the gluing") {
  const MapGerm psi = builtin_psi(3);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-0.25, 0.25);
  int tested = 0;
  for (int trial = 0; trial < 400 && tested < 100; ++trial) {
    Eigen::VectorXd x(3);
    for (int i = 0; i < 3; ++i) x(i) = unif(rng);
    Eigen::VectorXd d1(3), d2(3);
    d1 = x;
    d1(0) -= 1.0;
    d2 = x;
    d2(0) -= 2.0;
    const double alpha = 1.0 - d1.squaredNorm();
    const double beta = 4.0 - d2.squaredNorm();
    // Stay clearly inside both bumps so no branch boundary interferes.
    if (alpha < 0.05 || beta < 0.05) continue;
    ++tested;
    const Eigen::VectorXd f = psi.eval(x);
    const Eigen::MatrixXd J = psi.jacobian(x);
    const Eigen::VectorXd grad_u = -(2.0 / (alpha * alpha)) * f(0) * d1;
    const Eigen::VectorXd grad_v = -(2.0 / (beta * beta)) * f(1) * d2;
    CHECK((J.row(0).transpose() - grad_u).norm() <=
          1e-8 * std::max(1.0, grad_u.norm()));
    CHECK((J.row(1).transpose() - grad_v).norm() <=
          1e-8 * std::max(1.0, grad_v.norm()));
  }
  CHECK(tested == 100);
}

TEST_CASE("catalog germs evaluate their defining formulas") {
  const MapGerm ex6 = builtin_catalog("ex6");
  Eigen::VectorXd x(3);
  x << 1.0, 1.0, 1.0;
  const Eigen::VectorXd y = ex6.eval(x);
  CHECK(y(0) == doctest::Approx(2.0));  // x^2 z + y^3
  CHECK(y(1) == doctest::Approx(1.0));
  const Eigen::MatrixXd J = ex6.jacobian(x);
  CHECK(J(0, 0) == doctest::Approx(2.0));
  CHECK(J(0, 1) == doctest::Approx(3.0));
  CHECK(J(0, 2) == doctest::Approx(1.0));
  CHECK(J(1, 0) == doctest::Approx(1.0));
  CHECK(J(1, 1) == doctest::Approx(0.0));
  CHECK(J(1, 2) == doctest::Approx(0.0));

  const MapGerm nd4 = builtin_catalog("nondreg4");
  REQUIRE(nd4.source_dim() == 4);
  REQUIRE(nd4.target_dim() == 3);
  Eigen::VectorXd w(4);
  w << 1.0, 2.0, 3.0, 4.0;
  const Eigen::VectorXd yn = nd4.eval(w);
  CHECK(yn(0) == doctest::Approx(1.0 - 4.0 * 3.0));
  CHECK(yn(1) == doctest::Approx(2.0));
  CHECK(yn(2) == doctest::Approx(4.0));

  const MapGerm para = builtin_catalog("parabola");
  Eigen::VectorXd p(3);
  p << 0.5, -0.25, 0.5;
  const Eigen::VectorXd yp = para.eval(p);
  CHECK(yp(0) == doctest::Approx(0.25));
  CHECK(yp(1) == doctest::Approx(0.25 + 0.0625 + 0.125));

  CHECK_THROWS_AS(builtin_catalog("nope"), UnknownName);
  CHECK(catalog_names().size() >= 4);
}

TEST_CASE("jacobians agree with central differences for every catalog germ") {
  std::vector<MapGerm> germs;
  germs.push_back(builtin_ldm(2, 2, kStandardLambda));
  germs.push_back(builtin_ldm(3, 2, kStandardLambda));
  germs.push_back(builtin_psi(3));
  for (const auto& name : catalog_names()) germs.push_back(builtin_catalog(name));

  std::mt19937_64 rng(20240817);
  for (const MapGerm& g : germs) {
    int checked = 0;
    for (int trial = 0; trial < 2000 && checked < 200; ++trial) {
      const Eigen::VectorXd x = oracles::ball_point(rng, g.source_dim(), 0.45);
      Eigen::MatrixXd ad;
      try {
        ad = g.jacobian(x);
      } catch (const BranchBoundary&) {
        continue;
      }
      const Eigen::MatrixXd fd = oracles::fd_jacobian(g, x);
      CHECK(oracles::jacobian_rel_error(ad, fd) <= 1e-6);
      ++checked;
    }
    CHECK(checked == 200);
  }
}

TEST_CASE("germs vanish at the origin by construction") {
  CHECK_THROWS_AS(parse_germ("map 2 -> 1 { u = x1 + 1; }"), Error);
  for (const auto& name : catalog_names()) {
    const MapGerm g = builtin_catalog(name);
    CHECK(g.eval(Eigen::VectorXd::Zero(g.source_dim())).norm() <= 1e-12);
  }
}

TEST_CASE("describe summarizes dimensions and family") {
  const std::string ldm_line = describe(builtin_ldm(2, 2, kStandardLambda));
  CHECK(ldm_line.find("R^3") != std::string::npos);
  CHECK(ldm_line.find("R^2") != std::string::npos);
  CHECK(ldm_line.find("ldm") != std::string::npos);
  const std::string psi_line = describe(builtin_psi(4));
  CHECK(psi_line.find("psi") != std::string::npos);
}

TEST_CASE("builtin URIs survive a pretty round trip") {
  const MapGerm g = builtin_ldm(2, 3, kStandardLambda);
  const MapGerm g2 = parse_germ(pretty(g));
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = oracles::ball_point(rng, 3, 1.0);
    CHECK((g.eval(x) - g2.eval(x)).norm() <= 1e-14);
  }
  CHECK(std::holds_alternative<FamilyLdm>(g2.family()));
}
