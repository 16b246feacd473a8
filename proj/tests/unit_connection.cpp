#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "milnorlab/connection.hpp"
#include "milnorlab/errors.hpp"
#include "milnorlab/germ.hpp"
#include "milnorlab/parser.hpp"
#include "oracles.hpp"

using namespace milnorlab;

namespace {
Eigen::VectorXd vec3(double a, double b, double c) {
  Eigen::VectorXd v(3);
  v << a, b, c;
  return v;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}
}  // namespace

TEST_CASE("vertical and horizontal spaces split the tangent space") {
  const MapGerm f = parse_germ("map 3 -> 2 { u = x1 + x3; v = x2; }");
  ConnectionSpec euclid{f, {}, {}};

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd x = oracles::ball_point(rng, 3, 1.0);
    const Eigen::MatrixXd V = vertical_space(euclid, x);
    const Eigen::MatrixXd H = horizontal_space(euclid, x);
    REQUIRE(V.cols() == 1);
    REQUIRE(H.cols() == 2);
    const Eigen::MatrixXd Df = f.jacobian(x);
    CHECK((Df * V).norm() <= 1e-10);
    CHECK((V.transpose() * H).norm() <= 1e-10);
    CHECK((V.transpose() * V - Eigen::MatrixXd::Identity(1, 1)).norm() <= 1e-10);
  }

  // A diagonal metric tilts the horizontal space to the G-orthogonal
  // complement: for G = diag(1,1,4) it is spanned by (1,0,1/4) and e2.
  ConnectionSpec weighted{f,
                          [](const Eigen::VectorXd&) {
                            Eigen::MatrixXd G = Eigen::MatrixXd::Identity(3, 3);
                            G(2, 2) = 4.0;
                            return G;
                          },
                          {}};
  const Eigen::VectorXd x0 = vec3(0.1, -0.2, 0.3);
  const Eigen::MatrixXd V = vertical_space(weighted, x0);
  const Eigen::MatrixXd H = horizontal_space(weighted, x0);
  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(3, 3);
  G(2, 2) = 4.0;
  CHECK((V.transpose() * G * H).norm() <= 1e-10);
  // And it is genuinely different from the Euclidean complement.
  CHECK((V.transpose() * H).norm() > 1e-3);
}

TEST_CASE("rank drops are refused") {
  const MapGerm g = builtin_ldm(2, 2, {{2.0, 1.0}, {-1.0, 1.0}, {0.0, -1.0}});
  ConnectionSpec c{g, {}, {}};
  CHECK_THROWS_AS(vertical_space(c, vec3(0.0, 0.0, 0.0)), NotSubmersion);
  CHECK_THROWS_AS(horizontal_space(c, vec3(0.0, 0.0, 0.0)), NotSubmersion);
}

TEST_CASE("base curves hit their anchors") {
  const BaseCurve seg = segment_curve(vec2(0.1, 0.1), vec2(0.3, 0.5));
  CHECK((seg.at(seg.t0) - vec2(0.1, 0.1)).norm() <= 1e-15);
  CHECK((seg.at(seg.t1) - vec2(0.3, 0.5)).norm() <= 1e-15);
  CHECK((seg.velocity(0.5) - vec2(0.2, 0.4)).norm() <= 1e-12);

  const BaseCurve circ = circle_curve(vec2(1.0, 2.0), 0.5);
  CHECK((circ.at(0.0) - vec2(1.5, 2.0)).norm() <= 1e-12);
  CHECK((circ.at(0.25) - vec2(1.0, 2.5)).norm() <= 1e-12);
  CHECK((circ.at(1.0) - circ.at(0.0)).norm() <= 1e-12);
  const Eigen::VectorXd v0 = circ.velocity(0.0);
  CHECK(v0(0) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(v0(1) == doctest::Approx(2.0 * M_PI * 0.5));
}

TEST_CASE("horizontal lift of a coordinate projection is a translation") {
  const MapGerm f = builtin_catalog("projection");
  ConnectionSpec c{f, {}, {}};
  const BaseCurve seg = segment_curve(vec2(0.1, 0.1), vec2(0.3, 0.5));
  const Eigen::VectorXd x0 = vec3(0.1, 0.1, 0.7);

  const LiftResult res = horizontal_lift(c, seg, x0);
  REQUIRE(res.completed);
  REQUIRE(!res.x.empty());
  CHECK(res.max_defect <= 1e-6);
  CHECK((res.x.back() - vec3(0.3, 0.5, 0.7)).norm() <= 1e-8);

  const Eigen::VectorXd end = fiber_translation(c, seg, x0);
  CHECK((end - vec3(0.3, 0.5, 0.7)).norm() <= 1e-8);

  // The start must sit over the curve's starting point.
  CHECK_THROWS_AS(horizontal_lift(c, seg, vec3(0.2, 0.1, 0.7)), PreconditionError);
}

TEST_CASE("a cross-term metric steers the lift off the coordinate plane") {
  const MapGerm g = parse_germ("map 2 -> 1 { u = x1; }");
  ConnectionSpec c{g,
                   [](const Eigen::VectorXd&) {
                     Eigen::MatrixXd G(2, 2);
                     G << 1.0, 0.5, 0.5, 1.0;
                     return G;
                   },
                   {}};
  // H = G^{-1} Dg^T is parallel to (1, -1/2), so lifting u from 0.1 to 0.4
  // moves v by -0.15.
  const BaseCurve seg = segment_curve(vec1(0.1), vec1(0.4));
  const Eigen::VectorXd end = fiber_translation(c, seg, vec2(0.1, 0.5));
  CHECK(end(0) == doctest::Approx(0.4).epsilon(1e-8));
  CHECK(end(1) == doctest::Approx(0.35).epsilon(1e-8));
}

TEST_CASE("composition substitutes inner components into outer trees") {
  const MapGerm inner = builtin_catalog("projection");
  const MapGerm outer = parse_germ("map 2 -> 1 { u = x1 + x2^2; }");
  const MapGerm comp = compose_germ(outer, inner);
  CHECK(comp.source_dim() == 3);
  CHECK(comp.target_dim() == 1);

  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd x = oracles::ball_point(rng, 3, 1.0);
    const Eigen::VectorXd expect = outer.eval(inner.eval(x));
    REQUIRE((comp.eval(x) - expect).norm() <= 1e-12);
  }
}

TEST_CASE("composed connections agree with two-stage lifting") {
  const MapGerm f = parse_germ("map 3 -> 2 { u = x1 + x3; v = x2; }");
  const MapGerm g = parse_germ("map 2 -> 1 { u = x1; }");
  const BaseCurve seg = segment_curve(vec1(0.2), vec1(0.45));
  const std::vector<Eigen::VectorXd> starts = {
      vec3(0.1, 0.0, 0.1), vec3(0.2, 0.3, 0.0), vec3(0.05, -0.2, 0.15)};

  SUBCASE("euclidean metrics") {
    ConnectionSpec cf{f, {}, {}};
    ConnectionSpec cg{g, {}, {}};

    const FrameField frame = composed_connection(cf, cg);
    const Eigen::MatrixXd F = frame(starts[0]);
    CHECK(F.rows() == 3);
    CHECK(F.cols() == 1);
    CHECK(vertical_space(cf, starts[0]).cols() == 1);
    CHECK(horizontal_space(cf, starts[0]).cols() == 2);

    const CompositionProbe probe =
        composition_lemma_probe(cf, cg, seg, starts);
    CHECK(probe.verdict == Verdict::pass);
    CHECK(probe.starts == 3);
    CHECK(probe.completed == 3);
    CHECK(probe.sup_error <= 1e-5);
    CHECK(probe.min_sigma > 1e-8);
  }

  SUBCASE("diagonal metric upstairs") {
    ConnectionSpec cf{f,
                      [](const Eigen::VectorXd&) {
                        Eigen::MatrixXd G = Eigen::MatrixXd::Identity(3, 3);
                        G(0, 0) = 2.0;
                        G(2, 2) = 5.0;
                        return G;
                      },
                      {}};
    ConnectionSpec cg{g, {}, {}};
    const CompositionProbe probe =
        composition_lemma_probe(cf, cg, seg, starts);
    CHECK(probe.verdict == Verdict::pass);
    CHECK(probe.completed == 3);
    CHECK(probe.sup_error <= 1e-5);
    CHECK(probe.min_sigma > 1e-8);
  }
}

TEST_CASE("an incomplete lift surfaces as a step failure") {
  const MapGerm f = parse_germ("map 3 -> 2 { u = x1^2 + x1; v = x2; }");
  ConnectionSpec c{f, {}, {}};
  // Pushing u below -1/4 drags x1 into the rank drop at x1 = -1/2.
  const BaseCurve seg = segment_curve(vec2(0.0, 0.0), vec2(-0.3, 0.0));
  const Eigen::VectorXd x0 = vec3(0.0, 0.0, 0.0);

  const LiftResult res = horizontal_lift(c, seg, x0);
  CHECK(!res.completed);
  CHECK_THROWS_AS(fiber_translation(c, seg, x0), StepFailure);
}
