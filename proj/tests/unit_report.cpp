#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <random>
#include <string>

#include "json.hpp"
#include "milnorlab/ball.hpp"
#include "milnorlab/critical_locus.hpp"
#include "milnorlab/errors.hpp"
#include "milnorlab/fiber_probe.hpp"
#include "milnorlab/flow.hpp"
#include "milnorlab/germ.hpp"
#include "milnorlab/regularity.hpp"
#include "milnorlab/report_io.hpp"

using namespace milnorlab;

namespace {
const std::vector<std::pair<double, double>> kStandardLambda = {
    {2.0, 1.0}, {-1.0, 1.0}, {0.0, -1.0}};

std::string first_line(const std::string& s) {
  return s.substr(0, s.find('\n'));
}
}  // namespace

TEST_CASE("number spellings are canonical and round-trip") {
  CHECK(format_g17(0.5) == "0.5");
  CHECK(format_g17(0.0) == "0");
  CHECK(format_g17(-2.0) == "-2");

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(u(rng), static_cast<int>(rng() % 40) - 20);
    CAPTURE(v);
    REQUIRE(std::strtod(format_g17(v).c_str(), nullptr) == v);
    REQUIRE(std::strtod(format_shortest(v).c_str(), nullptr) == v);
    REQUIRE(format_shortest(v).size() <= format_g17(v).size() + 1);
  }
}

TEST_CASE("csv headers name their columns") {
  SamplingPlan plan;
  const MapGerm g = builtin_psi(3);
  const BallConfig cfg = default_ball(g, 0.5);
  const DiscriminantModel model = discriminant_sample(g, cfg, plan);

  const std::string dcsv = discriminant_csv(model);
  CHECK(first_line(dcsv) == "branch,s,u1,u2");
  CHECK(dcsv.find("\ncurve,") != std::string::npos);
  CHECK(dcsv.find("\naxis,") != std::string::npos);
  CHECK(dcsv.find("\nsample,") != std::string::npos);

  // The image curve grid carries the exact corner value at s = 1.
  const std::string corner = "," + format_g17(std::exp(-1.0)) + "," +
                             format_g17(std::exp(-1.0 / 3.0));
  CHECK(dcsv.find(corner) != std::string::npos);

  const auto crit = sample_critical_set(g, cfg, plan);
  const std::string ccsv = critical_csv(crit, 3, 2);
  CHECK(first_line(ccsv) == "x1,x2,x3,u1,u2,defect");

  const MapGerm ldm = builtin_ldm(2, 2, kStandardLambda);
  Eigen::VectorXd x0(3);
  x0 << 0.05, 0.03, 0.01;
  const FlowTrace tr = flow_to_sphere(ldm, x0, 0.5);
  const std::string fcsv = flow_csv(tr);
  CHECK(first_line(fcsv) == "t,x1,x2,x3,phi1,phi2,norm_x,norm_f");
  CHECK(fcsv.find("nan") == std::string::npos);

  SamplingPlan small;
  small.points = 256;
  Eigen::VectorXd target(2);
  target << 0.07, 0.0475;
  const FiberCloud cloud = sample_fiber(ldm, target, 0.4, small);
  const std::string pcsv = fiber_csv(cloud);
  CHECK(first_line(pcsv) == "x1,x2,x3");
}

TEST_CASE("regularity reports serialize to parseable json") {
  SamplingPlan plan;
  const MapGerm g = builtin_ldm(2, 2, kStandardLambda);
  const BallConfig cfg = default_ball(g, 0.5);
  const RegularityReport rep = d_regular(g, cfg, plan);

  const std::string body = regularity_json(g, cfg, rep);
  CHECK(body.find("\"milnorlab\": 1") != std::string::npos);

  const nlohmann::json doc = nlohmann::json::parse(body);
  CHECK(doc.at("milnorlab").get<int>() == 1);
  CHECK(doc.at("verdict").get<std::string>() == "pass");
  CHECK(doc.at("method").get<std::string>() == "both");
  CHECK(doc.at("cfg").at("eps").get<double>() == 0.5);
  CHECK(doc.at("cfg").at("eps0").get<double>() > 0.0);
  CHECK(doc.at("cfg").at("delta").get<double>() == cfg.delta);
  CHECK(doc.at("sampling").at("seed").get<std::uint64_t>() == plan.seed);
  CHECK(doc.at("witnesses").is_array());

  // Byte determinism: the same inputs print the same bytes.
  CHECK(regularity_json(g, cfg, rep) == body);

  // Witness coordinates survive the round trip.
  const MapGerm bad = builtin_catalog("ex6");
  const BallConfig bcfg = default_ball(bad, 0.5);
  const RegularityReport brep = d_regular(bad, bcfg, plan);
  const nlohmann::json bdoc = nlohmann::json::parse(regularity_json(bad, bcfg, brep));
  REQUIRE(bdoc.at("verdict").get<std::string>() == "fail");
  REQUIRE(!bdoc.at("witnesses").empty());
  const auto& w = bdoc.at("witnesses").at(0);
  CHECK(w.at("x").size() == 3);
  CHECK(w.at("sigma_min").is_number());
}

TEST_CASE("svg export draws the plane discriminant") {
  SamplingPlan plan;
  const MapGerm g = builtin_psi(3);
  const BallConfig cfg = default_ball(g, 0.5);
  const DiscriminantModel model = discriminant_sample(g, cfg, plan);

  const std::string plain = discriminant_svg(model);
  CHECK(plain.find("<svg") != std::string::npos);
  CHECK(plain.find("polyline") != std::string::npos);

  const std::string marked = discriminant_svg(model, true);
  CHECK(marked.size() > plain.size());
}

TEST_CASE("file writes fail loudly") {
  CHECK_THROWS_AS(write_text_file("/proc/nonexistent-dir/out.txt", "body"),
                  Error);
}
