// milnorlab: command-line front end over the core library.  Exit codes:
//   0 check passed / command completed
//   1 check failed
//   2 unusable input (flag, URI, file or source parse failure)
//   3 sampling or output failure
//   4 check inconclusive
//   5 flow or lift aborted before completion
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "milnorlab/ball.hpp"
#include "milnorlab/conic.hpp"
#include "milnorlab/connection.hpp"
#include "milnorlab/critical_locus.hpp"
#include "milnorlab/errors.hpp"
#include "milnorlab/flow.hpp"
#include "milnorlab/germ.hpp"
#include "milnorlab/parser.hpp"
#include "milnorlab/regularity.hpp"
#include "milnorlab/report_io.hpp"
#include "uri.hpp"

namespace {

using namespace milnorlab;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitSampling = 3;
constexpr int kExitInconclusive = 4;
constexpr int kExitAbort = 5;

struct Options {
  std::string germ_uri;
  std::string homeo_spec;
  double eps = 0.5;
  double delta = 0.0;  // 0: default_delta for the germ
  double eta = 0.0;    // 0: the homeo's own certified radius
  std::uint64_t seed = 20240817ULL;
  int jobs = 1;
  std::string out;     // output directory; empty: command default
  std::string format;  // comma-separated subset of text,json,csv,svg
  std::vector<std::string> flow_starts;  // flow positionals
  std::string lift_curve;                // lift positional
  std::string lift_start;                // lift positional
};

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::pass: return kExitPass;
    case Verdict::fail: return kExitFail;
    case Verdict::inconclusive: break;
  }
  return kExitInconclusive;
}

const char* termination_name(FlowTermination t) {
  switch (t) {
    case FlowTermination::reached_sphere: return "reached_sphere";
    case FlowTermination::degenerate: return "degenerate";
    case FlowTermination::near_critical: return "near_critical";
    case FlowTermination::step_failure: return "step_failure";
    case FlowTermination::horizon: return "horizon";
  }
  return "unknown";
}

const char* smoothness_name(Smoothness s) {
  switch (s) {
    case Smoothness::analytic: return "analytic";
    case Smoothness::smooth: return "smooth";
    case Smoothness::finite_class: return "finite_class";
  }
  return "unknown";
}

std::string json_str(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string json_vector(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_g17(v(i));
  }
  out += ']';
  return out;
}

std::string json_notes(const std::vector<std::string>& notes, const char* indent) {
  if (notes.empty()) return "[]";
  std::string out = "[\n";
  for (std::size_t i = 0; i < notes.size(); ++i) {
    out += indent;
    out += json_str(notes[i]);
    if (i + 1 < notes.size()) out += ',';
    out += '\n';
  }
  out += indent;
  out.resize(out.size() - 2);  // drop the final two-space step
  out += ']';
  return out;
}

std::set<std::string> parse_formats(const std::string& spec, const char* fallback) {
  std::set<std::string> formats;
  std::stringstream in(spec.empty() ? fallback : spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    if (item != "text" && item != "json" && item != "csv" && item != "svg")
      throw Error("unknown format: " + item + " (expected text, json, csv or svg)");
    formats.insert(item);
  }
  if (formats.empty()) throw Error("empty --format");
  return formats;
}

BallConfig ball_for(const MapGerm& g, const Options& o) {
  BallConfig cfg = default_ball(g, o.eps);
  if (o.delta > 0.0) cfg.delta = o.delta;
  cfg.validate();
  return cfg;
}

SamplingPlan plan_for(const Options& o) {
  SamplingPlan plan;
  plan.seed = o.seed;
  plan.jobs = o.jobs < 1 ? 1 : o.jobs;
  return plan;
}

ConicHomeo homeo_for(const Options& o) {
  if (o.homeo_spec.empty())
    throw Error("this command needs --homeo (catalog name or file)");
  ConicHomeo h = cli::resolve_homeo(o.homeo_spec);
  if (o.eta > 0.0) h.eta = o.eta;
  return h;
}

/// Writes name -> body pairs into dir, creating it first.  Errors (including
/// an uncreatable directory) surface as exit kExitSampling at the call site.
void write_files(const std::string& dir,
                 const std::vector<std::pair<std::string, std::string>>& files) {
  if (files.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  for (const auto& [name, body] : files)
    write_text_file((std::filesystem::path(dir) / name).string(), body);
}

// ---------------------------------------------------------------------------
// describe

std::string family_label(const MapGerm& g) {
  const FamilyTag& tag = g.family();
  if (std::holds_alternative<FamilyLdm>(tag)) {
    const auto& f = std::get<FamilyLdm>(tag);
    return "ldm(" + std::to_string(f.p) + "," + std::to_string(f.q) + ")";
  }
  if (std::holds_alternative<FamilyPsi>(tag))
    return "psi(" + std::to_string(std::get<FamilyPsi>(tag).n) + ")";
  if (std::holds_alternative<FamilyCatalog>(tag))
    return "catalog:" + std::get<FamilyCatalog>(tag).name;
  if (std::holds_alternative<FamilyModified>(tag)) {
    const auto& f = std::get<FamilyModified>(tag);
    return "modified(" + f.homeo_tag + ")";
  }
  return "none";
}

int cmd_describe(const Options& o) {
  const MapGerm g = cli::resolve_germ(o.germ_uri);
  const BallConfig cfg = ball_for(g, o);
  const auto formats = parse_formats(o.format, "text");

  std::string oracle = "no";
  int branch_count = 0;
  try {
    const auto branches = oracle_discriminant(g, cfg);
    branch_count = static_cast<int>(branches.size());
    oracle = "yes";
  } catch (const NoOracle&) {
  }
  const bool is_ldm = std::holds_alternative<FamilyLdm>(g.family());

  std::ostringstream text;
  text << describe(g) << "\n";
  text << "family: " << family_label(g) << "\n";
  text << "smoothness: " << smoothness_name(g.smoothness()) << "\n";
  text << "oracle: " << oracle;
  if (oracle == "yes") text << " (" << branch_count << " branches)";
  text << "\n";
  if (is_ldm)
    text << "hyperbolicity: pass (coefficient pairs pairwise independent)\n";
  text << "eps: " << format_g17(cfg.eps) << "\n";
  text << "delta: " << format_g17(cfg.delta) << "\n";
  text << "definition:\n" << pretty(g);
  if (text.str().back() != '\n') text << "\n";
  if (!o.homeo_spec.empty()) {
    const ConicHomeo h = homeo_for(o);
    text << "homeo: " << h.tag << " (eta " << format_g17(h.eta) << ")\n";
    text << pretty(h);
  }

  std::ostringstream json;
  json << "{\n";
  json << "  \"milnorlab\": 1,\n";
  json << "  \"summary\": " << json_str(describe(g)) << ",\n";
  json << "  \"family\": " << json_str(family_label(g)) << ",\n";
  json << "  \"source_dim\": " << g.source_dim() << ",\n";
  json << "  \"target_dim\": " << g.target_dim() << ",\n";
  json << "  \"smoothness\": " << json_str(smoothness_name(g.smoothness())) << ",\n";
  json << "  \"oracle\": " << (oracle == "yes" ? "true" : "false") << ",\n";
  json << "  \"oracle_branches\": " << branch_count << ",\n";
  if (is_ldm) json << "  \"hyperbolicity\": \"pass\",\n";
  json << "  \"eps\": " << format_g17(cfg.eps) << ",\n";
  json << "  \"delta\": " << format_g17(cfg.delta) << ",\n";
  json << "  \"definition\": " << json_str(pretty(g)) << "\n";
  json << "}\n";

  if (formats.count("text")) std::cout << text.str();
  if (formats.count("json")) std::cout << json.str();

  if (!o.out.empty()) {
    std::vector<std::pair<std::string, std::string>> files;
    if (formats.count("text")) files.emplace_back("describe.txt", text.str());
    if (formats.count("json")) files.emplace_back("describe.json", json.str());
    try {
      write_files(o.out, files);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitSampling;
    }
  }
  return kExitPass;
}

// ---------------------------------------------------------------------------
// discriminant

int cmd_discriminant(const Options& o) {
  const MapGerm g = cli::resolve_germ(o.germ_uri);
  const BallConfig cfg = ball_for(g, o);
  const SamplingPlan plan = plan_for(o);
  const auto formats = parse_formats(o.format, "csv,json");

  DiscriminantModel model;
  std::optional<OracleComparison> cmp;
  try {
    model = discriminant_sample(g, cfg, plan);
    if (!model.branches.empty()) cmp = compare_to_oracle(model);
  } catch (const Error& e) {
    std::cerr << "error: discriminant sampling failed: " << e.what() << "\n";
    return kExitSampling;
  }

  std::ostringstream json;
  json << "{\n";
  json << "  \"milnorlab\": 1,\n";
  json << "  \"germ\": " << json_str(describe(g)) << ",\n";
  json << "  \"eps\": " << format_g17(cfg.eps) << ",\n";
  json << "  \"delta\": " << format_g17(cfg.delta) << ",\n";
  json << "  \"seed\": " << plan.seed << ",\n";
  json << "  \"samples\": " << model.points.size() << ",\n";
  json << "  \"seeds_tried\": " << model.seeds_tried << ",\n";
  json << "  \"branches\": [";
  for (std::size_t i = 0; i < model.branches.size(); ++i) {
    if (i) json << ", ";
    json << json_str(model.branches[i].name);
  }
  json << "],\n";
  if (cmp) {
    json << "  \"coverage\": " << format_g17(cmp->coverage) << ",\n";
    json << "  \"coverage_radius\": " << format_g17(cmp->coverage_radius) << ",\n";
    json << "  \"max_distance\": " << format_g17(cmp->max_distance) << ",\n";
    json << "  \"oracle_points\": " << cmp->oracle_points << ",\n";
  }
  json << "  \"notes\": " << json_notes(model.notes, "    ") << "\n";
  json << "}\n";

  std::vector<std::pair<std::string, std::string>> files;
  if (formats.count("csv")) files.emplace_back("discriminant.csv", discriminant_csv(model));
  if (formats.count("json")) files.emplace_back("discriminant.json", json.str());
  if (formats.count("svg")) {
    if (g.target_dim() != 2) {
      std::cerr << "error: svg output needs a planar target (k = 2)\n";
      return kExitParse;
    }
    const bool psi_markers = std::holds_alternative<FamilyPsi>(g.family());
    files.emplace_back("discriminant.svg", discriminant_svg(model, psi_markers));
  }
  try {
    write_files(o.out.empty() ? "." : o.out, files);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSampling;
  }

  std::cout << "discriminant: " << model.points.size() << " samples, "
            << model.branches.size() << " oracle branches ("
            << model.seeds_tried << " seeds tried)\n";
  if (cmp)
    std::cout << "oracle: coverage " << format_g17(cmp->coverage)
              << " at radius " << format_g17(cmp->coverage_radius)
              << ", max sample distance " << format_g17(cmp->max_distance) << "\n";
  for (const auto& note : model.notes) std::cout << "note: " << note << "\n";
  return kExitPass;
}

// ---------------------------------------------------------------------------
// check

std::string linearization_json(const MapGerm& g, const ConicHomeo& h,
                               const LinearizationReport& rep) {
  std::ostringstream json;
  json << "{\n";
  json << "  \"milnorlab\": 1,\n";
  json << "  \"germ\": " << json_str(describe(g)) << ",\n";
  json << "  \"homeo\": " << json_str(h.tag) << ",\n";
  json << "  \"check\": \"linearization\",\n";
  json << "  \"verdict\": " << json_str(verdict_name(rep.verdict)) << ",\n";
  json << "  \"eta\": " << format_g17(rep.eta) << ",\n";
  json << "  \"max_perp_residual\": " << format_g17(rep.max_perp_residual) << ",\n";
  json << "  \"points_used\": " << rep.points_used << ",\n";
  json << "  \"ray_directions\": [";
  for (std::size_t i = 0; i < rep.ray_directions.size(); ++i) {
    if (i) json << ", ";
    json << json_vector(rep.ray_directions[i]);
  }
  json << "],\n";
  json << "  \"notes\": " << json_notes(rep.notes, "    ") << "\n";
  json << "}\n";
  return json.str();
}

int cmd_check(const Options& o, const std::string& which) {
  const MapGerm g = cli::resolve_germ(o.germ_uri);
  const BallConfig cfg = ball_for(g, o);
  const SamplingPlan plan = plan_for(o);
  parse_formats(o.format, "json");  // validate; the report is always JSON

  std::string json;
  int code = kExitInconclusive;
  try {
    if (which == "transversality") {
      const RegularityReport rep = transversality_property(g, cfg, plan);
      json = regularity_json(g, cfg, rep);
      code = verdict_exit(rep.verdict);
    } else if (which == "dreg") {
      const RegularityReport rep = d_regular(g, cfg, plan);
      json = regularity_json(g, cfg, rep);
      code = verdict_exit(rep.verdict);
    } else if (which == "dhreg") {
      const ConicHomeo h = homeo_for(o);
      try {
        const RegularityReport rep = d_h_regular(g, h, cfg, plan);
        json = regularity_json(g, cfg, rep);
        code = verdict_exit(rep.verdict);
      } catch (const PreconditionError& e) {
        // The prerequisite (h linearizes the discriminant) failed, so
        // d_h-regularity itself was never assessed.
        RegularityReport rep;
        rep.method = "dhreg";
        rep.verdict = Verdict::inconclusive;
        rep.seed = plan.seed;
        rep.notes = {std::string(e.what())};
        json = regularity_json(g, cfg, rep);
        code = kExitInconclusive;
      }
    } else {  // linearization
      const ConicHomeo h = homeo_for(o);
      const DiscriminantModel model = discriminant_sample(g, cfg, plan);
      const LinearizationReport rep = is_linearization(h, g, model);
      json = linearization_json(g, h, rep);
      code = verdict_exit(rep.verdict);
    }
  } catch (const UnknownName&) {
    throw;  // bad --homeo name: exit 2 at the top level
  } catch (const SyntaxError&) {
    throw;
  } catch (const Error& e) {
    std::cerr << "error: check could not be evaluated: " << e.what() << "\n";
    return kExitSampling;
  }

  std::cout << json;
  try {
    write_files(o.out.empty() ? "." : o.out, {{"check_" + which + ".json", json}});
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSampling;
  }
  return code;
}

// ---------------------------------------------------------------------------
// flow

int cmd_flow(const Options& o) {
  const MapGerm g = cli::resolve_germ(o.germ_uri);
  const BallConfig cfg = ball_for(g, o);
  const SamplingPlan plan = plan_for(o);
  parse_formats(o.format, "csv,json");
  const int n = g.source_dim();

  std::vector<Eigen::VectorXd> starts;
  for (const auto& text : o.flow_starts) {
    Eigen::VectorXd x = cli::parse_point(text);
    if (x.size() != n)
      throw Error("start point has " + std::to_string(x.size()) +
                  " coordinates, the germ expects " + std::to_string(n));
    starts.push_back(std::move(x));
  }
  if (starts.empty()) {
    // Default tube starts: four points of the eps/8 sphere off the zero fiber.
    std::mt19937_64 rng(plan.seed ^ 0x666c6f77ULL);
    for (int tries = 0; starts.size() < 4 && tries < 256; ++tries) {
      Eigen::VectorXd x = (cfg.eps / 8.0) * sample_sphere(rng, n);
      try {
        if (g.eval(x).norm() > 1e-12) starts.push_back(std::move(x));
      } catch (const Error&) {
      }
    }
    if (starts.empty()) {
      std::cerr << "error: no usable start point off the zero fiber\n";
      return kExitSampling;
    }
  }

  FlowOptions opts;
  std::vector<std::string> notes;
  try {
    for (const auto& c : sample_critical_set(g, cfg, plan))
      opts.guard_points.push_back(c.x);
  } catch (const Error& e) {
    notes.push_back(std::string("critical-set guard sampling failed: ") + e.what());
  }

  std::vector<FlowTrace> traces;
  traces.reserve(starts.size());
  for (const auto& x0 : starts) traces.push_back(flow_to_sphere(g, x0, cfg.eps, opts));

  std::ostringstream json;
  json << "{\n";
  json << "  \"milnorlab\": 1,\n";
  json << "  \"germ\": " << json_str(describe(g)) << ",\n";
  json << "  \"eps\": " << format_g17(cfg.eps) << ",\n";
  json << "  \"seed\": " << plan.seed << ",\n";
  json << "  \"guard_points\": " << opts.guard_points.size() << ",\n";
  json << "  \"flows\": [\n";
  bool all_reached = true;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const FlowTrace& tr = traces[i];
    const bool reached = tr.termination == FlowTermination::reached_sphere;
    all_reached = all_reached && reached;
    const Eigen::VectorXd& xe = tr.samples.empty() ? starts[i] : tr.samples.back().x;
    json << "    {\n";
    json << "      \"start\": " << json_vector(starts[i]) << ",\n";
    json << "      \"termination\": " << json_str(termination_name(tr.termination)) << ",\n";
    json << "      \"endpoint\": " << json_vector(xe) << ",\n";
    json << "      \"endpoint_radius\": " << format_g17(xe.norm()) << ",\n";
    json << "      \"phi_drift\": " << format_g17(tr.phi_drift) << ",\n";
    json << "      \"norm_x_monotone\": " << (tr.norm_x_monotone ? "true" : "false") << ",\n";
    json << "      \"samples\": " << tr.samples.size() << ",\n";
    json << "      \"message\": " << json_str(tr.message) << "\n";
    json << "    }" << (i + 1 < traces.size() ? "," : "") << "\n";
  }
  json << "  ],\n";
  json << "  \"notes\": " << json_notes(notes, "    ") << "\n";
  json << "}\n";

  std::vector<std::pair<std::string, std::string>> files;
  const auto formats = parse_formats(o.format, "csv,json");
  if (formats.count("csv"))
    for (std::size_t i = 0; i < traces.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "flow_%03zu.csv", i);
      files.emplace_back(name, flow_csv(traces[i]));
    }
  if (formats.count("json")) files.emplace_back("flow.json", json.str());
  try {
    write_files(o.out.empty() ? "." : o.out, files);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSampling;
  }

  for (std::size_t i = 0; i < traces.size(); ++i) {
    const FlowTrace& tr = traces[i];
    const double re = tr.samples.empty() ? starts[i].norm() : tr.samples.back().x.norm();
    std::cout << "flow " << i << ": " << termination_name(tr.termination)
              << ", |x| = " << format_g17(re)
              << ", phi drift " << format_g17(tr.phi_drift) << "\n";
    if (!tr.message.empty() && tr.termination != FlowTermination::reached_sphere)
      std::cout << "  " << tr.message << "\n";
  }
  return all_reached ? kExitPass : kExitAbort;
}

// ---------------------------------------------------------------------------
// lift

BaseCurve curve_from_spec(const std::string& spec, const MapGerm& g,
                          const Eigen::VectorXd& x0) {
  const int k = g.target_dim();
  if (spec == "constant") {
    const Eigen::VectorXd y0 = g.eval(x0);
    return segment_curve(y0, y0);
  }
  if (spec.rfind("segment:", 0) == 0) {
    const std::string body = spec.substr(8);
    const auto arrow = body.find("->");
    if (arrow == std::string::npos)
      throw Error("segment curve needs the form segment:a1,a2,...->b1,b2,...");
    const Eigen::VectorXd a = cli::parse_point(body.substr(0, arrow));
    const Eigen::VectorXd b = cli::parse_point(body.substr(arrow + 2));
    if (a.size() != k || b.size() != k)
      throw Error("segment endpoints must have " + std::to_string(k) + " coordinates");
    return segment_curve(a, b);
  }
  if (spec.rfind("circle:", 0) == 0) {
    const std::string body = spec.substr(7);
    const auto colon = body.rfind(':');
    if (colon == std::string::npos)
      throw Error("circle curve needs the form circle:c1,c2:radius");
    const Eigen::VectorXd c = cli::parse_point(body.substr(0, colon));
    const Eigen::VectorXd r = cli::parse_point(body.substr(colon + 1));
    if (c.size() != k || k != 2 || r.size() != 1)
      throw Error("circle curves live in a planar target (k = 2)");
    return circle_curve(c, r(0));
  }
  throw Error("unknown curve spec: " + spec +
              " (expected constant, segment:...->..., or circle:c1,c2:r)");
}

int cmd_lift(const Options& o) {
  const MapGerm g = cli::resolve_germ(o.germ_uri);
  parse_formats(o.format, "csv,json");
  const Eigen::VectorXd x0 = cli::parse_point(o.lift_start);
  if (x0.size() != g.source_dim())
    throw Error("start point has " + std::to_string(x0.size()) +
                " coordinates, the germ expects " + std::to_string(g.source_dim()));
  const BaseCurve curve = curve_from_spec(o.lift_curve, g, x0);

  const ConnectionSpec conn{g, {}, {}};
  LiftResult res;
  try {
    res = horizontal_lift(conn, curve, x0);
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;  // the start does not lie over the curve start
  } catch (const Error& e) {
    std::cerr << "error: lift aborted: " << e.what() << "\n";
    return kExitAbort;
  }

  std::ostringstream csv;
  csv << "t";
  for (int j = 1; j <= g.source_dim(); ++j) csv << ",x" << j;
  csv << "\n";
  for (std::size_t i = 0; i < res.t.size(); ++i) {
    csv << format_g17(res.t[i]);
    for (int j = 0; j < res.x[i].size(); ++j) csv << "," << format_g17(res.x[i](j));
    csv << "\n";
  }

  const Eigen::VectorXd& xe = res.x.empty() ? x0 : res.x.back();
  std::ostringstream json;
  json << "{\n";
  json << "  \"milnorlab\": 1,\n";
  json << "  \"germ\": " << json_str(describe(g)) << ",\n";
  json << "  \"curve\": " << json_str(o.lift_curve) << ",\n";
  json << "  \"start\": " << json_vector(x0) << ",\n";
  json << "  \"completed\": " << (res.completed ? "true" : "false") << ",\n";
  json << "  \"endpoint\": " << json_vector(xe) << ",\n";
  json << "  \"displacement\": " << format_g17((xe - x0).norm()) << ",\n";
  json << "  \"max_defect\": " << format_g17(res.max_defect) << ",\n";
  json << "  \"message\": " << json_str(res.message) << "\n";
  json << "}\n";

  std::vector<std::pair<std::string, std::string>> files;
  const auto formats = parse_formats(o.format, "csv,json");
  if (formats.count("csv")) files.emplace_back("lift.csv", csv.str());
  if (formats.count("json")) files.emplace_back("lift.json", json.str());
  try {
    write_files(o.out.empty() ? "." : o.out, files);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSampling;
  }

  std::cout << "lift: " << (res.completed ? "completed" : "aborted")
            << ", endpoint " << json_vector(xe)
            << ", displacement " << format_g17((xe - x0).norm())
            << ", max defect " << format_g17(res.max_defect) << "\n";
  if (!res.message.empty() && !res.completed) std::cout << "  " << res.message << "\n";
  return res.completed ? kExitPass : kExitAbort;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"numerical probes for Milnor-type fibrations of real map germs"};
  app.require_subcommand(1);

  const auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--germ", o.germ_uri,
                    "germ URI: psi:N | ldm:p,q:(a,b),... | catalog:name | file")
        ->required();
    sub->add_option("--homeo", o.homeo_spec, "target homeo: catalog name or file");
    sub->add_option("--eps", o.eps, "source ball radius")->capture_default_str();
    sub->add_option("--delta", o.delta, "target disc radius (default: per-germ heuristic)");
    sub->add_option("--eta", o.eta, "homeo target-ball radius override");
    sub->add_option("--seed", o.seed, "sampling seed")->capture_default_str();
    sub->add_option("--jobs", o.jobs, "worker threads")->capture_default_str();
    sub->add_option("--out", o.out, "output directory (default: .)");
    sub->add_option("--format", o.format, "comma-separated outputs: text,json,csv,svg");
  };

  CLI::App* describe_cmd = app.add_subcommand("describe", "summarize a germ");
  add_common(describe_cmd);

  CLI::App* disc_cmd =
      app.add_subcommand("discriminant", "sample the discriminant and export it");
  add_common(disc_cmd);

  CLI::App* check_cmd = app.add_subcommand("check", "run a regularity check");
  std::string which;
  check_cmd
      ->add_option("which", which,
                   "one of: transversality, dreg, dhreg, linearization")
      ->required()
      ->check(CLI::IsMember({"transversality", "dreg", "dhreg", "linearization"}));
  add_common(check_cmd);

  CLI::App* flow_cmd =
      app.add_subcommand("flow", "integrate the radial field out to the sphere");
  add_common(flow_cmd);
  flow_cmd->add_option("starts", o.flow_starts,
                       "start points as x1,x2,... (default: sampled tube points)");

  CLI::App* lift_cmd =
      app.add_subcommand("lift", "horizontally lift a target curve");
  add_common(lift_cmd);
  lift_cmd
      ->add_option("curve", o.lift_curve,
                   "constant | segment:a1,a2,...->b1,b2,... | circle:c1,c2:r")
      ->required();
  lift_cmd->add_option("start", o.lift_start, "lift start point x1,x2,...")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (app.got_subcommand(describe_cmd)) return cmd_describe(o);
    if (app.got_subcommand(disc_cmd)) return cmd_discriminant(o);
    if (app.got_subcommand(check_cmd)) return cmd_check(o, which);
    if (app.got_subcommand(flow_cmd)) return cmd_flow(o);
    if (app.got_subcommand(lift_cmd)) return cmd_lift(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitSampling;
  }
  return kExitParse;
}
