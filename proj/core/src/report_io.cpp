#include "milnorlab/report_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "milnorlab/errors.hpp"
#include "milnorlab/parser.hpp"

namespace milnorlab {

namespace {

void append_vector_csv(std::string& out, const Eigen::VectorXd& v) {
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_g17(v(i));
  }
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string json_number_array(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_g17(v(i));
  }
  out += "]";
  return out;
}

std::string svg_coord(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string discriminant_csv(const DiscriminantModel& model) {
  const int k = model.points.empty()
                    ? (model.branches.empty() ? 2
                                              : static_cast<int>(
                                                    model.branches.front().at(0.0).size()))
                    : static_cast<int>(model.points.front().image.size());
  std::string out = "branch,s";
  for (int i = 1; i <= k; ++i) out += ",u" + std::to_string(i);
  out += '\n';
  for (const auto& br : model.branches) {
    for (double t : br.grid) {
      out += br.name;
      out += ',';
      out += format_g17(t);
      out += ',';
      append_vector_csv(out, br.at(t));
      out += '\n';
    }
  }
  for (size_t i = 0; i < model.points.size(); ++i) {
    out += "sample,";
    out += std::to_string(i);
    out += ',';
    append_vector_csv(out, model.points[i].image);
    out += '\n';
  }
  return out;
}

std::string critical_csv(const std::vector<CriticalSample>& points, int n, int k) {
  std::string out;
  for (int i = 1; i <= n; ++i) out += (i == 1 ? "x" : ",x") + std::to_string(i);
  for (int i = 1; i <= k; ++i) out += ",u" + std::to_string(i);
  out += ",defect\n";
  for (const auto& p : points) {
    append_vector_csv(out, p.x);
    out += ',';
    append_vector_csv(out, p.image);
    out += ',';
    out += std::to_string(p.defect);
    out += '\n';
  }
  return out;
}

std::string flow_csv(const FlowTrace& trace) {
  const int n = trace.samples.empty() ? 0 : static_cast<int>(trace.samples.front().x.size());
  const int k =
      trace.samples.empty() ? 0 : static_cast<int>(trace.samples.front().phi.size());
  std::string out = "t";
  for (int i = 1; i <= n; ++i) out += ",x" + std::to_string(i);
  for (int i = 1; i <= k; ++i) out += ",phi" + std::to_string(i);
  out += ",norm_x,norm_f\n";
  for (const auto& s : trace.samples) {
    out += format_g17(s.t);
    out += ',';
    append_vector_csv(out, s.x);
    out += ',';
    append_vector_csv(out, s.phi);
    out += ',';
    out += format_g17(s.norm_x);
    out += ',';
    out += format_g17(s.norm_f);
    out += '\n';
  }
  return out;
}

std::string fiber_csv(const FiberCloud& cloud) {
  const int n = cloud.points.empty() ? 0 : static_cast<int>(cloud.points.front().size());
  std::string out;
  for (int i = 1; i <= n; ++i) out += (i == 1 ? "x" : ",x") + std::to_string(i);
  if (n == 0) out += "x1";
  out += '\n';
  for (const auto& p : cloud.points) {
    append_vector_csv(out, p);
    out += '\n';
  }
  return out;
}

std::string regularity_json(const MapGerm& g, const BallConfig& cfg,
                            const RegularityReport& report) {
  std::string out = "{\n  \"milnorlab\": 1,\n";
  out += "  \"germ\": \"" + json_escape(pretty(g)) + "\",\n";
  out += "  \"cfg\": {\"eps0\": " + format_g17(cfg.eps0) +
         ", \"eps\": " + format_g17(cfg.eps) + ", \"delta\": " + format_g17(cfg.delta);
  if (cfg.eta) out += ", \"eta\": " + format_g17(*cfg.eta);
  out += "},\n";
  out += "  \"method\": \"" + json_escape(report.method) + "\",\n";
  out += "  \"verdict\": \"" + std::string(verdict_name(report.verdict)) + "\",\n";
  out += "  \"witnesses\": [";
  for (size_t i = 0; i < report.witnesses.size(); ++i) {
    const Witness& w = report.witnesses[i];
    if (i) out += ",";
    out += "\n    {\"x\": " + json_number_array(w.x) +
           ", \"theta_or_y\": " + json_number_array(w.theta_or_y) +
           ", \"sigma_min\": " + format_g17(w.sigma_min) +
           ", \"residual\": " + format_g17(w.residual) + "}";
  }
  out += report.witnesses.empty() ? "],\n" : "\n  ],\n";
  out += "  \"sampling\": {\"seed\": " + std::to_string(report.seed) +
         ", \"directions\": " + std::to_string(report.directions_scanned) +
         ", \"points\": " + std::to_string(report.points_scanned) +
         ", \"excluded\": " + std::to_string(report.excluded) +
         ", \"empty\": " + std::to_string(report.empty_count) + "},\n";
  out += "  \"notes\": [";
  for (size_t i = 0; i < report.notes.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + json_escape(report.notes[i]) + "\"";
  }
  out += "]\n}\n";
  return out;
}

std::string discriminant_svg(const DiscriminantModel& model, bool psi_markers) {
  // Collect the extent of everything drawn.
  double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
  auto grow = [&](double x, double y) {
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  };
  for (const auto& br : model.branches)
    for (double t : br.grid) {
      const Eigen::VectorXd p = br.at(t);
      grow(p(0), p(1));
    }
  for (const auto& s : model.points) grow(s.image(0), s.image(1));
  if (psi_markers) {
    grow(std::exp(-1.0), 0.0);
    grow(0.0, std::exp(-0.25));
    grow(std::exp(-1.0), std::exp(-1.0 / 3.0));
  }
  if (hi_x - lo_x <= 0.0) hi_x = lo_x + 1.0;
  if (hi_y - lo_y <= 0.0) hi_y = lo_y + 1.0;
  const double pad = 0.08 * std::max(hi_x - lo_x, hi_y - lo_y);
  lo_x -= pad; hi_x += pad; lo_y -= pad; hi_y += pad;

  const double W = 640.0, H = 640.0;
  auto px = [&](double x) { return (x - lo_x) / (hi_x - lo_x) * W; };
  auto py = [&](double y) { return H - (y - lo_y) / (hi_y - lo_y) * H; };

  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
      "viewBox=\"0 0 640 640\">\n";
  out += "  <rect width=\"640\" height=\"640\" fill=\"white\"/>\n";
  // Axes through the origin.
  out += "  <line x1=\"" + svg_coord(px(lo_x)) + "\" y1=\"" + svg_coord(py(0.0)) +
         "\" x2=\"" + svg_coord(px(hi_x)) + "\" y2=\"" + svg_coord(py(0.0)) +
         "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  out += "  <line x1=\"" + svg_coord(px(0.0)) + "\" y1=\"" + svg_coord(py(lo_y)) +
         "\" x2=\"" + svg_coord(px(0.0)) + "\" y2=\"" + svg_coord(py(hi_y)) +
         "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  for (const auto& br : model.branches) {
    out += "  <polyline fill=\"none\" stroke=\"#1f4e9e\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (double t : br.grid) {
      const Eigen::VectorXd p = br.at(t);
      if (!first) out += ' ';
      first = false;
      out += svg_coord(px(p(0))) + "," + svg_coord(py(p(1)));
    }
    out += "\"><title>" + br.name + "</title></polyline>\n";
  }
  for (const auto& s : model.points)
    out += "  <circle cx=\"" + svg_coord(px(s.image(0))) + "\" cy=\"" +
           svg_coord(py(s.image(1))) + "\" r=\"2.5\" fill=\"#c23\"/>\n";
  if (psi_markers) {
    const struct { double x, y; } marks[] = {
        {std::exp(-1.0), 0.0},
        {0.0, std::exp(-0.25)},
        {std::exp(-1.0), std::exp(-1.0 / 3.0)},
    };
    for (const auto& m : marks) {
      out += "  <circle cx=\"" + svg_coord(px(m.x)) + "\" cy=\"" + svg_coord(py(m.y)) +
             "\" r=\"4\" fill=\"none\" stroke=\"#111\" stroke-width=\"1.5\"/>\n";
      out += "  <line x1=\"" + svg_coord(px(m.x) - 7) + "\" y1=\"" + svg_coord(py(m.y)) +
             "\" x2=\"" + svg_coord(px(m.x) + 7) + "\" y2=\"" + svg_coord(py(m.y)) +
             "\" stroke=\"#111\" stroke-width=\"1\"/>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  out.flush();
  if (!out) throw Error("failed to write '" + path + "'");
}

}  // namespace milnorlab
