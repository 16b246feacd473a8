#include "uri.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "milnorlab/errors.hpp"
#include "milnorlab/parser.hpp"

namespace milnorlab::cli {

namespace {

// Cursor over a URI tail.  Columns are 1-based over the full URI so the
// SyntaxError location points into what the user typed.
struct Cursor {
  const std::string& text;
  std::size_t pos;

  int col() const { return static_cast<int>(pos) + 1; }
  bool done() const { return pos >= text.size(); }
  char peek() const { return done() ? '\0' : text[pos]; }

  void expect(char c, const char* what) {
    if (done() || text[pos] != c) throw SyntaxError(1, col(), what);
    ++pos;
  }

  long integer(const char* what) {
    const char* start = text.c_str() + pos;
    char* end = nullptr;
    const long v = std::strtol(start, &end, 10);
    if (end == start) throw SyntaxError(1, col(), what);
    pos += static_cast<std::size_t>(end - start);
    return v;
  }

  double number(const char* what) {
    const char* start = text.c_str() + pos;
    char* end = nullptr;
    const double v = std::strtod(start, &end);
    if (end == start) throw SyntaxError(1, col(), what);
    pos += static_cast<std::size_t>(end - start);
    return v;
  }
};

MapGerm parse_ldm_uri(const std::string& uri) {
  Cursor c{uri, 4};  // past "ldm:"
  const long p = c.integer("exponent p");
  c.expect(',', "','");
  const long q = c.integer("exponent q");
  c.expect(':', "':' before the coefficient pairs");
  std::vector<std::pair<double, double>> lambda;
  while (true) {
    c.expect('(', "'('");
    const double a = c.number("coefficient a");
    c.expect(',', "','");
    const double b = c.number("coefficient b");
    c.expect(')', "')'");
    lambda.emplace_back(a, b);
    if (c.done()) break;
    c.expect(',', "',' between pairs");
  }
  return builtin_ldm(static_cast<int>(p), static_cast<int>(q), lambda);
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file: " + path);
  std::ostringstream body;
  body << in.rdbuf();
  if (!in.good() && !in.eof()) throw Error("cannot read file: " + path);
  return body.str();
}

MapGerm resolve_germ(const std::string& uri) {
  if (uri.empty()) throw Error("empty germ reference");
  if (uri.rfind("psi:", 0) == 0) {
    Cursor c{uri, 4};
    const long n = c.integer("source dimension");
    if (!c.done()) throw SyntaxError(1, c.col(), "end of psi URI");
    return builtin_psi(static_cast<int>(n));
  }
  if (uri.rfind("ldm:", 0) == 0) return parse_ldm_uri(uri);
  if (uri.rfind("catalog:", 0) == 0) return builtin_catalog(uri.substr(8));
  return parse_germ(read_file(uri));
}

ConicHomeo resolve_homeo(const std::string& spec) {
  if (spec.empty()) throw Error("empty homeo reference");
  std::error_code ec;
  if (std::filesystem::exists(spec, ec)) return parse_homeo(read_file(spec));
  return catalog_homeo(spec);
}

Eigen::VectorXd parse_point(const std::string& text) {
  Cursor c{text, 0};
  std::vector<double> coords;
  coords.push_back(c.number("coordinate"));
  while (!c.done()) {
    c.expect(',', "',' between coordinates");
    coords.push_back(c.number("coordinate"));
  }
  Eigen::VectorXd x(static_cast<int>(coords.size()));
  for (int i = 0; i < x.size(); ++i) x(i) = coords[static_cast<std::size_t>(i)];
  return x;
}

}  // namespace milnorlab::cli
