#pragma once

#include <string>

#include "milnorlab/conic.hpp"
#include "milnorlab/germ.hpp"

namespace milnorlab {

// Germ sources are either a builtin call or an explicit component block:
//
//   map 3 -> 2 {            # declares f : (R^3,0) -> (R^2,0)
//     u = x1^2*x3 + x2^3;   # components over variables x1..xn
//     v = x1;
//   }
//   ldm(2,2; (2,1),(-1,1),(0,-1))
//   psi(3)
//   catalog("ex6")
//
// Operator precedence: ^ binds tighter than unary minus, which binds tighter
// than * and /, which bind tighter than + and -.  Exponents are nonnegative
// integer literals.  Functions: exp, log, sqrt, cbrt, root(e, q), abs, bump,
// and piecewise(cond >= 0 ? a : b) (or > 0).  '#' starts a comment.
MapGerm parse_germ(const std::string& source);

// Homeomorphism sources mirror the germ syntax:
//
//   homeo 2 {
//     fwd { u = x1; v = x2^3; }
//     inv { u = x1; v = cbrt(x2); }
//     eta = 0.3;
//   }
ConicHomeo parse_homeo(const std::string& source);

/// Canonical source text; builtin germs print their builtin form.
/// parse_germ(pretty(g)) is structurally equal to g for parsed germs.
std::string pretty(const MapGerm& g);
std::string pretty(const ConicHomeo& h);

/// Canonical text for one expression over variables x1..xn.
std::string pretty_expr(const Expr& e);

}  // namespace milnorlab
