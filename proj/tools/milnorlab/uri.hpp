#pragma once

#include <string>

#include <Eigen/Dense>

#include "milnorlab/conic.hpp"
#include "milnorlab/germ.hpp"

namespace milnorlab::cli {

/// Germ from a URI: "psi:N", "ldm:p,q:(a1,b1),(a2,b2),...", "catalog:name",
/// or a path to a germ source file.  Construction errors (syntax, unknown
/// names, hyperbolicity violations, unreadable files) propagate as Error
/// subclasses; the caller maps them to exit code 2.
MapGerm resolve_germ(const std::string& uri);

/// Homeomorphism from a catalog name ("identity", "cube", "inv_cube",
/// "sqrt_sign", "parity(p,q)", "psi_exp") or a path to a homeo source file.
ConicHomeo resolve_homeo(const std::string& spec);

/// Comma-separated coordinates, e.g. "0.1,-0.2,0.3".
Eigen::VectorXd parse_point(const std::string& text);

/// Whole file contents; raises Error when the file cannot be read.
std::string read_file(const std::string& path);

}  // namespace milnorlab::cli
