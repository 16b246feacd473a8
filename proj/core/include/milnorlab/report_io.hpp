#pragma once

#include <string>
#include <vector>

#include "milnorlab/ball.hpp"
#include "milnorlab/critical_locus.hpp"
#include "milnorlab/fiber_probe.hpp"
#include "milnorlab/flow.hpp"
#include "milnorlab/germ.hpp"
#include "milnorlab/regularity.hpp"

namespace milnorlab {

/// Decimal form with 17 significant digits (%.17g): every double has one
/// canonical spelling, so equal runs emit equal bytes.
std::string format_g17(double v);

/// Shortest round-trip decimal (std::to_chars), used when printing
/// expression trees.
std::string format_shortest(double v);

/// CSV, header "branch,s,u1,...,uk".  Branch grid rows carry the branch
/// name and parameter; raw samples follow as branch "sample" with their
/// index for s.
std::string discriminant_csv(const DiscriminantModel& model);

/// CSV, header "x1,...,xn,u1,...,uk,defect".
std::string critical_csv(const std::vector<CriticalSample>& points, int n, int k);

/// CSV, header "t,x1,...,xn,phi1,...,phik,norm_x,norm_f".
std::string flow_csv(const FlowTrace& trace);

/// CSV, header "x1,...,xn".
std::string fiber_csv(const FiberCloud& cloud);

/// Report as JSON: {"milnorlab": 1, "germ": ..., "cfg": {...},
/// "method": ..., "verdict": ..., "witnesses": [{x, theta_or_y, sigma_min,
/// residual}], "sampling": {seed, directions, points, excluded, empty},
/// "notes": [...]}.  Hand-rendered with g17 numbers: byte-identical for
/// identical inputs.
std::string regularity_json(const MapGerm& g, const BallConfig& cfg,
                            const RegularityReport& report);

/// Discriminant picture for k = 2: branch polylines, sample dots, axes.
/// `psi_markers` adds the flat-pair corner marks at (e^{-1}, 0),
/// (0, e^{-1/4}) and (e^{-1}, e^{-1/3}).
std::string discriminant_svg(const DiscriminantModel& model, bool psi_markers = false);

/// Writes body to path, failing loudly (Error) when the file cannot be
/// created or fully written.
void write_text_file(const std::string& path, const std::string& body);

}  // namespace milnorlab
