#include "milnorlab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "milnorlab/critical_locus.hpp"
#include "milnorlab/errors.hpp"

namespace milnorlab {

namespace {

constexpr double kZeroFiberNorm = 1e-14;
constexpr double kGuardFactor = 1e-3;

std::mt19937_64 indexed_rng(std::uint64_t seed, std::uint64_t salt, std::uint64_t index) {
  std::mt19937_64 rng(seed ^ salt ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  rng.discard(3);
  return rng;
}

FlowSample make_sample(const MapGerm& g, double t, const Eigen::VectorXd& x) {
  FlowSample s;
  s.t = t;
  s.x = x;
  s.norm_x = x.norm();
  const Eigen::VectorXd f = g.eval(x);
  s.norm_f = f.norm();
  s.phi = s.norm_f > kZeroFiberNorm ? Eigen::VectorXd(f / s.norm_f)
                                    : Eigen::VectorXd(Eigen::VectorXd::Zero(f.size()));
  return s;
}

double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}

}  // namespace

Eigen::VectorXd milnor_vector_field(const MapGerm& g, const Eigen::VectorXd& x) {
  const Eigen::VectorXd f = g.eval(x);
  const double nf = f.norm();
  if (nf <= kZeroFiberNorm) throw OnFiberV("milnor_vector_field on the zero fiber");
  const Eigen::VectorXd ph = f / nf;
  const Eigen::MatrixXd Df = g.jacobian(x);
  // Rows of A cut out T_x E_phi = ker (I - phi phi^T) Df.
  const Eigen::MatrixXd A = Df - ph * (ph.transpose() * Df);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::VectorXd p = x;
  if (sv.size() > 0 && sv(0) > 1e-12) {
    const Eigen::MatrixXd& V = svd.matrixV();
    for (int i = 0; i < sv.size(); ++i) {
      if (sv(i) <= 1e-10 * sv(0)) break;
      p -= V.col(i) * V.col(i).dot(x);
    }
  }
  const double nx2 = x.squaredNorm();
  const double px = p.dot(x);
  if (px <= 1e-10 * nx2)
    throw DegenerateProjection("radial part of the fiber-tangent projection vanished");
  return p * (nx2 / px);
}

FlowTrace flow_to_sphere(const MapGerm& g, const Eigen::VectorXd& x0, double eps,
                         const FlowOptions& opts) {
  FlowTrace trace;
  const double r0 = x0.norm();
  if (r0 <= 0.0) {
    trace.termination = FlowTermination::degenerate;
    trace.message = "start at the origin";
    return trace;
  }
  try {
    trace.samples.push_back(make_sample(g, 0.0, x0));
  } catch (const Error& e) {
    trace.termination = FlowTermination::degenerate;
    trace.message = e.what();
    return trace;
  }
  if (r0 >= eps * (1.0 - 1e-12)) {
    trace.termination = FlowTermination::reached_sphere;
    trace.message = "start already on the sphere";
    return trace;
  }

  bool hit_guard = false;
  auto deriv = [&](double, const Eigen::VectorXd& y) { return milnor_vector_field(g, y); };
  auto event = [&](double, const Eigen::VectorXd& y) { return y.norm() - eps; };
  auto observer = [&](double t, const Eigen::VectorXd& y) {
    trace.samples.push_back(make_sample(g, t, y));
    for (const auto& gp : opts.guard_points) {
      if ((y - gp).norm() <= kGuardFactor * eps) {
        hit_guard = true;
        return false;
      }
    }
    return true;
  };

  // The rescale <w, x> = |x|^2 makes |x(t)| = r0 e^t, so the sphere sits at
  // flow time ln(eps / r0) exactly; the budget covers slowed integrations.
  const double t_end = opts.horizon_factor * std::log(eps / r0) + 1.0;
  const OdeResult res =
      integrate_dopri5(deriv, 0.0, x0, t_end, opts.ode, event, 1e-10 * eps, observer);
  trace.message = res.message;
  switch (res.status) {
    case OdeStatus::event:
      trace.termination = FlowTermination::reached_sphere;
      break;
    case OdeStatus::finished:
      trace.termination = FlowTermination::horizon;
      trace.message = "flow-time budget exhausted before the sphere";
      break;
    case OdeStatus::aborted:
      trace.termination =
          hit_guard ? FlowTermination::near_critical : FlowTermination::degenerate;
      if (hit_guard) trace.message = "entered a critical guard zone";
      break;
    case OdeStatus::step_failure:
      trace.termination = FlowTermination::step_failure;
      break;
  }

  const Eigen::VectorXd& phi0 = trace.samples.front().phi;
  double prev_x = -1.0, prev_f = -1.0;
  for (const auto& s : trace.samples) {
    if (phi0.norm() > 0.5 && s.phi.norm() > 0.5)
      trace.phi_drift = std::max(trace.phi_drift, angle_between(phi0, s.phi));
    if (prev_x >= 0.0 && s.norm_x <= prev_x) trace.norm_x_monotone = false;
    if (prev_f >= 0.0 && s.norm_f <= prev_f) trace.norm_f_monotone = false;
    prev_x = s.norm_x;
    prev_f = s.norm_f;
  }
  return trace;
}

TauProbe tau_equivalence_probe(const MapGerm& g, const RegularityReport& dreg,
                               const BallConfig& cfg, const SamplingPlan& plan) {
  if (dreg.verdict != Verdict::pass)
    throw PreconditionError(
        "tau equivalence probe requires a passed d-regularity report, got " +
        std::string(verdict_name(dreg.verdict)));
  TauProbe probe;
  const int n = g.source_dim();
  const double r_small = cfg.eps / 8.0;

  FlowOptions opts;
  for (const auto& cs : sample_critical_set(g, cfg, plan))
    opts.guard_points.push_back(cs.x);

  probe.seeds = plan.points;
  std::vector<FlowTrace> traces(static_cast<size_t>(plan.points));
  std::vector<int> state(static_cast<size_t>(plan.points), 0);  // 0 skip, 1 ok, 2 fail
  parallel_for_index(plan.points, plan.jobs, [&](int i) {
    auto rng = indexed_rng(plan.seed, 0x7461757072ULL, static_cast<std::uint64_t>(i));
    // Rejection-sample a tube start: on the small sphere, off the zero
    // fiber, with image inside the delta disc.
    Eigen::VectorXd x;
    bool found = false;
    for (int tries = 0; tries < 64 && !found; ++tries) {
      x = r_small * sample_sphere(rng, n);
      const double nf = g.eval(x).norm();
      if (nf > kZeroFiberNorm && nf <= cfg.delta) found = true;
    }
    if (!found) return;  // state stays 0: skipped
    bool in_guard = false;
    for (const auto& gp : opts.guard_points)
      if ((x - gp).norm() <= kGuardFactor * cfg.eps) in_guard = true;
    if (in_guard) return;
    FlowTrace tr = flow_to_sphere(g, x, cfg.eps, opts);
    if (tr.termination == FlowTermination::near_critical) {
      state[static_cast<size_t>(i)] = 0;
      traces[static_cast<size_t>(i)] = std::move(tr);
      return;
    }
    const bool ok = tr.termination == FlowTermination::reached_sphere &&
                    tr.phi_drift <= 1e-6 && tr.norm_x_monotone;
    state[static_cast<size_t>(i)] = ok ? 1 : 2;
    traces[static_cast<size_t>(i)] = std::move(tr);
  });

  bool any_fail = false;
  for (int i = 0; i < plan.points; ++i) {
    const auto idx = static_cast<size_t>(i);
    if (state[idx] == 0) {
      ++probe.skipped;
      if (!traces[idx].samples.empty())
        probe.notes.push_back("seed " + std::to_string(i) +
                              " entered a critical guard zone; excluded");
      continue;
    }
    probe.max_phi_drift = std::max(probe.max_phi_drift, traces[idx].phi_drift);
    if (state[idx] == 1) {
      ++probe.reached;
    } else {
      any_fail = true;
      if (probe.failures.size() < 8) probe.failures.push_back(traces[idx]);
    }
  }
  if (any_fail) {
    probe.verdict = Verdict::fail;
  } else if (probe.reached == 0) {
    probe.verdict = Verdict::inconclusive;
    probe.notes.push_back("every seed was skipped; no flow was attempted");
  } else {
    probe.verdict = Verdict::pass;
  }
  return probe;
}

}  // namespace milnorlab
