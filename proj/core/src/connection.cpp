#include "milnorlab/connection.hpp"

#include <algorithm>
#include <cmath>

#include "milnorlab/errors.hpp"

namespace milnorlab {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kRankFloor = 1e-12;

Eigen::MatrixXd metric_at(const MetricField& metric, const Eigen::VectorXd& x, int n) {
  if (!metric) return Eigen::MatrixXd::Identity(n, n);
  return metric(x);
}

void require_full_row_rank(const Eigen::MatrixXd& Df, const char* who) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Df);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int k = static_cast<int>(Df.rows());
  if (sv.size() < k || sv(0) <= kRankFloor || sv(k - 1) <= kRankTol * sv(0))
    throw NotSubmersion(std::string(who) + ": Jacobian drops below full row rank");
}

/// ydot = H(y) (Df(y) H(y))^{-1} v, the horizontal transport of a base
/// velocity v.  Raises NotSubmersion when Df H is numerically singular.
Eigen::VectorXd horizontal_transport(const ConnectionSpec& c, const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& v) {
  const Eigen::MatrixXd H = horizontal_space(c, x);
  const Eigen::MatrixXd M = c.germ.jacobian(x) * H;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv(0) <= kRankFloor || sv(sv.size() - 1) <= kRankTol * sv(0))
    throw NotSubmersion("horizontal frame degenerated against the Jacobian");
  return H * svd.solve(v);
}

std::function<Eigen::VectorXd(double)> curve_velocity(const BaseCurve& curve) {
  if (curve.velocity) return curve.velocity;
  const auto at = curve.at;
  const double h = 1e-6 * std::max(1.0, std::fabs(curve.t1 - curve.t0));
  return [at, h](double t) -> Eigen::VectorXd { return (at(t + h) - at(t - h)) / (2.0 * h); };
}

}  // namespace

Eigen::MatrixXd vertical_space(const ConnectionSpec& c, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd Df = c.germ.jacobian(x);
  require_full_row_rank(Df, "vertical_space");
  const int n = static_cast<int>(Df.cols());
  const int k = static_cast<int>(Df.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Df, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(n - k);
}

Eigen::MatrixXd horizontal_space(const ConnectionSpec& c, const Eigen::VectorXd& x) {
  if (c.horizontal) return c.horizontal(x);
  const Eigen::MatrixXd Df = c.germ.jacobian(x);
  require_full_row_rank(Df, "horizontal_space");
  const Eigen::MatrixXd G = metric_at(c.metric, x, static_cast<int>(Df.cols()));
  return G.ldlt().solve(Df.transpose());
}

BaseCurve segment_curve(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  BaseCurve c;
  c.at = [a, b](double t) -> Eigen::VectorXd { return a + t * (b - a); };
  c.velocity = [a, b](double) -> Eigen::VectorXd { return b - a; };
  return c;
}

BaseCurve circle_curve(const Eigen::VectorXd& center, double radius) {
  BaseCurve c;
  constexpr double tau = 6.283185307179586476925286766559;
  c.at = [center, radius](double t) -> Eigen::VectorXd {
    Eigen::VectorXd y = center;
    y(0) += radius * std::cos(tau * t);
    y(1) += radius * std::sin(tau * t);
    return y;
  };
  c.velocity = [center, radius](double t) -> Eigen::VectorXd {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(center.size());
    v(0) = -tau * radius * std::sin(tau * t);
    v(1) = tau * radius * std::cos(tau * t);
    return v;
  };
  return c;
}

LiftResult horizontal_lift(const ConnectionSpec& c, const BaseCurve& curve,
                           const Eigen::VectorXd& x0, const OdeOptions& opts) {
  const Eigen::VectorXd start_defect = c.germ.eval(x0) - curve.at(curve.t0);
  if (start_defect.norm() > 1e-8)
    throw PreconditionError("horizontal lift start is off the curve by " +
                            std::to_string(start_defect.norm()));
  const auto vel = curve_velocity(curve);

  LiftResult lift;
  lift.t.push_back(curve.t0);
  lift.x.push_back(x0);
  lift.max_defect = start_defect.norm();

  auto deriv = [&](double t, const Eigen::VectorXd& y) {
    return horizontal_transport(c, y, vel(t));
  };
  auto observer = [&](double t, const Eigen::VectorXd& y) {
    lift.t.push_back(t);
    lift.x.push_back(y);
    lift.max_defect = std::max(lift.max_defect, (c.germ.eval(y) - curve.at(t)).norm());
    return true;
  };

  const OdeResult res =
      integrate_dopri5(deriv, curve.t0, x0, curve.t1, opts, nullptr, 1e-12, observer);
  lift.completed = res.status == OdeStatus::finished;
  lift.message = res.message;
  if (lift.completed && std::fabs(lift.t.back() - curve.t1) > 0.0) {
    lift.t.push_back(res.t);
    lift.x.push_back(res.y);
    lift.max_defect =
        std::max(lift.max_defect, (c.germ.eval(res.y) - curve.at(res.t)).norm());
  }
  return lift;
}

Eigen::VectorXd fiber_translation(const ConnectionSpec& c, const BaseCurve& curve,
                                  const Eigen::VectorXd& x0, const OdeOptions& opts) {
  const LiftResult lift = horizontal_lift(c, curve, x0, opts);
  if (!lift.completed)
    throw StepFailure("horizontal lift stopped before the end of the curve: " +
                      lift.message);
  return lift.x.back();
}

MapGerm compose_germ(const MapGerm& outer, const MapGerm& inner) {
  if (outer.source_dim() != inner.target_dim())
    throw ArityError("composition needs outer source dim " +
                     std::to_string(outer.source_dim()) + " = inner target dim " +
                     std::to_string(inner.target_dim()));
  std::vector<ExprPtr> comps;
  comps.reserve(static_cast<size_t>(outer.target_dim()));
  for (const auto& comp : outer.components())
    comps.push_back(substitute(comp, inner.components()));
  const Smoothness sm =
      (outer.smoothness() == Smoothness::analytic && inner.smoothness() == Smoothness::analytic)
          ? Smoothness::analytic
          : Smoothness::smooth;
  return MapGerm(inner.source_dim(), outer.target_dim(), std::move(comps), sm);
}

FrameField composed_connection(const ConnectionSpec& cf, const ConnectionSpec& cg) {
  return [cf, cg](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const Eigen::MatrixXd Hf = horizontal_space(cf, x);
    const Eigen::MatrixXd Hg = horizontal_space(cg, cf.germ.eval(x));
    const Eigen::MatrixXd M = cf.germ.jacobian(x) * Hf;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv(0) <= kRankFloor || sv(sv.size() - 1) <= kRankTol * sv(0))
      throw NotSubmersion("composed connection: Df restricted to H^f degenerated");
    return Hf * svd.solve(Hg);
  };
}

CompositionProbe composition_lemma_probe(const ConnectionSpec& cf,
                                         const ConnectionSpec& cg,
                                         const BaseCurve& curve,
                                         const std::vector<Eigen::VectorXd>& starts,
                                         const OdeOptions& opts) {
  CompositionProbe probe;
  probe.starts = static_cast<int>(starts.size());
  if (starts.empty()) {
    probe.notes.push_back("no starting points supplied");
    return probe;
  }

  ConnectionSpec composed{compose_germ(cg.germ, cf.germ), MetricField{},
                          composed_connection(cf, cg)};
  const int n = cf.germ.source_dim();
  const int k = cf.germ.target_dim();
  const auto vel = curve_velocity(curve);

  double min_sigma = std::numeric_limits<double>::infinity();
  bool any_incomplete = false;
  for (const auto& x0 : starts) {
    const LiftResult one = horizontal_lift(composed, curve, x0, opts);
    if (!one.completed) {
      any_incomplete = true;
      probe.notes.push_back("composed lift stopped: " + one.message);
      continue;
    }
    for (const auto& x : one.x) {
      const Eigen::MatrixXd F = composed.horizontal(x);
      const Eigen::MatrixXd Q =
          Eigen::HouseholderQR<Eigen::MatrixXd>(F).householderQ() *
          Eigen::MatrixXd::Identity(n, F.cols());
      const Eigen::VectorXd sv = singular_values(composed.germ.jacobian(x) * Q);
      min_sigma = std::min(min_sigma, sv(sv.size() - 1));
    }

    // Two-stage transport as one joint system: the base curve lifts through
    // g while its lift simultaneously lifts through f.
    Eigen::VectorXd z0(k + n);
    z0.head(k) = cf.germ.eval(x0);
    z0.tail(n) = x0;
    auto deriv = [&](double t, const Eigen::VectorXd& z) -> Eigen::VectorXd {
      Eigen::VectorXd dz(k + n);
      dz.head(k) = horizontal_transport(cg, z.head(k), vel(t));
      dz.tail(n) = horizontal_transport(cf, z.tail(n), dz.head(k));
      return dz;
    };
    const OdeResult two = integrate_dopri5(deriv, curve.t0, z0, curve.t1, opts);
    if (two.status != OdeStatus::finished) {
      any_incomplete = true;
      probe.notes.push_back("two-stage lift stopped: " + two.message);
      continue;
    }
    ++probe.completed;
    probe.sup_error =
        std::max(probe.sup_error, (one.x.back() - two.y.tail(n)).norm());
  }

  probe.min_sigma = std::isfinite(min_sigma) ? min_sigma : 0.0;
  if (probe.completed == 0) {
    probe.verdict = any_incomplete ? Verdict::fail : Verdict::inconclusive;
  } else if (any_incomplete || probe.sup_error > 1e-5 || probe.min_sigma <= 1e-8) {
    probe.verdict = Verdict::fail;
  } else {
    probe.verdict = Verdict::pass;
  }
  return probe;
}

}  // namespace milnorlab
