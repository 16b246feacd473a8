#include "milnorlab/solvers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace milnorlab {

namespace {
bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }
}  // namespace

Eigen::MatrixXd numeric_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                 const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd probe = x;
  probe(0) += h;
  Eigen::VectorXd r0 = f(x);
  Eigen::MatrixXd J(r0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double step = h * std::max(1.0, std::fabs(x(j)));
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += step;
    xm(j) -= step;
    J.col(j) = (f(xp) - f(xm)) / (2.0 * step);
  }
  return J;
}

GaussNewtonResult gauss_newton(const ResidualSystem& sys, const Eigen::VectorXd& x0,
                               const GaussNewtonOptions& opts) {
  GaussNewtonResult res;
  res.x = x0;

  auto try_eval = [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) -> bool {
    try {
      out = sys.residual(x);
    } catch (const Error&) {
      return false;
    }
    return all_finite(out);
  };

  Eigen::VectorXd r;
  if (!try_eval(res.x, r)) return res;
  res.residual_norm = r.norm();

  for (int it = 0; it < opts.max_iters; ++it) {
    res.iters = it + 1;
    if (res.residual_norm < opts.residual_tol) {
      res.converged = true;
      return res;
    }
    Eigen::MatrixXd J;
    try {
      J = sys.jacobian ? sys.jacobian(res.x)
                       : numeric_jacobian(sys.residual, res.x, opts.fd_step);
    } catch (const Error&) {
      return res;
    }
    if (!J.allFinite()) return res;

    Eigen::BDCSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-13);
    Eigen::VectorXd step = svd.solve(-r);
    if (!all_finite(step)) return res;
    if (opts.max_step > 0.0 && step.norm() > opts.max_step)
      step *= opts.max_step / step.norm();

    // Backtracking line search on the residual norm.
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 12; ++ls) {
      Eigen::VectorXd xt = res.x + lambda * step;
      Eigen::VectorXd rt;
      if (try_eval(xt, rt)) {
        const double nt = rt.norm();
        if (nt < res.residual_norm || nt < opts.residual_tol) {
          res.x = xt;
          r = rt;
          res.residual_norm = nt;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) return res;
    if (lambda * step.norm() < opts.step_tol) break;
  }
  res.converged = res.residual_norm < opts.residual_tol;
  return res;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct DpStep {
  Eigen::VectorXd y;     // 5th order solution
  Eigen::VectorXd err;   // embedded error estimate
  Eigen::VectorXd k7;    // FSAL derivative at the end point
};

}  // namespace

OdeResult integrate_dopri5(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& deriv,
    double t0, const Eigen::VectorXd& y0, double t_end, const OdeOptions& opts,
    const std::function<double(double, const Eigen::VectorXd&)>& event, double event_tol,
    const std::function<bool(double, const Eigen::VectorXd&)>& observer) {
  OdeResult out;
  out.t = t0;
  out.y = y0;

  auto f = [&](double t, const Eigen::VectorXd& y) -> Eigen::VectorXd { return deriv(t, y); };

  auto one_step = [&](double t, const Eigen::VectorXd& y, const Eigen::VectorXd& k1,
                      double h, DpStep& s) -> bool {
    try {
      Eigen::VectorXd k2 = f(t + c2 * h, y + h * (a21 * k1));
      Eigen::VectorXd k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      Eigen::VectorXd k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      Eigen::VectorXd k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      Eigen::VectorXd k6 =
          f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      s.y = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      s.k7 = f(t + h, s.y);
      s.err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * s.k7);
    } catch (const Error& ex) {
      out.message = ex.what();
      return false;
    }
    return s.y.allFinite() && s.err.allFinite();
  };

  auto err_norm = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& ynew,
                      const Eigen::VectorXd& err) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc = opts.atol + opts.rtol * std::max(std::fabs(y(i)), std::fabs(ynew(i)));
      const double q = err(i) / sc;
      acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(y.size()));
  };

  Eigen::VectorXd k1;
  try {
    k1 = f(t0, y0);
  } catch (const Error& ex) {
    out.status = OdeStatus::aborted;
    out.message = ex.what();
    return out;
  }

  double g_prev = 0.0;
  bool have_event = static_cast<bool>(event);
  if (have_event) g_prev = event(t0, y0);
  if (have_event && std::fabs(g_prev) <= event_tol) {
    out.status = OdeStatus::event;
    return out;
  }

  double h = std::min(opts.initial_step, t_end - t0);
  if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  double t = t0;
  Eigen::VectorXd y = y0;

  for (int step = 0; step < opts.max_steps; ++step) {
    if (t >= t_end) {
      out.status = OdeStatus::finished;
      out.t = t;
      out.y = y;
      return out;
    }
    h = std::min(h, t_end - t);
    if (h < 1e-14 * std::max(1.0, std::fabs(t))) {
      out.status = OdeStatus::step_failure;
      out.message = "step size underflow";
      out.t = t;
      out.y = y;
      return out;
    }

    DpStep s;
    if (!one_step(t, y, k1, h, s)) {
      // Derivative failure: shrink and retry, then abort if hopeless.
      h *= 0.25;
      if (h < 1e-14) {
        out.status = OdeStatus::aborted;
        if (out.message.empty()) out.message = "derivative evaluation failed";
        out.t = t;
        out.y = y;
        return out;
      }
      continue;
    }

    const double en = err_norm(y, s.y, s.err);
    if (en <= 1.0) {
      // Accepted.
      if (have_event) {
        const double g_new = event(t + h, s.y);
        if (std::fabs(g_new) <= event_tol || g_prev * g_new < 0.0) {
          // Bisect the step size from the step start until the event value
          // is within tolerance.
          double lo = 0.0, hi = h;
          Eigen::VectorXd y_hit = s.y;
          double t_hit = t + h, g_hit = g_new;
          for (int it = 0; it < 200 && std::fabs(g_hit) > event_tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            DpStep sm;
            if (!one_step(t, y, k1, mid, sm)) break;
            const double gm = event(t + mid, sm.y);
            if (g_prev * gm < 0.0) {
              hi = mid;
            } else {
              lo = mid;
            }
            if (std::fabs(gm) < std::fabs(g_hit)) {
              g_hit = gm;
              y_hit = sm.y;
              t_hit = t + mid;
            }
          }
          out.status = OdeStatus::event;
          out.t = t_hit;
          out.y = y_hit;
          if (observer) observer(t_hit, y_hit);
          return out;
        }
        g_prev = g_new;
      }
      t += h;
      y = s.y;
      k1 = s.k7;
      if (observer && !observer(t, y)) {
        out.status = OdeStatus::aborted;
        out.message = "observer requested abort";
        out.t = t;
        out.y = y;
        return out;
      }
      const double grow = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
      h *= std::min(5.0, std::max(0.2, grow));
    } else {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
    }
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  }
  out.status = OdeStatus::step_failure;
  out.message = "step budget exhausted";
  out.t = t;
  out.y = y;
  return out;
}

Eigen::VectorXd sample_sphere(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(n);
  double norm = 0.0;
  do {
    for (int i = 0; i < n; ++i) v(i) = gauss(rng);
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

Eigen::VectorXd sample_ball(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::VectorXd dir = sample_sphere(rng, n);
  const double r = std::pow(uni(rng), 1.0 / n);
  return r * dir;
}

Eigen::VectorXd sample_ball_log(std::mt19937_64& rng, int n, double rmin) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Eigen::VectorXd dir = sample_sphere(rng, n);
  const double r = std::exp(std::log(rmin) * uni(rng));  // log-uniform in [rmin, 1]
  return r * dir;
}

Eigen::MatrixXd orth_complement(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  Eigen::VectorXd u = v.normalized();
  // Householder reflection mapping e1 to u; columns 2..n span u-perp.
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd w = u;
  w(0) += (u(0) >= 0.0 ? 1.0 : -1.0);
  const double wn2 = w.squaredNorm();
  if (wn2 > 1e-30) Q -= (2.0 / wn2) * (w * w.transpose());
  // First column of Q is -sign(u1) * u; the rest are orthonormal to u.
  return Q.rightCols(n - 1);
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  return svd.singularValues();
}

int rank_deficiency(const Eigen::MatrixXd& A, double tol, double floor) {
  const int full = static_cast<int>(std::min(A.rows(), A.cols()));
  const Eigen::VectorXd sv = singular_values(A);
  if (sv.size() == 0 || sv(0) < floor) return full;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++rank;
  return full - rank;
}

void parallel_for_index(int count, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || count < 2 * jobs) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace milnorlab
