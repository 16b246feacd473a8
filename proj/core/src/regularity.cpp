#include "milnorlab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "milnorlab/solvers.hpp"

namespace milnorlab {

namespace {

constexpr double kZeroFiberNorm = 1e-14;
constexpr double kWitnessResidual = 1e-8;
constexpr double kWitnessSigma = 1e-8;
constexpr double kMinImageNorm = 1e-9;
constexpr double kRayAlignment = 0.99;
constexpr double kMinRadiusFactor = 1e-3;

double angle_to_unit(const Eigen::VectorXd& d, const Eigen::VectorXd& u) {
  const double c = std::clamp(d.dot(u), -1.0, 1.0);
  return std::acos(c);
}

// Deterministic per-work-item generator: mixing the indices keeps results
// independent of the thread schedule.
std::mt19937_64 indexed_rng(std::uint64_t seed, std::uint64_t salt, std::uint64_t index) {
  std::mt19937_64 rng(seed ^ salt ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  rng.discard(3);
  return rng;
}

std::vector<double> scan_radii(double eps) {
  return {eps, eps / 2.0, eps / 4.0, eps / 8.0};
}

// Directions covering the target sphere: both signs for k = 1, the uniform
// circle for k = 2, a Fibonacci spiral for k = 3, random otherwise.
std::vector<Eigen::VectorXd> direction_grid(int k, int count, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> dirs;
  if (k == 1) {
    dirs.push_back(Eigen::VectorXd::Constant(1, 1.0));
    dirs.push_back(Eigen::VectorXd::Constant(1, -1.0));
    return dirs;
  }
  count = std::max(k + 1, count);
  dirs.reserve(count);
  if (k == 2) {
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * M_PI * i / count;
      Eigen::VectorXd d(2);
      d << std::cos(a), std::sin(a);
      dirs.push_back(d);
    }
    return dirs;
  }
  if (k == 3) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      Eigen::VectorXd d(3);
      d << r * std::cos(golden * i), r * std::sin(golden * i), z;
      dirs.push_back(d);
    }
    return dirs;
  }
  auto rng = indexed_rng(seed, 0x646972676ULL, 0);
  for (int i = 0; i < count; ++i) dirs.push_back(sample_sphere(rng, k));
  return dirs;
}

struct Candidate {
  Eigen::VectorXd x;
  Eigen::VectorXd theta;
  double ratio = std::numeric_limits<double>::infinity();
};

// sigma_last / sigma_first of A, where "last" is the rank the full
// transversality condition requires.  A matrix that is numerically zero
// ranks as maximally degenerate.
// Each row of a stacked constraint matrix is one tangency condition, so the
// rank test must be scale free per row: a germ component written as an odd
// power p^m has jacobian row m p^{m-1} Dp, which shrinks to nothing on the
// set {p = 0} although the set itself is the smooth hypersurface cut by Dp.
// Normalizing recovers the reduced direction; an exactly zero row is kept,
// since it is a genuinely dead condition.
Eigen::MatrixXd row_normalized(Eigen::MatrixXd A) {
  for (int i = 0; i < A.rows(); ++i) {
    const double nrm = A.row(i).norm();
    if (nrm > 1e-300) A.row(i) /= nrm;
  }
  return A;
}

double sigma_ratio(const Eigen::MatrixXd& A, int required_rank) {
  const Eigen::VectorXd sv = singular_values(A);
  if (sv.size() == 0 || required_rank <= 0) return 0.0;
  if (sv(0) < 1e-300) return 0.0;
  if (required_rank > sv.size()) return 0.0;
  return sv(required_rank - 1) / sv(0);
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: break;
  }
  return "inconclusive";
}

bool ExclusionSet::excludes(const Eigen::VectorXd& u) const {
  const double nu = u.norm();
  if (nu <= kZeroFiberNorm) return true;
  const Eigen::VectorXd uh = u / nu;
  for (const auto& d : directions)
    if (angle_to_unit(d, uh) <= angular_tol) return true;
  // |uh(i)| is the sine of the angle to the hyperplane {y_i = 0}.
  for (int i : hyperplane_components)
    if (i >= 0 && i < uh.size() && std::fabs(uh(i)) <= angular_tol) return true;
  return false;
}

void ExclusionSet::add_direction(const Eigen::VectorXd& u) {
  const double nu = u.norm();
  if (nu <= kZeroFiberNorm) return;
  const Eigen::VectorXd uh = u / nu;
  for (const auto& d : directions)
    if (angle_to_unit(d, uh) <= 0.5 * angular_tol) return;
  directions.push_back(uh);
}

void ExclusionSet::add_from_model(const DiscriminantModel& model) {
  for (int i : model.hyperplane_components)
    if (std::find(hyperplane_components.begin(), hyperplane_components.end(), i) ==
        hyperplane_components.end())
      hyperplane_components.push_back(i);
  for (const auto& s : model.points) add_direction(s.image);
  for (const auto& b : model.branches) {
    const double lo = std::min(b.reach_lo, b.reach_hi);
    const double hi = std::max(b.reach_lo, b.reach_hi);
    for (double t : b.grid) {
      if (t < lo || t > hi) continue;
      add_direction(b.at(t));
    }
  }
}

ExclusionSet ExclusionSet::from_model(const DiscriminantModel& model, double tol) {
  ExclusionSet e;
  e.angular_tol = tol;
  e.add_from_model(model);
  return e;
}

Eigen::VectorXd phi(const MapGerm& g, const Eigen::VectorXd& x) {
  const Eigen::VectorXd f = g.eval(x);
  const double nf = f.norm();
  if (nf <= kZeroFiberNorm)
    throw OnFiberV("phi undefined on the zero fiber (|f(x)| <= 1e-14)");
  return f / nf;
}

Eigen::VectorXd spherefication(const MapGerm& g, const Eigen::VectorXd& x) {
  return x.norm() * phi(g, x);
}

FiberSphereResult fiber_sphere_transverse(const MapGerm& g,
                                          const Eigen::VectorXd& y, double eps,
                                          double tol, const SamplingPlan& plan) {
  if (eps <= 0.0) throw PreconditionError("fiber_sphere_transverse: eps must be positive");
  if (y.size() != g.target_dim())
    throw PreconditionError("fiber_sphere_transverse: target dimension mismatch");
  const int n = g.source_dim();
  const int k = g.target_dim();
  const int seeds = std::max(64, plan.points / 8);

  ResidualSystem sys;
  sys.residual = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(k + 1);
    r.head(k) = g.eval(x) - y;
    r(k) = (x.squaredNorm() - eps * eps) / (2.0 * eps);
    return r;
  };
  GaussNewtonOptions opts;
  opts.max_iters = 40;
  opts.residual_tol = 1e-12;

  std::vector<Eigen::VectorXd> found(seeds);
  std::vector<char> ok(seeds, 0);
  parallel_for_index(seeds, plan.jobs, [&](int i) {
    auto rng = indexed_rng(plan.seed, 0x666962737068ULL, i);
    const Eigen::VectorXd x0 = eps * sample_sphere(rng, n);
    const auto res = gauss_newton(sys, x0, opts);
    if (!res.converged || res.residual_norm > 1e-9) return;
    found[i] = res.x;
    ok[i] = 1;
  });

  FiberSphereResult out;
  std::vector<Eigen::VectorXd> points;
  for (int i = 0; i < seeds; ++i) {
    if (!ok[i]) continue;
    bool dup = false;
    for (const auto& p : points)
      if ((p - found[i]).norm() < 1e-6 * eps) { dup = true; break; }
    if (!dup) points.push_back(found[i]);
  }
  out.points_found = static_cast<int>(points.size());
  if (points.empty()) {
    out.status = FiberSphereStatus::empty;
    return out;
  }
  out.status = FiberSphereStatus::transverse;
  for (const auto& p : points) {
    Eigen::MatrixXd stacked(k + 1, n);
    try {
      stacked.topRows(k) = g.jacobian(p);
    } catch (const Error&) {
      continue;  // jet failure at a gluing set; the point itself is fine
    }
    stacked.row(k) = p.transpose() / p.norm();
    const int required = std::min(k + 1, n);
    const double ratio = sigma_ratio(row_normalized(stacked), required);
    if (ratio < tol) {
      Witness w;
      w.x = p;
      w.theta_or_y = y;
      w.sigma_min = ratio;
      w.residual = (g.eval(p) - y).norm();
      out.tangencies.push_back(w);
      out.status = FiberSphereStatus::tangency;
    }
  }
  return out;
}

RegularityReport transversality_property(const MapGerm& g, const BallConfig& cfg,
                                         const SamplingPlan& plan) {
  RegularityReport rep;
  rep.method = "transversality";
  rep.seed = plan.seed;
  rep.radii_scanned = {cfg.eps};

  DiscriminantModel interior = discriminant_sample(g, cfg, plan);
  rep.notes = interior.notes;
  BoundaryCritical b = boundary_critical(g, interior, plan);
  rep.points_scanned = static_cast<long long>(interior.seeds_tried) +
                       static_cast<long long>(b.points.size());

  const int n = g.source_dim();
  const int k = g.target_dim();
  if (n < k + 1) {
    rep.notes.push_back("source dimension too small for boundary critical points;"
                        " transversality holds vacuously at this scale");
    rep.verdict = Verdict::pass;
    return rep;
  }

  for (const auto& img : b.new_inside_delta) {
    // Recover the boundary point behind this image for the witness record.
    const CriticalSample* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& p : b.points) {
      const double d = (p.image - img).norm();
      if (d < best_d) { best_d = d; best = &p; }
    }
    Witness w;
    if (best) {
      w.x = best->x;
      w.residual = best->residual;
      Eigen::MatrixXd stacked(k + 1, n);
      bool have = true;
      try {
        stacked.topRows(k) = g.jacobian(best->x);
        stacked.row(k) = best->x.transpose() / best->x.norm();
      } catch (const Error&) {
        have = false;
      }
      w.sigma_min = have ? sigma_ratio(row_normalized(stacked), std::min(k + 1, n)) : 0.0;
    }
    w.theta_or_y = img;
    rep.witnesses.push_back(w);
  }
  rep.verdict = rep.witnesses.empty() ? Verdict::pass : Verdict::fail;
  return rep;
}

RegularityReport d_regular_via_rays(const MapGerm& g, const BallConfig& cfg,
                                    const SamplingPlan& plan,
                                    const ExclusionSet& excl) {
  RegularityReport rep;
  rep.method = "rays";
  rep.seed = plan.seed;
  const int n = g.source_dim();
  const int k = g.target_dim();
  const double eps = cfg.eps;
  const auto radii = scan_radii(eps);
  rep.radii_scanned = radii;

  if (k == 1) {
    rep.notes.push_back("k = 1: ray preimages are open regions, transverse to"
                        " every sphere; nothing to scan");
    rep.verdict = Verdict::pass;
    return rep;
  }

  const auto thetas = direction_grid(k, plan.directions, plan.seed);
  rep.directions_scanned = static_cast<int>(thetas.size());
  const int seeds_per_cell = 3;
  const int nr = static_cast<int>(radii.size());

  struct CellOut {
    std::vector<Candidate> cands;
    long long scanned = 0;
    long long empty = 0;
    bool excluded = false;
  };
  std::vector<CellOut> slots(thetas.size());

  parallel_for_index(static_cast<int>(thetas.size()), plan.jobs, [&](int ti) {
    CellOut& out = slots[ti];
    const Eigen::VectorXd& theta = thetas[ti];
    if (excl.excludes(theta)) {
      out.excluded = true;
      return;
    }
    const Eigen::MatrixXd V = orth_complement(theta);  // k x (k-1)
    for (int ri = 0; ri < nr; ++ri) {
      const double r = radii[ri];
      ResidualSystem sys;
      sys.residual = [&, r](const Eigen::VectorXd& x) {
        Eigen::VectorXd res(k);
        res.head(k - 1) = V.transpose() * g.eval(x);
        res(k - 1) = (x.squaredNorm() - r * r) / (2.0 * r);
        return res;
      };
      sys.jacobian = [&, r](const Eigen::VectorXd& x) {
        Eigen::MatrixXd J(k, n);
        J.topRows(k - 1) = V.transpose() * g.jacobian(x);
        J.row(k - 1) = x.transpose() / r;
        return J;
      };
      GaussNewtonOptions opts;
      opts.max_iters = 40;
      opts.residual_tol = 1e-11;
      opts.max_step = 0.5 * r;
      bool cell_hit = false;
      for (int s = 0; s < seeds_per_cell; ++s) {
        auto rng = indexed_rng(plan.seed, 0x726179736dULL,
                               (static_cast<std::uint64_t>(ti) * nr + ri) * seeds_per_cell + s);
        const Eigen::VectorXd x0 = r * sample_sphere(rng, n);
        out.scanned++;
        const auto res = gauss_newton(sys, x0, opts);
        if (!res.converged || res.residual_norm > 1e-9) continue;
        Eigen::VectorXd f;
        try {
          f = g.eval(res.x);
        } catch (const Error&) {
          continue;
        }
        const double nf = f.norm();
        if (nf < kMinImageNorm) continue;
        if (f.dot(theta) < kRayAlignment * nf) continue;  // solution sits on the opposite ray
        cell_hit = true;
        Eigen::MatrixXd stacked(k, n);
        try {
          stacked.topRows(k - 1) = V.transpose() * g.jacobian(res.x);
        } catch (const Error&) {
          continue;
        }
        stacked.row(k - 1) = res.x.transpose() / res.x.norm();
        Candidate c;
        c.x = res.x;
        c.theta = theta;
        c.ratio = sigma_ratio(row_normalized(stacked), std::min(k, n));
        out.cands.push_back(std::move(c));
      }
      if (!cell_hit) out.empty++;
    }
  });

  std::vector<Candidate> cands;
  for (const auto& s : slots) {
    rep.points_scanned += s.scanned;
    rep.empty_count += s.empty;
    if (s.excluded) rep.excluded++;
    cands.insert(cands.end(), s.cands.begin(), s.cands.end());
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.ratio < b.ratio; });
  if (cands.size() > 24) cands.resize(24);

  // Radius-free refinement: unknowns (x, theta, c), asking for a point of
  // E_theta where some unit c annihilates both the constraint rows and the
  // sphere row.  theta moves freely, so tangencies between scan rays are
  // reachable.
  for (const auto& c0 : cands) {
    Eigen::VectorXd z(n + 2 * k);
    z.head(n) = c0.x;
    z.segment(n, k) = c0.theta;
    {
      Eigen::MatrixXd stacked(k, n);
      const Eigen::MatrixXd V = orth_complement(c0.theta);
      stacked.topRows(k - 1) = V.transpose() * g.jacobian(c0.x);
      stacked.row(k - 1) = c0.x.transpose() / c0.x.norm();
      Eigen::BDCSVD<Eigen::MatrixXd> svd(row_normalized(stacked), Eigen::ComputeFullU);
      z.tail(k) = svd.matrixU().col(std::min(k, static_cast<int>(stacked.cols())) - 1);
    }

    ResidualSystem sys;
    sys.residual = [&](const Eigen::VectorXd& zz) {
      const Eigen::VectorXd x = zz.head(n);
      const Eigen::VectorXd th = zz.segment(n, k);
      const Eigen::VectorXd cv = zz.tail(k);
      const double nx = x.norm();
      if (nx < 1e-12) throw DomainError("refinement collapsed to the origin");
      const Eigen::MatrixXd V = orth_complement(th.normalized());
      Eigen::MatrixXd stacked(k, n);
      stacked.topRows(k - 1) = V.transpose() * g.jacobian(x);
      stacked.row(k - 1) = x.transpose() / nx;
      Eigen::VectorXd res(k - 1 + n + 2);
      res.head(k - 1) = V.transpose() * g.eval(x);
      res.segment(k - 1, n) = row_normalized(stacked).transpose() * cv;
      res(k - 1 + n) = cv.squaredNorm() - 1.0;
      res(k - 1 + n + 1) = th.squaredNorm() - 1.0;
      return res;
    };
    GaussNewtonOptions opts;
    opts.max_iters = 60;
    opts.residual_tol = 1e-12;
    opts.max_step = 0.25 * eps;
    const auto res = gauss_newton(sys, z, opts);
    // The refinement system is underdetermined, so the step-size flag can
    // stay unset while the iterate rides the solution manifold; the residual
    // plus the recomputed ratio below are the actual certificate.
    if (res.residual_norm > kWitnessResidual) continue;

    const Eigen::VectorXd x = res.x.head(n);
    Eigen::VectorXd th = res.x.segment(n, k);
    if (th.norm() < 1e-6) continue;
    th.normalize();
    const double nx = x.norm();
    if (nx < kMinRadiusFactor * eps || nx > eps * (1.0 + 1e-9)) continue;
    Eigen::VectorXd f;
    Eigen::MatrixXd Df;
    try {
      f = g.eval(x);
      Df = g.jacobian(x);
    } catch (const Error&) {
      continue;
    }
    const double nf = f.norm();
    if (nf < kMinImageNorm) continue;
    if (f.dot(th) < kRayAlignment * nf) continue;
    if (excl.excludes(th)) continue;
    Eigen::MatrixXd stacked(k, n);
    const Eigen::MatrixXd V = orth_complement(th);
    stacked.topRows(k - 1) = V.transpose() * Df;
    stacked.row(k - 1) = x.transpose() / nx;
    const double ratio = sigma_ratio(row_normalized(stacked), std::min(k, n));
    if (ratio > kWitnessSigma) continue;

    bool dup = false;
    for (const auto& w : rep.witnesses)
      if ((w.x - x).norm() < 1e-6 * eps) { dup = true; break; }
    if (dup) continue;
    Witness w;
    w.x = x;
    w.theta_or_y = th;
    w.sigma_min = ratio;
    w.residual = res.residual_norm;
    rep.witnesses.push_back(std::move(w));
  }

  rep.verdict = rep.witnesses.empty() ? Verdict::pass : Verdict::fail;
  return rep;
}

RegularityReport d_regular_via_submersion(const MapGerm& g, const BallConfig& cfg,
                                          const SamplingPlan& plan,
                                          const ExclusionSet& excl) {
  RegularityReport rep;
  rep.method = "submersion";
  rep.seed = plan.seed;
  const int n = g.source_dim();
  const int k = g.target_dim();
  const double eps = cfg.eps;
  const auto radii = scan_radii(eps);
  rep.radii_scanned = radii;
  rep.directions_scanned = 0;

  if (k == 1) {
    rep.notes.push_back("k = 1: the sphere restriction of f/|f| needs rank 0;"
                        " nothing to check");
    rep.verdict = Verdict::pass;
    return rep;
  }

  const int nr = static_cast<int>(radii.size());
  const int per_radius = std::max(16, plan.points / nr);
  const int total = per_radius * nr;

  // phi restricted to a sphere: rows of dphi pair with a tangent basis.
  // N keeps the unprojected restriction Df T / |f|, whose leading singular
  // value sets the scale that the projected matrix is measured against:
  // phi itself is a structural left null vector of M, so the submersion
  // test is sigma_{k-1}(M) against sigma_1(N), not a ratio within M.
  auto sphere_matrix = [&](const Eigen::VectorXd& x, Eigen::VectorXd& phi_out,
                           Eigen::MatrixXd& M, Eigen::MatrixXd& N) -> bool {
    Eigen::VectorXd f;
    Eigen::MatrixXd Df;
    try {
      f = g.eval(x);
      Df = g.jacobian(x);
    } catch (const Error&) {
      return false;
    }
    const double nf = f.norm();
    if (nf <= kZeroFiberNorm) return false;
    phi_out = f / nf;
    const Eigen::MatrixXd T = orth_complement(x / x.norm());  // n x (n-1)
    N = Df * T / nf;
    M = N - phi_out * (phi_out.transpose() * N);
    return true;
  };

  // sigma_{k-1}(M) / sigma_1(N): zero exactly when the projected sphere
  // restriction drops below the submersion rank k - 1.
  auto sub_ratio = [&](const Eigen::MatrixXd& M, const Eigen::MatrixXd& N) {
    const Eigen::VectorXd svn = singular_values(N);
    if (svn.size() == 0 || svn(0) < 1e-300) return 0.0;
    const Eigen::VectorXd svm = singular_values(M);
    const int want = std::min(k - 1, static_cast<int>(svm.size()));
    if (want <= 0) return 0.0;
    return svm(want - 1) / svn(0);
  };

  struct PointOut {
    Candidate cand;
    bool has = false;
    bool excluded = false;
    bool zero_fiber = false;
  };
  std::vector<PointOut> slots(total);

  parallel_for_index(total, plan.jobs, [&](int i) {
    const int ri = i / per_radius;
    auto rng = indexed_rng(plan.seed, 0x7375626d72ULL, i);
    const Eigen::VectorXd x = radii[ri] * sample_sphere(rng, n);
    Eigen::VectorXd f;
    try {
      f = g.eval(x);
    } catch (const Error&) {
      return;
    }
    if (f.norm() <= kZeroFiberNorm) {
      slots[i].zero_fiber = true;
      return;
    }
    const Eigen::VectorXd ph = f / f.norm();
    if (excl.excludes(ph)) {
      slots[i].excluded = true;
      return;
    }
    Eigen::VectorXd ph2;
    Eigen::MatrixXd M, N;
    if (!sphere_matrix(x, ph2, M, N)) return;
    Candidate c;
    c.x = x;
    c.theta = ph2;
    c.ratio = sub_ratio(M, N);
    slots[i].cand = std::move(c);
    slots[i].has = true;
  });

  std::vector<Candidate> cands;
  for (const auto& s : slots) {
    rep.points_scanned++;
    if (s.excluded || s.zero_fiber) rep.excluded++;
    if (s.has) cands.push_back(s.cand);
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.ratio < b.ratio; });
  // Greedy angular spread over phi: points hugging one discriminant fiber
  // all share the same phi and would crowd every other basin out of the
  // refinement list.
  {
    std::vector<Candidate> picked;
    for (const auto& c : cands) {
      bool close = false;
      for (const auto& p : picked)
        if ((c.theta - p.theta).norm() < 0.05) { close = true; break; }
      if (!close) picked.push_back(c);
      if (picked.size() >= 24) break;
    }
    cands = std::move(picked);
  }

  // Refinement: unknowns (x, c) with c a unit covector orthogonal to phi
  // annihilating the restricted differential; the radius rides along with x.
  for (const auto& c0 : cands) {
    Eigen::VectorXd z(n + k);
    z.head(n) = c0.x;
    {
      Eigen::VectorXd ph;
      Eigen::MatrixXd M, N;
      if (!sphere_matrix(c0.x, ph, M, N)) continue;
      Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU);
      // phi spans a structural left null direction of M; the seed covector
      // is the smallest left singular vector that is not phi.
      Eigen::VectorXd c;
      for (int j = static_cast<int>(svd.matrixU().cols()) - 1; j >= 0; --j) {
        Eigen::VectorXd cj = svd.matrixU().col(j);
        cj -= ph * ph.dot(cj);
        if (cj.norm() > 0.5) { c = cj.normalized(); break; }
      }
      if (c.size() == 0) continue;
      z.tail(k) = c;
    }

    ResidualSystem sys;
    sys.residual = [&](const Eigen::VectorXd& zz) {
      const Eigen::VectorXd x = zz.head(n);
      const Eigen::VectorXd cv = zz.tail(k);
      if (x.norm() < 1e-12) throw DomainError("refinement collapsed to the origin");
      Eigen::VectorXd ph;
      Eigen::MatrixXd M, N;
      if (!sphere_matrix(x, ph, M, N))
        throw DomainError("phi undefined along refinement path");
      Eigen::VectorXd res(n - 1 + 2);
      res.head(n - 1) = M.transpose() * cv;
      res(n - 1) = cv.dot(ph);
      res(n - 1 + 1) = cv.squaredNorm() - 1.0;
      return res;
    };
    GaussNewtonOptions opts;
    opts.max_iters = 60;
    opts.residual_tol = 1e-12;
    opts.max_step = 0.25 * eps;
    const auto res = gauss_newton(sys, z, opts);
    // The refinement system is underdetermined, so the step-size flag can
    // stay unset while the iterate rides the solution manifold; the residual
    // plus the recomputed ratio below are the actual certificate.
    if (res.residual_norm > kWitnessResidual) continue;

    const Eigen::VectorXd x = res.x.head(n);
    const double nx = x.norm();
    if (nx < kMinRadiusFactor * eps || nx > eps * (1.0 + 1e-9)) continue;
    Eigen::VectorXd ph;
    Eigen::MatrixXd M, N;
    if (!sphere_matrix(x, ph, M, N)) continue;
    Eigen::VectorXd f;
    try {
      f = g.eval(x);
    } catch (const Error&) {
      continue;
    }
    if (f.norm() < kMinImageNorm) continue;
    if (excl.excludes(ph)) continue;
    const double ratio = sub_ratio(M, N);
    if (ratio > kWitnessSigma) continue;

    bool dup = false;
    for (const auto& w : rep.witnesses)
      if ((w.x - x).norm() < 1e-6 * eps) { dup = true; break; }
    if (dup) continue;
    Witness w;
    w.x = x;
    w.theta_or_y = ph;
    w.sigma_min = ratio;
    w.residual = res.residual_norm;
    rep.witnesses.push_back(std::move(w));
  }

  rep.verdict = rep.witnesses.empty() ? Verdict::pass : Verdict::fail;
  return rep;
}

RegularityReport d_regular(const MapGerm& g, const BallConfig& cfg,
                           const SamplingPlan& plan,
                           const DiscriminantModel* model) {
  DiscriminantModel local;
  if (!model) {
    local = discriminant_sample(g, cfg, plan);
    model = &local;
  }
  const ExclusionSet excl = ExclusionSet::from_model(*model);

  RegularityReport rays = d_regular_via_rays(g, cfg, plan, excl);
  RegularityReport subm = d_regular_via_submersion(g, cfg, plan, excl);

  RegularityReport rep;
  rep.method = "both";
  rep.seed = plan.seed;
  rep.directions_scanned = rays.directions_scanned;
  rep.radii_scanned = rays.radii_scanned;
  rep.points_scanned = rays.points_scanned + subm.points_scanned;
  rep.excluded = rays.excluded + subm.excluded;
  rep.empty_count = rays.empty_count;
  rep.notes = model->notes;
  rep.notes.insert(rep.notes.end(), rays.notes.begin(), rays.notes.end());
  rep.notes.insert(rep.notes.end(), subm.notes.begin(), subm.notes.end());
  rep.witnesses = rays.witnesses;
  rep.witnesses.insert(rep.witnesses.end(), subm.witnesses.begin(),
                       subm.witnesses.end());
  if (rays.verdict == subm.verdict) {
    rep.verdict = rays.verdict;
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.notes.push_back(std::string("methods disagree: ray scan says ") +
                        verdict_name(rays.verdict) + ", submersion scan says " +
                        verdict_name(subm.verdict));
  }
  return rep;
}

}  // namespace milnorlab
