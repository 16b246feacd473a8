#include "milnorlab/critical_locus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>

#include "milnorlab/solvers.hpp"

namespace milnorlab {

double default_delta(const MapGerm& g, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  if (std::holds_alternative<FamilyPsi>(g.family())) return bump(eps * eps);
  if (const auto* mod = std::get_if<FamilyModified>(&g.family()))
    return default_delta(*mod->base, eps);
  return eps * eps / 10.0;
}

BallConfig default_ball(const MapGerm& g, double eps) {
  BallConfig cfg;
  cfg.eps0 = 2.0 * eps;
  cfg.eps = eps;
  cfg.delta = default_delta(g, eps);
  cfg.validate();
  return cfg;
}

namespace {

/// All size-m index subsets of {0..n-1}, lexicographic.
std::vector<std::vector<int>> index_subsets(int n, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(m);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == m) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i <= n - (m - depth); ++i) {
      cur[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  if (m <= n && m >= 1) rec(0, 0);
  return out;
}

/// Vector of all m x m minors of A taken from the given row set and all
/// column subsets.
Eigen::VectorXd stacked_minors(const Eigen::MatrixXd& A,
                               const std::vector<std::vector<int>>& col_sets) {
  const int m = static_cast<int>(A.rows());
  Eigen::VectorXd out(col_sets.size());
  Eigen::MatrixXd M(m, m);
  for (size_t s = 0; s < col_sets.size(); ++s) {
    for (int j = 0; j < m; ++j) M.col(j) = A.col(col_sets[s][j]);
    out(s) = M.determinant();
  }
  return out;
}

std::vector<Eigen::VectorXd> stratified_seeds(const MapGerm& g, const BallConfig& cfg,
                                              const SamplingPlan& plan, std::uint64_t salt) {
  std::mt19937_64 rng(plan.seed ^ salt);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int n = g.source_dim();
  std::vector<Eigen::VectorXd> seeds;
  seeds.reserve(plan.points);
  for (int i = 0; i < plan.points; ++i) {
    const int stratum = i % 4;
    Eigen::VectorXd p;
    if (stratum == 0) {
      p = cfg.eps * sample_ball(rng, n);
    } else if (stratum == 1) {
      // Near a random coordinate subspace: critical sets of diagonal and
      // quasi-homogeneous families live on them.
      p = cfg.eps * sample_ball_log(rng, n, 1e-3);
      const double r = p.norm();
      int kept = 0;
      for (int j = 0; j < n; ++j)
        if (uni(rng) < 0.5) ++kept;
      if (kept == 0) kept = 1;
      // Zero out all but `kept` random coordinates, then jitter.
      std::vector<int> idx(n);
      for (int j = 0; j < n; ++j) idx[j] = j;
      for (int j = n - 1; j > 0; --j)
        std::swap(idx[j], idx[static_cast<int>(uni(rng) * (j + 1)) % (j + 1)]);
      for (int j = kept; j < n; ++j) p(idx[j]) = 0.0;
      if (p.norm() < 1e-12 * cfg.eps) p(idx[0]) = r;
      for (int j = 0; j < n; ++j) p(j) += 1e-3 * r * (uni(rng) - 0.5);
    } else if (stratum == 2) {
      p = cfg.eps * sample_ball_log(rng, n, 1e-3);
    } else {
      // Near-sphere shell: geometry pinched against S_eps lives here.
      p = (cfg.eps * (0.9 + 0.1 * uni(rng))) * sample_sphere(rng, n);
    }
    seeds.push_back(std::move(p));
  }
  return seeds;
}

}  // namespace

int rank_defect(const MapGerm& g, const Eigen::VectorXd& x, double tol) {
  const Eigen::MatrixXd J = g.jacobian(x);
  return rank_deficiency(J, tol);
}

std::vector<CriticalSample> sample_critical_set(const MapGerm& g, const BallConfig& cfg,
                                                const SamplingPlan& plan) {
  cfg.validate();
  const int n = g.source_dim();
  const int k = g.target_dim();
  const auto col_sets = index_subsets(n, k);
  if (col_sets.empty()) return {};

  GaussNewtonOptions opts;
  opts.max_iters = 60;
  opts.residual_tol = 1e-13;
  opts.max_step = 0.25 * cfg.eps;

  const auto seeds = stratified_seeds(g, cfg, plan, 0x6372697469ULL);
  std::vector<CriticalSample> hits(seeds.size());
  std::vector<char> ok(seeds.size(), 0);

  parallel_for_index(static_cast<int>(seeds.size()), plan.jobs, [&](int i) {
    // Pin the solve to the seed's own sphere: critical sets through the
    // origin would otherwise pull every Gauss-Newton run into 0, where the
    // minors vanish to high order but the rank test has no room to fire.
    const double r0 = seeds[i].norm();
    if (r0 <= 0.0) return;
    ResidualSystem sys;
    sys.residual = [&, r0](const Eigen::VectorXd& x) {
      const Eigen::VectorXd m = stacked_minors(g.jacobian(x), col_sets);
      Eigen::VectorXd r(m.size() + 1);
      r.head(m.size()) = m;
      r(m.size()) = (x.squaredNorm() - r0 * r0) / (2.0 * r0);
      return r;
    };
    const auto res = gauss_newton(sys, seeds[i], opts);
    if (res.residual_norm > 1e-10) return;
    if (res.x.norm() > cfg.eps * (1.0 + 1e-9)) return;
    int defect = 0;
    double minor_norm = 0.0;
    try {
      defect = rank_defect(g, res.x);
      minor_norm = stacked_minors(g.jacobian(res.x), col_sets).norm();
    } catch (const Error&) {
      return;
    }
    if (defect < 1) return;
    CriticalSample cs;
    cs.x = res.x;
    try {
      cs.image = g.eval(res.x);
    } catch (const Error&) {
      return;
    }
    cs.defect = defect;
    cs.residual = minor_norm;
    hits[i] = std::move(cs);
    ok[i] = 1;
  });

  std::vector<CriticalSample> out;
  for (size_t i = 0; i < seeds.size(); ++i)
    if (ok[i]) out.push_back(std::move(hits[i]));
  return out;
}

DiscriminantModel discriminant_sample(const MapGerm& g, const BallConfig& cfg,
                                      const SamplingPlan& plan) {
  DiscriminantModel model;
  model.cfg = cfg;
  model.seed = plan.seed;
  model.seeds_tried = plan.points;

  auto samples = sample_critical_set(g, cfg, plan);

  // Deduplicate images on a grid of resolution 1e-4 * delta, keeping the
  // first (deterministic) representative; preimages stay attached.
  const double res = 1e-4 * cfg.delta;
  std::set<std::vector<long long>> cells;
  for (auto& s : samples) {
    std::vector<long long> key(s.image.size());
    for (Eigen::Index i = 0; i < s.image.size(); ++i)
      key[i] = static_cast<long long>(std::floor(s.image(i) / res));
    if (cells.insert(std::move(key)).second) model.points.push_back(std::move(s));
  }

  try {
    model.branches = oracle_discriminant(g, cfg);
  } catch (const NoOracle&) {
    model.notes.push_back("no closed-form discriminant known for this germ");
  }

  if (std::holds_alternative<FamilyPsi>(g.family())) {
    const auto& fam = std::get<FamilyPsi>(g.family());
    const auto chk = psi_sphere_radius_check(fam.n, cfg.eps, plan);
    if (chk.heights_disagree) model.notes.push_back(psi_height_note(chk));
  }
  return model;
}

namespace {

std::vector<double> uniform_grid(double lo, double hi, int count) {
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  return g;
}

/// Largest t in [lo, hi] with |at(t)| <= delta, for curves leaving the
/// delta-disc monotonically; hi when the whole range stays inside.
double cap_at_delta(const std::function<Eigen::VectorXd(double)>& at, double lo,
                    double hi, double delta) {
  if (at(hi).norm() <= delta) return hi;
  if (at(lo).norm() > delta) return lo;
  double a = lo, b = hi;
  for (int i = 0; i < 200 && (b - a) > 1e-15 * std::max(1.0, std::fabs(hi)); ++i) {
    const double m = 0.5 * (a + b);
    (at(m).norm() <= delta ? a : b) = m;
  }
  return a;
}

Eigen::VectorXd eval_exprs(const std::vector<ExprPtr>& es, const Eigen::VectorXd& u) {
  Eigen::VectorXd out(es.size());
  for (size_t i = 0; i < es.size(); ++i) out(i) = eval_expr(*es[i], u);
  return out;
}

}  // namespace

std::vector<OracleBranch> oracle_discriminant(const MapGerm& g, const BallConfig& cfg) {
  std::vector<OracleBranch> out;
  const double eps = cfg.eps;

  if (const auto* ldm = std::get_if<FamilyLdm>(&g.family())) {
    const int p = ldm->p, q = ldm->q;
    // Every component of the critical set is a line through 0, and its image
    // is a monomial curve (A t^p, B t^q) with t the first nonzero coordinate.
    auto monomial_branch = [&](const std::string& name, double A, double B,
                               double tmax) {
      OracleBranch br;
      br.name = name;
      br.t_lo = -tmax;
      br.t_hi = tmax;
      br.at = [A, B, p, q](double t) {
        Eigen::VectorXd u(2);
        u << A * ipow(t, p), B * ipow(t, q);
        return u;
      };
      br.reach_hi = cap_at_delta(br.at, 0.0, tmax, cfg.delta);
      br.reach_lo = -cap_at_delta([&br](double t) { return br.at(-t); }, 0.0, tmax,
                                  cfg.delta);
      br.grid = uniform_grid(br.t_lo, br.t_hi, 257);
      out.push_back(std::move(br));
    };

    for (size_t i = 0; i < ldm->lambda.size(); ++i) {
      const double a = ldm->lambda[i].first, b = ldm->lambda[i].second;
      monomial_branch("axis" + std::to_string(i + 1), a, b, eps);
    }

    // For p != q the 2x2 minor over columns (i, j) factors as
    // x_i^{q-1} x_j^{q-1} (a_i b_j x_i^{p-q} - a_j b_i x_j^{p-q}), so pairs
    // with a_i b_j and a_j b_i both nonzero contribute lines x_j = c x_i with
    // c^{p-q} = a_i b_j / (a_j b_i), all other coordinates zero.
    if (p != q) {
      const int d = p - q;
      for (size_t i = 0; i < ldm->lambda.size(); ++i)
        for (size_t j = i + 1; j < ldm->lambda.size(); ++j) {
          const double ai = ldm->lambda[i].first, bi = ldm->lambda[i].second;
          const double aj = ldm->lambda[j].first, bj = ldm->lambda[j].second;
          if (ai * bj == 0.0 || aj * bi == 0.0) continue;
          const double rho = (ai * bj) / (aj * bi);
          std::vector<double> roots;
          if (d % 2 != 0) {
            roots.push_back(std::copysign(std::pow(std::fabs(rho), 1.0 / d), rho));
          } else if (rho > 0.0) {
            const double c = std::pow(rho, 1.0 / d);
            roots.push_back(c);
            roots.push_back(-c);
          }
          for (size_t ri = 0; ri < roots.size(); ++ri) {
            const double c = roots[ri];
            const double A = ai + aj * ipow(c, p);
            const double B = bi + bj * ipow(c, q);
            if (A == 0.0 && B == 0.0) continue;
            std::string name = "line" + std::to_string(i + 1) + std::to_string(j + 1);
            if (ri == 1) name += "n";
            monomial_branch(name, A, B, eps / std::sqrt(1.0 + c * c));
          }
        }
    }
    return out;
  }

  if (std::get_if<FamilyPsi>(&g.family())) {
    OracleBranch curve;
    curve.name = "curve";
    curve.t_lo = 1.0 / 256;
    curve.t_hi = 2.0 - 1.0 / 256;
    curve.at = [](double s) {
      Eigen::VectorXd u(2);
      u << bump(s * (2.0 - s)), bump(s * (4.0 - s));
      return u;
    };
    curve.reach_lo = 1.0 / 256;
    curve.reach_hi = cap_at_delta(curve.at, curve.t_lo, std::min(eps, curve.t_hi),
                                  cfg.delta);
    // Dyadic grid: hits s = 1 exactly, where the curve passes through
    // (e^{-1}, e^{-1/3}).
    for (int i = 1; i <= 511; ++i) curve.grid.push_back(static_cast<double>(i) / 256.0);
    out.push_back(std::move(curve));

    OracleBranch axis;
    axis.name = "axis";
    axis.t_lo = 0.0;
    axis.t_hi = std::exp(-0.25);
    axis.reach_lo = 0.0;
    axis.reach_hi = bump(eps * eps);  // largest height reached from B_eps
    axis.at = [](double t) {
      Eigen::VectorXd u(2);
      u << 0.0, t;
      return u;
    };
    axis.grid = uniform_grid(axis.t_lo, axis.t_hi, 257);
    out.push_back(std::move(axis));
    return out;
  }

  if (const auto* cat = std::get_if<FamilyCatalog>(&g.family())) {
    if (cat->name == "projection") return out;  // submersion: empty discriminant
    if (cat->name == "ex6") {
      OracleBranch origin;
      origin.name = "origin";
      origin.at = [](double) { return Eigen::VectorXd::Zero(2); };
      origin.grid = {0.0};
      out.push_back(std::move(origin));
      return out;
    }
    if (cat->name == "parabola") {
      // Critical line {x = y, z = 0}; image (2x, 2x^2), so v = u^2/2.
      const double umax = std::sqrt(2.0) * eps;
      OracleBranch br;
      br.name = "parabola";
      br.t_lo = -umax;
      br.t_hi = umax;
      br.at = [](double u) {
        Eigen::VectorXd y(2);
        y << u, 0.5 * u * u;
        return y;
      };
      br.reach_hi = cap_at_delta(br.at, 0.0, umax, cfg.delta);
      br.reach_lo = -br.reach_hi;  // |at(-u)| = |at(u)|, so one cap serves both
      br.grid = uniform_grid(br.t_lo, br.t_hi, 257);
      out.push_back(std::move(br));
      return out;
    }
    if (cat->name == "nondreg4") {
      OracleBranch br;
      br.name = "axis3";
      br.t_lo = -eps;
      br.t_hi = eps;
      br.at = [](double w) {
        Eigen::VectorXd y(3);
        y << 0.0, 0.0, w;
        return y;
      };
      br.reach_hi = std::min(eps, cfg.delta);  // |at(w)| = |w|
      br.reach_lo = -br.reach_hi;
      br.grid = uniform_grid(br.t_lo, br.t_hi, 257);
      out.push_back(std::move(br));
      return out;
    }
    throw NoOracle("no discriminant oracle for catalog germ " + cat->name);
  }

  if (const auto* mod = std::get_if<FamilyModified>(&g.family())) {
    auto base = oracle_discriminant(*mod->base, cfg);
    for (auto& br : base) {
      OracleBranch pulled = br;
      pulled.name = br.name + "_pulled";
      auto base_at = br.at;
      auto inv = mod->inverse;
      pulled.at = [base_at, inv](double t) { return eval_exprs(inv, base_at(t)); };
      if (br.reach_lo < br.reach_hi) {
        // The modification changes image norms, so re-cap in the pulled target.
        const bool spans_zero = br.reach_lo <= 0.0 && 0.0 <= br.reach_hi;
        const double anchor = spans_zero ? 0.0 : br.reach_lo;
        pulled.reach_hi = cap_at_delta(pulled.at, anchor, br.reach_hi, cfg.delta);
        if (spans_zero) {
          pulled.reach_lo = -cap_at_delta(
              [&pulled](double t) { return pulled.at(-t); }, 0.0, -br.reach_lo,
              cfg.delta);
        }
      }
      out.push_back(std::move(pulled));
    }
    return out;
  }

  throw NoOracle("no discriminant oracle for an untagged germ");
}

namespace {

double branch_distance(const OracleBranch& br, const Eigen::VectorXd& u) {
  if (br.t_lo == br.t_hi) return (u - br.at(br.t_lo)).norm();
  // Coarse scan, then golden-section refinement around the best cell.
  const int N = 512;
  double best_t = br.t_lo, best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= N; ++i) {
    const double t = br.t_lo + (br.t_hi - br.t_lo) * i / N;
    const double d = (u - br.at(t)).norm();
    if (d < best_d) {
      best_d = d;
      best_t = t;
    }
  }
  const double span = (br.t_hi - br.t_lo) / N;
  double a = std::max(br.t_lo, best_t - span), b = std::min(br.t_hi, best_t + span);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = (u - br.at(c)).norm(), fd = (u - br.at(d)).norm();
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = (u - br.at(c)).norm();
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = (u - br.at(d)).norm();
    }
  }
  return std::min({best_d, fc, fd});
}

}  // namespace

OracleComparison compare_to_oracle(const DiscriminantModel& model, double coverage_radius) {
  if (model.branches.empty())
    throw NoOracle("discriminant model carries no oracle branches");
  OracleComparison cmp;
  cmp.samples = static_cast<int>(model.points.size());
  cmp.coverage_radius =
      coverage_radius > 0.0 ? coverage_radius : 0.05 * model.cfg.delta;

  for (const auto& s : model.points) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& br : model.branches) d = std::min(d, branch_distance(br, s.image));
    cmp.max_distance = std::max(cmp.max_distance, d);
  }

  int covered = 0, total = 0;
  for (const auto& br : model.branches) {
    const int N = 256;
    for (int i = 0; i <= N; ++i) {
      const double t = br.reach_lo + (br.reach_hi - br.reach_lo) * i / N;
      const Eigen::VectorXd u = br.at(t);
      ++total;
      double d = std::numeric_limits<double>::infinity();
      for (const auto& s : model.points) d = std::min(d, (u - s.image).norm());
      if (d <= cmp.coverage_radius) ++covered;
      if (br.reach_lo == br.reach_hi) break;
    }
  }
  cmp.oracle_points = total;
  cmp.coverage = total ? static_cast<double>(covered) / total : 1.0;
  return cmp;
}

BoundaryCritical boundary_critical(const MapGerm& g, const DiscriminantModel& interior,
                                   const SamplingPlan& plan) {
  const BallConfig& cfg = interior.cfg;
  const int n = g.source_dim();
  const int k = g.target_dim();
  BoundaryCritical out;
  if (n < k + 1) return out;

  const auto col_sets = index_subsets(n, k + 1);
  ResidualSystem sys;
  sys.residual = [&](const Eigen::VectorXd& x) {
    Eigen::MatrixXd M(k + 1, n);
    M.topRows(k) = g.jacobian(x);
    M.row(k) = x.transpose();
    Eigen::VectorXd m = stacked_minors(M, col_sets);
    Eigen::VectorXd r(m.size() + 1);
    r.head(m.size()) = m;
    r(m.size()) = (x.squaredNorm() - cfg.eps * cfg.eps) / (2.0 * cfg.eps);
    return r;
  };

  GaussNewtonOptions opts;
  opts.residual_tol = 1e-10;
  opts.max_step = 0.25 * cfg.eps;

  std::mt19937_64 rng(plan.seed ^ 0x626f756e64ULL);
  const int count = std::max(64, plan.points / 4);
  std::vector<Eigen::VectorXd> seeds;
  seeds.reserve(count);
  for (int i = 0; i < count; ++i) seeds.push_back(cfg.eps * sample_sphere(rng, n));

  std::vector<CriticalSample> hits(count);
  std::vector<char> ok(count, 0);
  parallel_for_index(count, plan.jobs, [&](int i) {
    const auto res = gauss_newton(sys, seeds[i], opts);
    if (!res.converged) return;
    Eigen::MatrixXd M(k + 1, n);
    try {
      M.topRows(k) = g.jacobian(res.x);
    } catch (const Error&) {
      return;
    }
    M.row(k) = res.x.transpose();
    if (rank_deficiency(M, 1e-8) < 1) return;
    CriticalSample cs;
    cs.x = res.x;
    try {
      cs.image = g.eval(res.x);
    } catch (const Error&) {
      return;
    }
    cs.defect = rank_deficiency(M, 1e-8);
    cs.residual = res.residual_norm;
    hits[i] = std::move(cs);
    ok[i] = 1;
  });

  const double res_grid = 1e-4 * cfg.delta;
  std::set<std::vector<long long>> cells;
  for (int i = 0; i < count; ++i) {
    if (!ok[i]) continue;
    std::vector<long long> key(hits[i].image.size());
    for (Eigen::Index j = 0; j < hits[i].image.size(); ++j)
      key[j] = static_cast<long long>(std::floor(hits[i].image(j) / res_grid));
    if (cells.insert(std::move(key)).second) out.points.push_back(std::move(hits[i]));
  }

  // Flag boundary images inside B_delta that the interior discriminant does
  // not explain.
  const double match_tol = std::max(1e-2 * cfg.delta, 10.0 * res_grid);
  for (const auto& b : out.points) {
    if (b.image.norm() > cfg.delta) continue;
    double d = std::numeric_limits<double>::infinity();
    for (const auto& s : interior.points) d = std::min(d, (b.image - s.image).norm());
    for (const auto& br : interior.branches)
      d = std::min(d, branch_distance(br, b.image));
    if (d > match_tol) out.new_inside_delta.push_back(b.image);
  }
  return out;
}

SphereFamilyCheck psi_sphere_radius_check(int n, double eps, const SamplingPlan& plan) {
  if (n < 2) throw PreconditionError("psi needs dimension >= 2");
  SphereFamilyCheck chk;
  chk.eps = eps;
  chk.r2_closed_form = 4.0 - eps * eps;
  chk.r2_min = std::numeric_limits<double>::infinity();
  chk.r2_max = -std::numeric_limits<double>::infinity();

  // Solve |x| = eps, |x - p1| = 1 for points (x1, rho * omega) and record
  // |x - p2|^2.  Newton in (x1, rho) per direction omega.
  std::mt19937_64 rng(plan.seed ^ 0x70736972ULL);
  const int dirs = std::max(16, plan.directions / 8);
  for (int d = 0; d < dirs; ++d) {
    Eigen::VectorXd omega = sample_sphere(rng, n - 1);
    double x1 = 0.5 * eps, rho = 0.5 * eps;
    for (int it = 0; it < 60; ++it) {
      const double f1 = x1 * x1 + rho * rho - eps * eps;
      const double f2 = (x1 - 1.0) * (x1 - 1.0) + rho * rho - 1.0;
      Eigen::Matrix2d J;
      J << 2.0 * x1, 2.0 * rho, 2.0 * (x1 - 1.0), 2.0 * rho;
      Eigen::Vector2d r(f1, f2);
      const Eigen::Vector2d step = J.partialPivLu().solve(-r);
      x1 += step(0);
      rho += step(1);
      if (step.norm() < 1e-15) break;
    }
    Eigen::VectorXd x(n);
    x(0) = x1;
    x.tail(n - 1) = rho * omega;
    Eigen::VectorXd p2 = Eigen::VectorXd::Zero(n);
    p2(0) = 2.0;
    const double r2 = (x - p2).squaredNorm();
    chk.r2_min = std::min(chk.r2_min, r2);
    chk.r2_max = std::max(chk.r2_max, r2);
  }

  const double r = std::sqrt(chk.r2_closed_form);
  chk.derived_height = std::exp(-1.0 / (4.0 - r * r));
  chk.quoted_height = std::exp(-1.0 / (r * (4.0 - r)));
  chk.heights_disagree =
      std::fabs(chk.derived_height - chk.quoted_height) >
      1e-12 * std::max(chk.derived_height, chk.quoted_height);
  return chk;
}

std::string psi_height_note(const SphereFamilyCheck& chk) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "sphere-family image height: using derived value exp(-1/(4-r^2)) = %.17g; "
                "the quoted closed form exp(-1/(r(4-r))) = %.17g does not match the "
                "derivation and is not used",
                chk.derived_height, chk.quoted_height);
  return buf;
}

}  // namespace milnorlab
