#include "milnorlab/fiber_probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "milnorlab/errors.hpp"
#include "milnorlab/solvers.hpp"

namespace milnorlab {

namespace {

std::mt19937_64 indexed_rng(std::uint64_t seed, std::uint64_t salt, std::uint64_t index) {
  std::mt19937_64 rng(seed ^ salt ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  rng.discard(3);
  return rng;
}

std::vector<Eigen::VectorXd> dedup(const std::vector<Eigen::VectorXd>& pts, double radius) {
  std::vector<Eigen::VectorXd> kept;
  for (const auto& p : pts) {
    bool close = false;
    for (const auto& q : kept) {
      if ((p - q).norm() <= radius) {
        close = true;
        break;
      }
    }
    if (!close) kept.push_back(p);
  }
  return kept;
}

/// 3 x median nearest-neighbor distance; 0 for fewer than two points.
double linking_radius_of(const std::vector<Eigen::VectorXd>& pts) {
  const size_t m = pts.size();
  if (m < 2) return 0.0;
  std::vector<double> nn(m, std::numeric_limits<double>::infinity());
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j) {
      const double d = (pts[i] - pts[j]).norm();
      nn[i] = std::min(nn[i], d);
      nn[j] = std::min(nn[j], d);
    }
  std::sort(nn.begin(), nn.end());
  const double median = m % 2 ? nn[m / 2] : 0.5 * (nn[m / 2 - 1] + nn[m / 2]);
  return 3.0 * median;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int m) : parent(m) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

FiberCloud sample_fiber(const MapGerm& g, const Eigen::VectorXd& target,
                        double ball, const SamplingPlan& plan) {
  FiberCloud cloud;
  cloud.target = target;
  cloud.ball = ball;
  const int n = g.source_dim();

  ResidualSystem sys;
  sys.residual = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return g.eval(x) - target;
  };
  sys.jacobian = [&](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return g.jacobian(x);
  };
  GaussNewtonOptions gn;
  gn.max_iters = 60;
  gn.residual_tol = 1e-11;
  gn.max_step = 0.25 * ball;

  std::vector<Eigen::VectorXd> slots(static_cast<size_t>(plan.points));
  parallel_for_index(plan.points, plan.jobs, [&](int i) {
    auto rng = indexed_rng(plan.seed, 0x666962636cULL, static_cast<std::uint64_t>(i));
    const Eigen::VectorXd x0 = ball * sample_ball(rng, n);
    const GaussNewtonResult res = gauss_newton(sys, x0, gn);
    if (res.residual_norm <= 1e-9 && res.x.norm() <= ball)
      slots[static_cast<size_t>(i)] = res.x;
  });

  std::vector<Eigen::VectorXd> raw;
  for (const auto& s : slots)
    if (s.size() > 0) raw.push_back(s);
  // Merge seeds that converged to the same point, compute the cloud scale,
  // then thin to the advertised linking_radius / 4 spacing.
  std::vector<Eigen::VectorXd> pts = dedup(raw, 1e-9 * std::max(ball, 1.0));
  const double provisional = linking_radius_of(pts);
  if (provisional > 0.0) pts = dedup(pts, provisional / 4.0);
  cloud.points = std::move(pts);
  cloud.linking_radius = linking_radius_of(cloud.points);
  return cloud;
}

int component_count(const FiberCloud& cloud) {
  return component_count(cloud, cloud.linking_radius);
}

int component_count(const FiberCloud& cloud, double linking_radius) {
  const int m = static_cast<int>(cloud.points.size());
  if (m == 0) throw EmptyCloud("component count of an empty fiber cloud");
  UnionFind uf(m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if ((cloud.points[static_cast<size_t>(i)] - cloud.points[static_cast<size_t>(j)])
              .norm() <= linking_radius)
        uf.unite(i, j);
  int count = 0;
  for (int i = 0; i < m; ++i)
    if (uf.find(i) == i) ++count;
  return count;
}

LocalDim local_dimension(const FiberCloud& cloud) {
  if (cloud.points.empty()) throw EmptyCloud("local dimension of an empty fiber cloud");
  LocalDim out;
  const int m = static_cast<int>(cloud.points.size());
  const int n = static_cast<int>(cloud.points.front().size());
  double total = 0.0;
  for (int a = 0; a < m; ++a) {
    std::vector<int> nbrs;
    for (int j = 0; j < m; ++j)
      if ((cloud.points[static_cast<size_t>(a)] - cloud.points[static_cast<size_t>(j)])
              .norm() <= cloud.linking_radius)
        nbrs.push_back(j);
    if (nbrs.size() < 3) continue;
    Eigen::MatrixXd X(static_cast<int>(nbrs.size()), n);
    for (size_t r = 0; r < nbrs.size(); ++r)
      X.row(static_cast<int>(r)) = cloud.points[static_cast<size_t>(nbrs[r])];
    const Eigen::RowVectorXd mean = X.colwise().mean();
    X.rowwise() -= mean;
    const Eigen::VectorXd sv = singular_values(X);
    if (sv(0) <= 0.0) continue;
    int dim = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) * sv(i) > 0.1 * sv(0) * sv(0)) ++dim;
    total += dim;
    ++out.anchors;
  }
  out.mean_dim = out.anchors ? total / out.anchors : 0.0;
  return out;
}

std::vector<Eigen::VectorXd> assemble_loop(const DiscriminantModel& model) {
  std::vector<std::vector<Eigen::VectorXd>> strands;
  for (const auto& br : model.branches) {
    std::vector<Eigen::VectorXd> strand;
    for (double t : br.grid) strand.push_back(br.at(t));
    if (strand.size() >= 2) strands.push_back(std::move(strand));
  }
  if (strands.empty())
    throw NoDiscriminant("no discriminant branch points to assemble into a loop");

  Eigen::VectorXd lo = strands[0][0], hi = strands[0][0];
  for (const auto& s : strands)
    for (const auto& p : s) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  const double diameter = (hi - lo).norm();

  std::vector<Eigen::VectorXd> chain = strands[0];
  std::vector<bool> used(strands.size(), false);
  used[0] = true;
  double max_gap = 0.0;
  for (size_t placed = 1; placed < strands.size(); ++placed) {
    const Eigen::VectorXd& tail = chain.back();
    size_t best = 0;
    bool best_reversed = false;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < strands.size(); ++s) {
      if (used[s]) continue;
      const double df = (strands[s].front() - tail).norm();
      const double db = (strands[s].back() - tail).norm();
      if (df < best_d) {
        best_d = df;
        best = s;
        best_reversed = false;
      }
      if (db < best_d) {
        best_d = db;
        best = s;
        best_reversed = true;
      }
    }
    used[best] = true;
    max_gap = std::max(max_gap, best_d);
    std::vector<Eigen::VectorXd> next = strands[best];
    if (best_reversed) std::reverse(next.begin(), next.end());
    for (auto& p : next) chain.push_back(std::move(p));
  }
  max_gap = std::max(max_gap, (chain.back() - chain.front()).norm());
  if (diameter > 0.0 && max_gap > 0.05 * diameter)
    throw PreconditionError("discriminant strands leave a gap of " +
                            std::to_string(max_gap) + " against diameter " +
                            std::to_string(diameter) + "; not a closed loop");
  return chain;
}

bool inside_loop(const std::vector<Eigen::VectorXd>& loop, const Eigen::VectorXd& y) {
  bool in = false;
  const size_t m = loop.size();
  for (size_t i = 0, j = m - 1; i < m; j = i++) {
    const double ax = loop[i](0), ay = loop[i](1);
    const double bx = loop[j](0), by = loop[j](1);
    if ((ay > y(1)) != (by > y(1)) &&
        y(0) < ax + (y(1) - ay) / (by - ay) * (bx - ax))
      in = !in;
  }
  return in;
}

SurjectivityProbe surjectivity_probe(const MapGerm& g, const DiscriminantModel& model,
                                     const std::vector<Eigen::VectorXd>& targets,
                                     double ball, const SamplingPlan& plan) {
  SurjectivityProbe probe;
  if (targets.empty()) {
    probe.notes.push_back("no targets supplied");
    return probe;
  }
  const std::vector<Eigen::VectorXd> loop = assemble_loop(model);

  bool all_consistent = true;
  for (const auto& target : targets) {
    SectorReport rep;
    rep.target = target;
    rep.inside = inside_loop(loop, target);
    const FiberCloud cloud = sample_fiber(g, target, ball, plan);
    rep.components = cloud.points.empty() ? 0 : component_count(cloud);
    rep.local_dim = cloud.points.empty() ? 0.0 : local_dimension(cloud).mean_dim;
    const bool consistent = rep.inside ? rep.components >= 1 : rep.components == 0;
    if (!consistent) {
      all_consistent = false;
      probe.notes.push_back(std::string(rep.inside ? "inside" : "outside") +
                            " target found " + std::to_string(rep.components) +
                            " fiber components; expected " +
                            (rep.inside ? "at least 1" : "0"));
    }
    probe.sectors.push_back(std::move(rep));
  }
  probe.verdict = all_consistent ? Verdict::pass : Verdict::fail;
  return probe;
}

}  // namespace milnorlab
