#include "milnorlab/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "milnorlab/solvers.hpp"

namespace milnorlab {

namespace {

Eigen::VectorXd eval_trees(const std::vector<ExprPtr>& trees,
                           const Eigen::VectorXd& u) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(trees.size()));
  for (size_t i = 0; i < trees.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = eval_expr(*trees[i], u);
  return out;
}

// sgn(t) |t|^m as a tree; odd m needs no splitting.
ExprPtr signed_pow(ExprPtr t, int m) {
  if (m % 2 != 0) return make_ipow(t, m);
  return make_guard(t, false, make_ipow(t, m), make_neg(make_ipow(make_neg(t), m)));
}

// sgn(t) |t|^{1/m} as a tree; odd-order roots are signed by the node itself.
ExprPtr signed_root(ExprPtr t, int m) {
  if (m % 2 != 0) return make_root(t, m);
  return make_guard(t, false, make_root(t, m), make_neg(make_root(make_neg(t), m)));
}

bool parse_parity(const std::string& name, int& p, int& q) {
  int consumed = 0;
  if (std::sscanf(name.c_str(), "parity( %d , %d )%n", &p, &q, &consumed) == 2 &&
      consumed == static_cast<int>(name.size()))
    return true;
  return false;
}

}  // namespace

Eigen::VectorXd ConicHomeo::apply(const Eigen::VectorXd& u) const {
  if (u.size() != k) throw PreconditionError("conic homeo: dimension mismatch");
  return eval_trees(forward, u);
}

Eigen::VectorXd ConicHomeo::apply_inverse(const Eigen::VectorXd& u) const {
  if (u.size() != k) throw PreconditionError("conic homeo: dimension mismatch");
  return eval_trees(inverse, u);
}

ConicHomeo catalog_homeo(const std::string& name) {
  ConicHomeo h;
  h.k = 2;
  h.tag = name;
  const ExprPtr u = make_var(0);
  const ExprPtr v = make_var(1);

  if (name == "identity") {
    h.forward = {u, v};
    h.inverse = {u, v};
    return h;
  }
  if (name == "cube") {
    h.forward = {u, make_ipow(v, 3)};
    h.inverse = {u, make_cbrt(v)};
    return h;
  }
  if (name == "inv_cube") {
    h.forward = {u, make_cbrt(v)};
    h.inverse = {u, make_ipow(v, 3)};
    return h;
  }
  if (name == "sqrt_sign") {
    h.forward = {signed_root(u, 2), make_div(v, make_const(2.0))};
    h.inverse = {signed_pow(u, 2), make_mul(make_const(2.0), v)};
    return h;
  }
  if (name.rfind("parity(", 0) == 0) {
    // parity(p,q): first coordinate gets exponent q, second gets p, so the
    // modification of (sum a_i x_i^p, sum b_i x_i^q) is homogeneous.
    int p = 0, q = 0;
    if (!parse_parity(name, p, q))
      throw UnknownName("malformed parity homeomorphism: " + name);
    if (p < 1 || q < 1)
      throw PreconditionError("parity exponents must be positive");
    h.forward = {signed_root(u, q), signed_root(v, p)};
    h.inverse = {signed_pow(u, q), signed_pow(v, p)};
    return h;
  }
  if (name == "psi_exp") {
    // Forward: (e^{1/(u(u-2))}, e^{1/(v(v-4))}) on (0,1)^2, written through
    // the flat bump so the extension by 0 at the axes is exact.
    h.forward = {make_bump(make_mul(u, make_sub(make_const(2.0), u))),
                 make_bump(make_mul(v, make_sub(make_const(4.0), v)))};
    h.inverse = {
        make_sub(make_const(1.0),
                 make_sqrt(make_add(make_const(1.0),
                                    make_div(make_const(1.0), make_log(u))))),
        make_sub(make_const(2.0),
                 make_sqrt(make_add(make_const(4.0),
                                    make_div(make_const(1.0), make_log(v)))))};
    h.domain_note =
        "inverse formulas hold for u in [0, e^-1], v in [0, e^-1/4]; both"
        " coordinates extend continuously by 0 at 0";
    return h;
  }
  throw UnknownName("unknown conic homeomorphism: " + name);
}

const std::vector<std::string>& homeo_names() {
  static const std::vector<std::string> names = {
      "identity", "cube", "inv_cube", "sqrt_sign", "parity(p,q)", "psi_exp"};
  return names;
}

MapGerm conic_modify(const MapGerm& g, const ConicHomeo& h) {
  if (g.target_dim() != h.k)
    throw PreconditionError("conic_modify: homeomorphism dimension " +
                            std::to_string(h.k) + " does not match target dimension " +
                            std::to_string(g.target_dim()));
  std::vector<ExprPtr> comps;
  comps.reserve(h.inverse.size());
  for (const auto& t : h.inverse) comps.push_back(substitute(t, g.components()));

  Smoothness sm = Smoothness::smooth;
  if (h.tag == "identity" || h.tag == "cube" || h.tag == "inv_cube")
    sm = g.smoothness();
  else if (h.tag == "sqrt_sign" || h.tag.rfind("parity(", 0) == 0)
    sm = Smoothness::finite_class;

  FamilyModified fam;
  fam.base = std::make_shared<MapGerm>(g);
  fam.homeo_tag = h.tag;
  fam.inverse = h.inverse;
  MapGerm out(g.source_dim(), h.k, std::move(comps), sm, fam);

  // Round trip h(f_h(x)) = f(x) on a few points near the origin.
  std::mt19937_64 rng(0x636f6e6963ULL);
  int checked = 0;
  for (int i = 0; i < 24 && checked < 8; ++i) {
    const Eigen::VectorXd x = 0.1 * sample_ball(rng, g.source_dim());
    Eigen::VectorXd fx, back;
    try {
      fx = g.eval(x);
      back = h.apply(out.eval(x));
    } catch (const Error&) {
      continue;  // outside the domain of one of the formula pieces
    }
    ++checked;
    if ((back - fx).norm() > 1e-9 * std::max(1.0, fx.norm()))
      throw PreconditionError(
          "conic_modify: h(f_h(x)) disagrees with f(x); the supplied pair is"
          " not inverse on the sampled region");
  }
  return out;
}

Eigen::VectorXd xi_h(const ConicHomeo& h, const Eigen::VectorXd& y, double eta) {
  if (eta <= 0.0) eta = h.eta;
  const Eigen::VectorXd w = h.apply_inverse(y);
  const double nw = w.norm();
  if (nw <= 1e-14)
    throw DomainError("xi_h undefined: h^{-1}(y) does not direct a ray");
  return h.apply(eta * w / nw);
}

LinearizationReport is_linearization(const ConicHomeo& h, const MapGerm& g,
                                     const DiscriminantModel& model) {
  if (g.target_dim() != h.k)
    throw PreconditionError("is_linearization: dimension mismatch");
  if (model.points.empty() && model.branches.empty())
    throw NoDiscriminant("is_linearization: the model has neither samples nor branches");

  LinearizationReport rep;
  rep.eta = h.eta;

  struct Cluster {
    Eigen::VectorXd dir;  // unit, set from the largest member
    double max_norm = 0.0;
    std::vector<Eigen::VectorXd> members;
  };
  std::vector<Cluster> clusters;
  int skipped = 0;

  auto pulled = [&](const Eigen::VectorXd& p, Eigen::VectorXd& y) -> bool {
    try {
      y = h.apply_inverse(p);
    } catch (const Error&) {
      ++skipped;
      return false;
    }
    if (!y.allFinite()) {
      ++skipped;
      return false;
    }
    return y.norm() <= h.eta;
  };

  // Branch halves are ray candidates by construction: one cluster per
  // branch and parameter sign.
  for (const auto& b : model.branches) {
    const double lo = std::min(b.reach_lo, b.reach_hi);
    const double hi = std::max(b.reach_lo, b.reach_hi);
    Cluster pos, neg;
    for (double t : b.grid) {
      if (t < lo || t > hi) continue;
      Eigen::VectorXd y;
      if (!pulled(b.at(t), y)) continue;
      Cluster& c = t >= 0.0 ? pos : neg;
      if (y.norm() > c.max_norm) {
        c.max_norm = y.norm();
        c.dir = y;
      }
      c.members.push_back(std::move(y));
    }
    for (Cluster* c : {&pos, &neg})
      if (c->max_norm > 1e-12) {
        c->dir.normalize();
        clusters.push_back(std::move(*c));
      }
  }

  // Sampled images carry absolute noise near 1e-12 from the critical-set
  // solves.  Where h^{-1} moves a noise-sized perturbation further than a
  // tenth of the pass bound, the pulled sample says nothing about ray
  // alignment, so probe the inverse at that scale and drop such samples.
  // Branch grid points are exact formula values and skip the probe: their
  // error is relative, which norm-like inverses do not amplify.
  const double kImageNoise = 1e-12;
  const double amp_budget = 0.1 * 1e-4 * h.eta;
  int sub_noise = 0;
  auto noise_dominated = [&](const Eigen::VectorXd& p, const Eigen::VectorXd& y0) {
    for (int i = 0; i < h.k; ++i)
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd q = p;
        q(i) += sgn * kImageNoise;
        Eigen::VectorXd y;
        try {
          y = h.apply_inverse(q);
        } catch (const Error&) {
          return true;
        }
        if (!y.allFinite() || (y - y0).norm() > amp_budget) return true;
      }
    return false;
  };

  // Loose samples join the best-aligned cluster within 0.05 rad, else seed
  // a new one; processed by decreasing norm so seeds are well-conditioned.
  std::vector<Eigen::VectorXd> loose;
  for (const auto& s : model.points) {
    Eigen::VectorXd y;
    if (!pulled(s.image, y) || y.norm() <= 1e-12) continue;
    if (noise_dominated(s.image, y)) {
      ++sub_noise;
      continue;
    }
    loose.push_back(std::move(y));
  }
  std::stable_sort(loose.begin(), loose.end(),
                   [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                     return a.norm() > b.norm();
                   });
  for (auto& y : loose) {
    const Eigen::VectorXd yh = y / y.norm();
    Cluster* best = nullptr;
    double best_angle = 0.05;
    for (auto& c : clusters) {
      const double a = std::acos(std::clamp(c.dir.dot(yh), -1.0, 1.0));
      if (a <= best_angle) {
        best_angle = a;
        best = &c;
      }
    }
    if (best) {
      best->members.push_back(std::move(y));
    } else {
      Cluster c;
      c.dir = yh;
      c.max_norm = y.norm();
      c.members.push_back(std::move(y));
      clusters.push_back(std::move(c));
    }
  }

  for (const auto& c : clusters) {
    rep.ray_directions.push_back(c.dir);
    for (const auto& y : c.members) {
      ++rep.points_used;
      const double along = y.dot(c.dir);
      const double perp = along >= 0.0 ? (y - along * c.dir).norm() : y.norm();
      rep.max_perp_residual = std::max(rep.max_perp_residual, perp);
    }
  }

  if (skipped > 0)
    rep.notes.push_back(std::to_string(skipped) +
                        " discriminant points outside the inverse domain were skipped");
  if (sub_noise > 0)
    rep.notes.push_back(std::to_string(sub_noise) +
                        " sampled points were dropped as noise-dominated under h^{-1}");
  if (rep.points_used == 0) {
    rep.notes.push_back("no discriminant points inside the eta-ball;"
                        " linearization holds vacuously");
    rep.verdict = Verdict::pass;
    return rep;
  }
  rep.verdict = rep.max_perp_residual < 1e-4 * h.eta ? Verdict::pass : Verdict::fail;
  return rep;
}

RegularityReport d_h_regular(const MapGerm& g, const ConicHomeo& h,
                             const BallConfig& cfg, const SamplingPlan& plan) {
  DiscriminantModel base = discriminant_sample(g, cfg, plan);
  const LinearizationReport lin = is_linearization(h, g, base);
  if (lin.verdict == Verdict::fail) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "d_h_regular: %s does not linearize the discriminant"
                  " (max perpendicular residual %.3e, bound %.3e)",
                  h.tag.c_str(), lin.max_perp_residual, 1e-4 * h.eta);
    throw PreconditionError(buf);
  }

  MapGerm modified = conic_modify(g, h);
  BallConfig cfg_h = cfg;
  cfg_h.delta = default_delta(modified, cfg.eps);
  DiscriminantModel model_h = discriminant_sample(modified, cfg_h, plan);

  // When h^{-1} flattens target component i (zero derivative at 0, as the
  // signed powers do), row i of the modified jacobian is (h_i^{-1})'(f_i) Df_i
  // and dies on all of {f_i = 0}, so that hypersurface is critical for the
  // modified germ and its image fills directions across the hyperplane
  // {y_i = 0}.  Finitely many sampled rays cannot represent that; record the
  // hyperplane itself.
  std::vector<std::string> flat_notes;
  for (int i = 0; i < h.k; ++i) {
    const double nu = 1e-6;
    double slope = 0.0;
    int probes = 0;
    for (double sgn : {1.0, -1.0}) {
      Eigen::VectorXd p = Eigen::VectorXd::Constant(h.k, sgn * nu);
      try {
        const Eigen::VectorXd y = h.apply_inverse(p);
        if (!y.allFinite()) continue;
        slope = std::max(slope, std::fabs(y(i)) / nu);
        ++probes;
      } catch (const Error&) {
      }
    }
    if (probes > 0 && slope < 0.1) {
      model_h.hyperplane_components.push_back(i);
      flat_notes.push_back(h.tag + " flattens target component " +
                           std::to_string(i + 1) + "; the hyperplane {y_" +
                           std::to_string(i + 1) +
                           " = 0} is excluded as discriminant directions");
    }
  }

  RegularityReport rep = d_regular(modified, cfg_h, plan, &model_h);
  rep.notes.insert(rep.notes.begin(), flat_notes.begin(), flat_notes.end());
  rep.notes.insert(rep.notes.begin(),
                   "conic modification by " + h.tag +
                       "; exclusions from the modified germ's sampled"
                       " discriminant and pulled-back branches");
  return rep;
}

}  // namespace milnorlab
