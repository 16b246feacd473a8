#include "milnorlab/germ.hpp"

#include <cmath>
#include <sstream>

namespace milnorlab {

MapGerm::MapGerm(int n, int k, std::vector<ExprPtr> components, Smoothness smooth,
                 FamilyTag tag)
    : n_(n), k_(k), comps_(std::move(components)), smooth_(smooth), tag_(std::move(tag)) {
  if (n_ < 1 || k_ < 1) throw ArityError("germ dimensions must be positive");
  if (static_cast<int>(comps_.size()) != k_)
    throw ArityError("component count does not match target dimension");
  for (const auto& c : comps_)
    if (max_arity(*c) > n_) throw ArityError("component uses a variable beyond x" + std::to_string(n_));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n_);
  for (int i = 0; i < k_; ++i) {
    const double v = eval_expr(*comps_[i], zero);
    if (!(std::fabs(v) <= 1e-12))
      throw DomainError("germ component " + std::to_string(i + 1) +
                        " does not vanish at the origin");
  }
}

Eigen::VectorXd MapGerm::eval(const Eigen::VectorXd& x, BranchSide side) const {
  if (x.size() != n_) throw ArityError("point dimension does not match germ");
  Eigen::VectorXd y(k_);
  for (int i = 0; i < k_; ++i) y(i) = eval_expr(*comps_[i], x, side);
  return y;
}

Eigen::MatrixXd MapGerm::jacobian(const Eigen::VectorXd& x, BranchSide side) const {
  if (x.size() != n_) throw ArityError("point dimension does not match germ");
  Eigen::MatrixXd J(k_, n_);
  for (int i = 0; i < k_; ++i) {
    const Jet j = eval_expr_jet(*comps_[i], x, side);
    J.row(i) = j.d.transpose();
  }
  return J;
}

MapGerm MapGerm::with_family(FamilyTag tag) const {
  MapGerm g = *this;
  g.tag_ = std::move(tag);
  return g;
}

MapGerm builtin_ldm(int p, int q, const std::vector<std::pair<double, double>>& lambda) {
  const int n = static_cast<int>(lambda.size());
  if (n < 2) throw ArityError("ldm needs at least two coefficient pairs");
  if (p < 2 || q < 2) throw DomainError("ldm exponents must be at least 2");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double det = lambda[i].first * lambda[j].second - lambda[j].first * lambda[i].second;
      const double scale = std::max(1.0, std::fabs(lambda[i].first * lambda[j].second) +
                                             std::fabs(lambda[j].first * lambda[i].second));
      if (std::fabs(det) <= 1e-12 * scale)
        throw HyperbolicityViolation("coefficient pairs " + std::to_string(i + 1) + " and " +
                                     std::to_string(j + 1) + " are linearly dependent");
    }
  auto component = [&](bool second, int e) {
    ExprPtr sum;
    for (int i = 0; i < n; ++i) {
      const double c = second ? lambda[i].second : lambda[i].first;
      ExprPtr term = make_mul(make_const(c), make_ipow(make_var(i), e));
      sum = sum ? make_add(sum, term) : term;
    }
    return sum;
  };
  FamilyLdm fam{p, q, lambda};
  return MapGerm(n, 2, {component(false, p), component(true, q)}, Smoothness::analytic,
                 FamilyTag{fam});
}

MapGerm builtin_psi(int n) {
  if (n < 2) throw ArityError("psi needs dimension >= 2");
  // alpha = 1 - |x - p1|^2 and beta = 4 - |x - p2|^2 with p1 = (1,0,...),
  // p2 = (2,0,...).
  auto shifted_norm2 = [&](double center) {
    ExprPtr sum = make_ipow(make_sub(make_var(0), make_const(center)), 2);
    for (int i = 1; i < n; ++i) sum = make_add(sum, make_ipow(make_var(i), 2));
    return sum;
  };
  ExprPtr alpha = make_sub(make_const(1.0), shifted_norm2(1.0));
  ExprPtr beta = make_sub(make_const(4.0), shifted_norm2(2.0));
  return MapGerm(n, 2, {make_bump(alpha), make_bump(beta)}, Smoothness::smooth,
                 FamilyTag{FamilyPsi{n}});
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"nondreg4", "ex6", "parabola", "projection"};
  return names;
}

MapGerm builtin_catalog(const std::string& name) {
  auto x = [](int i) { return make_var(i); };
  if (name == "nondreg4") {
    // (x^2 - y^2 z, y, w): critical set {x = y = 0}, discriminant the u3 axis.
    ExprPtr c1 = make_sub(make_ipow(x(0), 2), make_mul(make_ipow(x(1), 2), x(2)));
    return MapGerm(4, 3, {c1, x(1), x(3)}, Smoothness::analytic,
                   FamilyTag{FamilyCatalog{name}});
  }
  if (name == "ex6") {
    // (x^2 z + y^3, x): isolated critical value, not d-regular.
    ExprPtr c1 = make_add(make_mul(make_ipow(x(0), 2), x(2)), make_ipow(x(1), 3));
    return MapGerm(3, 2, {c1, x(0)}, Smoothness::analytic, FamilyTag{FamilyCatalog{name}});
  }
  if (name == "parabola") {
    // (x + y, x^2 + y^2 + z^3): discriminant {v = u^2/2}.
    ExprPtr c1 = make_add(x(0), x(1));
    ExprPtr c2 = make_add(make_add(make_ipow(x(0), 2), make_ipow(x(1), 2)), make_ipow(x(2), 3));
    return MapGerm(3, 2, {c1, c2}, Smoothness::analytic, FamilyTag{FamilyCatalog{name}});
  }
  if (name == "projection") {
    return MapGerm(3, 2, {x(0), x(1)}, Smoothness::analytic, FamilyTag{FamilyCatalog{name}});
  }
  throw UnknownName("unknown catalog germ: " + name);
}

std::string describe(const MapGerm& g) {
  std::ostringstream os;
  os << "map germ R^" << g.source_dim() << " -> R^" << g.target_dim();
  switch (g.smoothness()) {
    case Smoothness::analytic: os << ", analytic"; break;
    case Smoothness::smooth: os << ", smooth"; break;
    case Smoothness::finite_class: os << ", finite differentiability class"; break;
  }
  struct V {
    std::ostringstream& os;
    void operator()(std::monostate) const {}
    void operator()(const FamilyLdm& f) const {
      os << ", family ldm(p=" << f.p << ", q=" << f.q << ", " << f.lambda.size() << " pairs)";
    }
    void operator()(const FamilyPsi& f) const { os << ", family psi(n=" << f.n << ")"; }
    void operator()(const FamilyCatalog& f) const { os << ", catalog \"" << f.name << "\""; }
    void operator()(const FamilyModified& f) const {
      os << ", modified by homeomorphism \"" << f.homeo_tag << "\"";
    }
  };
  std::visit(V{os}, g.family());
  return os.str();
}

}  // namespace milnorlab
