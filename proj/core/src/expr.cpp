#include "milnorlab/expr.hpp"

#include <algorithm>
#include <cmath>

namespace milnorlab {

namespace {
ExprPtr node(ExprKind k, std::vector<ExprPtr> kids) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->kids = std::move(kids);
  return e;
}
}  // namespace

ExprPtr make_const(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::constant;
  e->value = v;
  return e;
}

ExprPtr make_var(int index) {
  if (index < 0) throw ArityError("variable index must be nonnegative");
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::variable;
  e->var = index;
  return e;
}

ExprPtr make_add(ExprPtr a, ExprPtr b) { return node(ExprKind::add, {std::move(a), std::move(b)}); }
ExprPtr make_sub(ExprPtr a, ExprPtr b) { return node(ExprKind::sub, {std::move(a), std::move(b)}); }
ExprPtr make_mul(ExprPtr a, ExprPtr b) { return node(ExprKind::mul, {std::move(a), std::move(b)}); }
ExprPtr make_div(ExprPtr a, ExprPtr b) { return node(ExprKind::div, {std::move(a), std::move(b)}); }

ExprPtr make_ipow(ExprPtr a, long long e) {
  if (e < 0) throw DomainError("integer power exponent must be >= 0");
  auto n = std::make_shared<Expr>();
  n->kind = ExprKind::ipow;
  n->exponent = e;
  n->kids = {std::move(a)};
  return n;
}

ExprPtr make_exp(ExprPtr a) { return node(ExprKind::exp_fn, {std::move(a)}); }
ExprPtr make_log(ExprPtr a) { return node(ExprKind::log_fn, {std::move(a)}); }

ExprPtr make_root(ExprPtr a, int order) {
  if (order < 2) throw DomainError("root order must be >= 2");
  auto n = std::make_shared<Expr>();
  n->kind = ExprKind::root;
  n->order = order;
  n->kids = {std::move(a)};
  return n;
}

ExprPtr make_sqrt(ExprPtr a) { return make_root(std::move(a), 2); }
ExprPtr make_cbrt(ExprPtr a) { return make_root(std::move(a), 3); }
ExprPtr make_abs(ExprPtr a) { return node(ExprKind::abs_fn, {std::move(a)}); }
ExprPtr make_bump(ExprPtr a) { return node(ExprKind::bump_fn, {std::move(a)}); }

ExprPtr make_guard(ExprPtr cond, bool strict, ExprPtr then_e, ExprPtr else_e) {
  auto n = node(ExprKind::guard, {std::move(cond), std::move(then_e), std::move(else_e)});
  const_cast<Expr&>(*n).strict = strict;
  return n;
}

ExprPtr make_neg(ExprPtr a) {
  if (a->kind == ExprKind::constant) return make_const(-a->value);
  return make_sub(make_const(0.0), std::move(a));
}

int max_arity(const Expr& e) {
  int m = e.kind == ExprKind::variable ? e.var + 1 : 0;
  for (const auto& k : e.kids) m = std::max(m, max_arity(*k));
  return m;
}

ExprPtr substitute(const ExprPtr& e, const std::vector<ExprPtr>& replacements) {
  if (e->kind == ExprKind::variable) {
    if (e->var >= static_cast<int>(replacements.size()))
      throw ArityError("substitute: variable x" + std::to_string(e->var + 1) +
                       " has no replacement");
    return replacements[e->var];
  }
  if (e->kids.empty()) return e;
  auto copy = std::make_shared<Expr>(*e);
  for (auto& k : copy->kids) k = substitute(k, replacements);
  return copy;
}

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::constant:
      if (a.value != b.value) return false;
      break;
    case ExprKind::variable:
      if (a.var != b.var) return false;
      break;
    case ExprKind::ipow:
      if (a.exponent != b.exponent) return false;
      break;
    case ExprKind::root:
      if (a.order != b.order) return false;
      break;
    case ExprKind::guard:
      if (a.strict != b.strict) return false;
      break;
    default:
      break;
  }
  if (a.kids.size() != b.kids.size()) return false;
  for (size_t i = 0; i < a.kids.size(); ++i)
    if (!expr_equal(*a.kids[i], *b.kids[i])) return false;
  return true;
}

namespace {

// The guard condition only steers control flow, so it is always evaluated
// with plain values even inside a jet evaluation.
bool guard_takes_then(const Expr& e, const Eigen::VectorXd& x, BranchSide side,
                      bool differentiating) {
  const double c = eval_expr(*e.kids[0], x, side);
  if (differentiating && c == 0.0 && side == BranchSide::automatic)
    throw BranchBoundary("derivative requested on a piecewise boundary");
  if (c == 0.0 && side != BranchSide::automatic)
    return e.strict ? (side == BranchSide::upper) : (side != BranchSide::lower);
  return e.strict ? (c > 0.0) : (c >= 0.0);
}

}  // namespace

double eval_expr(const Expr& e, const Eigen::VectorXd& x, BranchSide side) {
  switch (e.kind) {
    case ExprKind::constant: return e.value;
    case ExprKind::variable:
      if (e.var >= x.size()) throw ArityError("variable index out of range");
      return x(e.var);
    case ExprKind::add: return eval_expr(*e.kids[0], x, side) + eval_expr(*e.kids[1], x, side);
    case ExprKind::sub: return eval_expr(*e.kids[0], x, side) - eval_expr(*e.kids[1], x, side);
    case ExprKind::mul: return eval_expr(*e.kids[0], x, side) * eval_expr(*e.kids[1], x, side);
    case ExprKind::div: {
      const double num = eval_expr(*e.kids[0], x, side);
      const double den = eval_expr(*e.kids[1], x, side);
      if (den == 0.0) throw DomainError("division by zero");
      return num / den;
    }
    case ExprKind::ipow: return ipow(eval_expr(*e.kids[0], x, side), e.exponent);
    case ExprKind::exp_fn: return std::exp(eval_expr(*e.kids[0], x, side));
    case ExprKind::log_fn: {
      const double t = eval_expr(*e.kids[0], x, side);
      if (t < 0.0) throw DomainError("log of a negative number");
      // log(0) = -inf as the continuous limit; downstream 1/(-inf) = -0.
      return std::log(t);
    }
    case ExprKind::root: return nthroot(eval_expr(*e.kids[0], x, side), e.order);
    case ExprKind::abs_fn: return std::fabs(eval_expr(*e.kids[0], x, side));
    case ExprKind::bump_fn: return bump(eval_expr(*e.kids[0], x, side));
    case ExprKind::guard:
      return guard_takes_then(e, x, side, false) ? eval_expr(*e.kids[1], x, side)
                                                 : eval_expr(*e.kids[2], x, side);
  }
  throw Error("unreachable expression kind");
}

Jet eval_expr_jet(const Expr& e, const Eigen::VectorXd& x, BranchSide side) {
  const Eigen::Index n = x.size();
  switch (e.kind) {
    case ExprKind::constant: return Jet::constant(e.value, n);
    case ExprKind::variable:
      if (e.var >= n) throw ArityError("variable index out of range");
      return Jet::variable(x(e.var), e.var, n);
    case ExprKind::add: return eval_expr_jet(*e.kids[0], x, side) + eval_expr_jet(*e.kids[1], x, side);
    case ExprKind::sub: return eval_expr_jet(*e.kids[0], x, side) - eval_expr_jet(*e.kids[1], x, side);
    case ExprKind::mul: return eval_expr_jet(*e.kids[0], x, side) * eval_expr_jet(*e.kids[1], x, side);
    case ExprKind::div: return eval_expr_jet(*e.kids[0], x, side) / eval_expr_jet(*e.kids[1], x, side);
    case ExprKind::ipow: return ipow(eval_expr_jet(*e.kids[0], x, side), e.exponent);
    case ExprKind::exp_fn: return exp(eval_expr_jet(*e.kids[0], x, side));
    case ExprKind::log_fn: return log(eval_expr_jet(*e.kids[0], x, side));
    case ExprKind::root: return nthroot(eval_expr_jet(*e.kids[0], x, side), e.order);
    case ExprKind::abs_fn: {
      Jet a = eval_expr_jet(*e.kids[0], x, side);
      if (a.v == 0.0) {
        if (side == BranchSide::automatic)
          throw BranchBoundary("derivative of abs at zero");
        return side == BranchSide::upper ? a : -a;
      }
      return a.v > 0.0 ? a : -a;
    }
    case ExprKind::bump_fn: return bump(eval_expr_jet(*e.kids[0], x, side));
    case ExprKind::guard:
      return guard_takes_then(e, x, side, true) ? eval_expr_jet(*e.kids[1], x, side)
                                                : eval_expr_jet(*e.kids[2], x, side);
  }
  throw Error("unreachable expression kind");
}

}  // namespace milnorlab
