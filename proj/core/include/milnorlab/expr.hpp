#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "milnorlab/errors.hpp"
#include "milnorlab/jet.hpp"

namespace milnorlab {

/// Side used to resolve derivatives exactly on a piecewise boundary.
/// `automatic` raises BranchBoundary there; the others pick a branch.
enum class BranchSide { automatic, upper, lower };

enum class ExprKind {
  constant,   // literal value
  variable,   // x_i, zero-based index
  add, sub, mul, div,
  ipow,       // integer power, exponent >= 0
  exp_fn,
  log_fn,     // natural log; value at 0 is -inf, negative raises
  root,       // q-th root, q >= 2; odd q signed, even q needs t >= 0
  abs_fn,
  bump_fn,    // e^{-1/t} for t > 0 else exactly 0
  guard,      // piecewise(cond >= 0 ? a : b) or strict (cond > 0 ? a : b)
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable scalar expression node.  Trees are shared freely; all
/// evaluation state lives in the caller.
struct Expr {
  ExprKind kind;
  double value = 0.0;       // constant
  int var = -1;             // variable index
  long long exponent = 0;   // ipow
  int order = 0;            // root
  bool strict = false;      // guard: condition uses > instead of >=
  std::vector<ExprPtr> kids;
};

// Builders.
ExprPtr make_const(double v);
ExprPtr make_var(int index);
ExprPtr make_add(ExprPtr a, ExprPtr b);
ExprPtr make_sub(ExprPtr a, ExprPtr b);
ExprPtr make_mul(ExprPtr a, ExprPtr b);
ExprPtr make_div(ExprPtr a, ExprPtr b);
ExprPtr make_ipow(ExprPtr a, long long e);
ExprPtr make_exp(ExprPtr a);
ExprPtr make_log(ExprPtr a);
ExprPtr make_sqrt(ExprPtr a);
ExprPtr make_cbrt(ExprPtr a);
ExprPtr make_root(ExprPtr a, int order);
ExprPtr make_abs(ExprPtr a);
ExprPtr make_bump(ExprPtr a);
ExprPtr make_guard(ExprPtr cond, bool strict, ExprPtr then_e, ExprPtr else_e);
/// -e, folded into the literal when e is a constant.
ExprPtr make_neg(ExprPtr a);

/// Largest variable index + 1 appearing in the tree (0 for closed terms).
int max_arity(const Expr& e);

/// Replaces variable i by replacements[i] throughout.  Every variable in
/// the tree must have a replacement (ArityError otherwise).
ExprPtr substitute(const ExprPtr& e, const std::vector<ExprPtr>& replacements);

/// Structural equality (exact on constants).
bool expr_equal(const Expr& a, const Expr& b);

/// Evaluate with plain doubles.  Guards choose their closed side on the
/// boundary; log(0) evaluates to -inf.
double eval_expr(const Expr& e, const Eigen::VectorXd& x,
                 BranchSide side = BranchSide::automatic);

/// Evaluate with first-order jets.  `x` supplies values; each variable is
/// seeded with its own partial.  On a guard boundary this raises
/// BranchBoundary unless a one-sided mode is given.
Jet eval_expr_jet(const Expr& e, const Eigen::VectorXd& x,
                  BranchSide side = BranchSide::automatic);

}  // namespace milnorlab
