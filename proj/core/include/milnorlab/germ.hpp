#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "milnorlab/expr.hpp"

namespace milnorlab {

enum class Smoothness { analytic, smooth, finite_class };

/// Coefficient family behind the `ldm` builtin:
/// (sum_i a_i x_i^p, sum_i b_i x_i^q) with pairwise independent (a_i, b_i).
struct FamilyLdm {
  int p = 2;
  int q = 2;
  std::vector<std::pair<double, double>> lambda;  // (a_i, b_i) per variable
};

/// The flat pair behind the `psi` builtin.
struct FamilyPsi {
  int n = 3;
};

/// Named catalog germ.
struct FamilyCatalog {
  std::string name;
};

class MapGerm;

/// Composition of a base germ with the inverse of a target homeomorphism.
/// `inverse` holds the homeomorphism's inverse components over k target
/// variables, so base discriminant branches can be pulled back.
struct FamilyModified {
  std::shared_ptr<const MapGerm> base;
  std::string homeo_tag;
  std::vector<ExprPtr> inverse;
};

using FamilyTag =
    std::variant<std::monostate, FamilyLdm, FamilyPsi, FamilyCatalog, FamilyModified>;

/// A polynomial-or-smooth map germ f : (R^n, 0) -> (R^k, 0) given by k
/// scalar expression trees.  Construction checks f(0) = 0 to 1e-12.
class MapGerm {
 public:
  MapGerm(int n, int k, std::vector<ExprPtr> components,
          Smoothness smooth = Smoothness::analytic, FamilyTag tag = {});

  int source_dim() const { return n_; }
  int target_dim() const { return k_; }
  Smoothness smoothness() const { return smooth_; }
  const FamilyTag& family() const { return tag_; }
  const std::vector<ExprPtr>& components() const { return comps_; }

  Eigen::VectorXd eval(const Eigen::VectorXd& x,
                       BranchSide side = BranchSide::automatic) const;
  /// k x n Jacobian by forward-mode jets.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x,
                           BranchSide side = BranchSide::automatic) const;

  MapGerm with_family(FamilyTag tag) const;

 private:
  int n_;
  int k_;
  std::vector<ExprPtr> comps_;
  Smoothness smooth_;
  FamilyTag tag_;
};

/// (sum_i a_i x_i^p, sum_i b_i x_i^q), n = lambda.size() >= 2.  Raises
/// HyperbolicityViolation when some pair (a_i, b_i), (a_j, b_j) is linearly
/// dependent (checked to 1e-12 relative).
MapGerm builtin_ldm(int p, int q, const std::vector<std::pair<double, double>>& lambda);

/// The flat pair (e^{-1/alpha}, e^{-1/beta}) with alpha = 1 - |x - p1|^2,
/// beta = 4 - |x - p2|^2, p1 = (1,0,...), p2 = (2,0,...); bump(t) = 0 for
/// t <= 0.  Smooth but not analytic across the gluing spheres.
MapGerm builtin_psi(int n);

/// Catalog names: "nondreg4" (x^2 - y^2 z, y, w), "ex6" (x^2 z + y^3, x),
/// "parabola" (x + y, x^2 + y^2 + z^3), "projection" ((x, y, z) -> (x, y)).
MapGerm builtin_catalog(const std::string& name);

/// All names accepted by builtin_catalog, in a fixed order.
const std::vector<std::string>& catalog_names();

/// One-line structural summary (dimensions, smoothness, family).
std::string describe(const MapGerm& g);

}  // namespace milnorlab
