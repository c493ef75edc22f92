#ifndef IETIDP_ASSEMBLY_HPP
#define IETIDP_ASSEMBLY_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "ietidp/geometry.hpp"
#include "ietidp/splines.hpp"

namespace ietidp {

using SparseMatrix = Eigen::SparseMatrix<double>;
using RhsFunction = std::function<double(const Eigen::Vector2d&)>;

/// Retained basis functions of one patch, interior block first, then skeleton.
struct PatchDiscretization {
  TensorSplineSpace space;
  std::array<bool, 4> dirichlet_sides{};    // indexed by Side
  std::array<bool, 4> dirichlet_corners{};  // indexed by Corner
  std::vector<int> kept;                    // tensor index of local dof
  std::vector<int> tensor_to_local;         // -1 for removed basis functions
  int n_interior = 0;
  int n_skeleton = 0;

  int size() const { return n_interior + n_skeleton; }
  /// Local skeleton index (0..n_skeleton-1) of a tensor basis function, or -1.
  int skeleton_index(int tensor_index) const;
  /// Tensor indices of the basis functions whose trace on side s is nonzero, in traversal order.
  std::vector<int> side_tensor_indices(Side s) const;
  /// Tensor index of the basis function that is 1 at corner c.
  int corner_tensor_index(Corner c) const;
};

/// Drops every basis function with a nonzero trace on a Dirichlet side (or
/// nonzero value at a Dirichlet corner) and orders the rest interior-first.
PatchDiscretization classify_dofs(const TensorSplineSpace& space, const std::array<bool, 4>& dirichlet_sides,
                                  const std::array<bool, 4>& dirichlet_corners = {});

/// Gauss-Legendre nodes and weights on [-1,1].
void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights);

/// Gauss-Legendre rule with q points on every nonempty knot span.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int points_per_span = 0;
};

QuadratureRule gauss_rule(int q, const KnotVector& kv);

/// Stiffness matrix and load of one patch split into interior/skeleton blocks.
struct PatchSystem {
  SparseMatrix A;  // full local matrix in local ordering
  SparseMatrix A_II, A_IG, A_GI, A_GG;
  Eigen::VectorXd f;
  Eigen::VectorXd f_I, f_G;
};

/// Assembles the Poisson stiffness matrix with q points per span and direction
/// (default p+1). Throws GeometryError on a nonpositive Jacobian determinant.
PatchSystem assemble_stiffness(const PatchDiscretization& disc, const NurbsPatchMap& G,
                               std::optional<int> q = std::nullopt, int patch_id = -1);

/// Adds the load vector for f to an assembled system.
void assemble_load(PatchSystem& system, const PatchDiscretization& disc, const NurbsPatchMap& G,
                   const RhsFunction& f, std::optional<int> q = std::nullopt, int patch_id = -1);

/// Stiffness and load in one pass.
PatchSystem assemble_patch(const PatchDiscretization& disc, const NurbsPatchMap& G, const RhsFunction& f,
                           std::optional<int> q = std::nullopt, int patch_id = -1);

/// Dirichlet data on all patches of a domain: per-patch side flags and
/// corner flags for corners that touch the Dirichlet boundary through any patch.
std::vector<PatchDiscretization> classify_domain(const MultiPatchDomain& domain,
                                                 const std::vector<TensorSplineSpace>& spaces);

/// L2 distance between the spline with tensor coefficients `coefficients` and `exact`.
double l2_error(const TensorSplineSpace& space, const NurbsPatchMap& G, const Eigen::VectorXd& coefficients,
                const RhsFunction& exact, int q);

}  // namespace ietidp

#endif  // IETIDP_ASSEMBLY_HPP
