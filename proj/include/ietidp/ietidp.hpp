#ifndef IETIDP_IETIDP_HPP
#define IETIDP_IETIDP_HPP

// Dual-primal isogeometric tearing and interconnecting for the Poisson
// problem on a multi-patch domain.
//
// Unknowns are the skeleton coefficients of all patches, concatenated patch by
// patch. Continuity is enforced by Lagrange multipliers (jump matrix B) and by
// primal constraints (vertex values and/or edge integrals, matrices C^(k))
// that are kept continuous in an energy-minimizing coarse space. The
// multiplier system F lambda = d is solved by CG preconditioned with the
// scaled Dirichlet preconditioner B D^-1 S D^-1 B^T.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ietidp/assembly.hpp"
#include "ietidp/geometry.hpp"
#include "ietidp/linalg.hpp"

namespace ietidp {

/// Choice of primal degrees of freedom.
enum class Algorithm {
  A,  // vertex values
  B,  // edge averages
  C,  // vertex values and edge averages
};

char algorithm_tag(Algorithm a);
std::optional<Algorithm> algorithm_from_tag(std::string_view tag);

/// Matched skeleton degrees of freedom across interfaces and vertices.
///
/// Global skeleton indices address the concatenation of all patch skeleton
/// vectors; patch k owns [offsets[k], offsets[k+1]).
struct SkeletonIndex {
  struct EdgePairs {
    std::vector<std::pair<int, int>> pairs;  // (dof on patch_a, dof on patch_b) in traversal order of side_a
    std::vector<bool> at_corner;             // pair sits at an end of the interface
  };
  struct VertexDofs {
    int vertex = -1;                          // index into MultiPatchDomain::vertices
    std::vector<std::pair<int, int>> dofs;    // (patch, global skeleton index), sorted by patch
  };

  std::vector<int> offsets;
  std::vector<EdgePairs> edges;        // one per interface
  std::vector<VertexDofs> vertices;    // vertices that carry corner dofs

  int size() const { return offsets.empty() ? 0 : offsets.back(); }
  int num_patches() const { return static_cast<int>(offsets.size()) - 1; }
  int patch_size(int k) const { return offsets[k + 1] - offsets[k]; }
};

SkeletonIndex build_skeleton_index(const MultiPatchDomain& domain, const std::vector<PatchDiscretization>& discs);

/// Signed Boolean jump matrix; each row pairs two matched skeleton dofs.
struct JumpMatrix {
  SparseMatrix B;  // rows = multipliers, cols = global skeleton dofs
  Algorithm algorithm = Algorithm::A;
  int num_edge_rows = 0;

  int rows() const { return static_cast<int>(B.rows()); }
};

JumpMatrix build_jump_matrix(const SkeletonIndex& skeleton, Algorithm algorithm);

/// Per-patch primal constraint matrices and the global primal numbering.
struct PrimalConstraints {
  std::vector<Eigen::MatrixXd> C;             // per patch: local primal x local skeleton
  std::vector<std::vector<int>> global_ids;   // per patch: global primal id of each row
  std::vector<int> vertex_primal;             // per domain vertex: primal id or -1
  std::vector<int> edge_primal;               // per interface: primal id or -1
  int num_primal = 0;
};

PrimalConstraints build_primal_constraints(const MultiPatchDomain& domain,
                                           const std::vector<PatchDiscretization>& discs,
                                           const SkeletonIndex& skeleton, Algorithm algorithm);

/// Edge-integral weights: integral over the physical side of each trace-active
/// basis function, indexed by local skeleton dof.
Eigen::VectorXd edge_integral_weights(const PatchDiscretization& disc, const NurbsPatchMap& G, Side side);

/// Matrix-free Schur complement S = A_GG - A_GI A_II^-1 A_IG of one patch.
class PatchSchur {
 public:
  explicit PatchSchur(const PatchSystem& system);

  Eigen::VectorXd apply(const Eigen::VectorXd& w) const;
  /// Reduced load g = f_G - A_GI A_II^-1 f_I.
  const Eigen::VectorXd& g() const { return g_; }
  /// Interior values A_II^-1 (f_I - A_IG w) of the discrete solution with skeleton values w.
  Eigen::VectorXd interior_values(const Eigen::VectorXd& w) const;
  int size() const { return static_cast<int>(A_GG_.rows()); }

 private:
  SparseMatrix A_IG_, A_GI_, A_GG_;
  Eigen::VectorXd f_I_;
  SpdFactorization A_II_;
  Eigen::VectorXd g_;
};

inline PatchSchur build_schur_operator(const PatchSystem& system) { return PatchSchur(system); }

/// Factorized local saddle point system [A 0; 0 C^T; C 0] (interior, skeleton,
/// multipliers), equivalent to [S C^T; C 0] on the skeleton.
class LocalSaddle {
 public:
  LocalSaddle(const PatchSystem& system, const Eigen::MatrixXd& C);

  /// Skeleton part w of the solution of S w + C^T mu = q, C w = c.
  Eigen::VectorXd solve(const Eigen::VectorXd& q, const Eigen::VectorXd& c) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& q) const;

 private:
  int n_interior_ = 0;
  int n_skeleton_ = 0;
  int n_primal_ = 0;
  IndefiniteFactorization factor_;
};

/// Energy-minimizing primal basis and coarse matrix.
struct PrimalBasis {
  std::vector<Eigen::MatrixXd> psi;     // per patch: local skeleton x local primal
  std::vector<LocalSaddle> saddles;     // per patch
  Eigen::MatrixXd S_Pi;                 // global primal x global primal
  Eigen::LLT<Eigen::MatrixXd> S_Pi_factor;
};

PrimalBasis build_primal_basis(const std::vector<PatchSystem>& systems, const std::vector<PatchSchur>& schurs,
                               const PrimalConstraints& constraints);

/// Multiplicity scaling: d_ii = max(1, number of multipliers acting on dof i).
Eigen::VectorXd build_scaling(const JumpMatrix& jump);

/// All operators of the method for one (domain, p, r, algorithm) configuration.
class IetiDpSystem {
 public:
  IetiDpSystem(const MultiPatchDomain& domain, int degree, int refinements, Algorithm algorithm,
               const RhsFunction& rhs);

  Eigen::VectorXd apply_F(const Eigen::VectorXd& lambda) const;
  Eigen::VectorXd apply_MsD(const Eigen::VectorXd& residual) const;
  const Eigen::VectorXd& d() const { return d_; }

  /// w = w_Delta + Psi w_Pi for the right-hand side q (global skeleton vector).
  Eigen::VectorXd solve_tilde(const Eigen::VectorXd& q) const;
  /// Skeleton values of the solution belonging to multipliers lambda.
  Eigen::VectorXd skeleton_solution(const Eigen::VectorXd& lambda) const;
  /// Per-patch tensor-product coefficients of the solution belonging to lambda.
  std::vector<Eigen::VectorXd> recover(const Eigen::VectorXd& lambda) const;

  int num_multipliers() const { return jump_.rows(); }
  int num_primal() const { return constraints_.num_primal; }
  Algorithm algorithm() const { return algorithm_; }

  const std::vector<TensorSplineSpace>& spaces() const { return spaces_; }
  const std::vector<PatchDiscretization>& discretizations() const { return discs_; }
  const std::vector<PatchSystem>& systems() const { return systems_; }
  const std::vector<PatchSchur>& schurs() const { return schurs_; }
  const SkeletonIndex& skeleton() const { return skeleton_; }
  const JumpMatrix& jump() const { return jump_; }
  const PrimalConstraints& constraints() const { return constraints_; }
  const PrimalBasis& primal_basis() const { return basis_; }
  const Eigen::VectorXd& scaling() const { return scaling_; }
  /// Concatenated reduced loads g^(k).
  const Eigen::VectorXd& g() const { return g_; }

  /// Applies the block-diagonal Schur complement to a global skeleton vector.
  Eigen::VectorXd apply_S(const Eigen::VectorXd& w) const;
  /// Psi applied to a global primal vector, and its transpose.
  Eigen::VectorXd apply_Psi(const Eigen::VectorXd& w_primal) const;
  Eigen::VectorXd apply_Psi_transpose(const Eigen::VectorXd& w) const;

 private:
  Algorithm algorithm_;
  std::vector<TensorSplineSpace> spaces_;
  std::vector<PatchDiscretization> discs_;
  std::vector<PatchSystem> systems_;
  std::vector<PatchSchur> schurs_;
  SkeletonIndex skeleton_;
  JumpMatrix jump_;
  SparseMatrix Bt_;
  PrimalConstraints constraints_;
  PrimalBasis basis_;
  Eigen::VectorXd scaling_;
  Eigen::VectorXd g_;
  Eigen::VectorXd d_;
};

/// 2 pi^2 sin(pi x) sin(pi y).
double default_rhs(const Eigen::Vector2d& x);

struct SolveOptions {
  int degree = 2;
  int refinements = 2;
  Algorithm algorithm = Algorithm::A;
  double rel_tol = 1e-6;
  std::uint64_t seed = 42;
  int max_iter = 1000;
  RhsFunction rhs = default_rhs;
  std::optional<double> time_budget_seconds;
};

struct SolveReport {
  Algorithm algorithm = Algorithm::A;
  int degree = 0;
  int refinements = 0;
  std::uint64_t seed = 0;
  std::string generator = "mt19937_64";
  int num_multipliers = 0;
  int num_primal = 0;
  bool converged = false;
  int iterations = 0;
  double kappa = 1.0;
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  std::vector<double> residual_history;
  double setup_seconds = 0.0;
  double pcg_seconds = 0.0;
  double recovery_seconds = 0.0;
};

struct SolveResult {
  std::vector<Eigen::VectorXd> coefficients;  // per patch, tensor-product ordering
  SolveReport report;
};

/// Random initial multipliers with entries uniform in [-1,1].
Eigen::VectorXd random_start(int size, std::uint64_t seed);

/// Full pipeline: discretize, build the operators, run PCG from a seeded random
/// start and recover the per-patch solution.
SolveResult solve(const MultiPatchDomain& domain, const SolveOptions& options);

/// Direct solve of the globally assembled conforming system.
std::vector<Eigen::VectorXd> solve_global_oracle(const MultiPatchDomain& domain, int degree, int refinements,
                                                 const RhsFunction& rhs = default_rhs);

/// Broken energy norm sqrt(sum_k u_k^T A^(k) u_k) of per-patch tensor coefficients.
double energy_norm(const std::vector<PatchDiscretization>& discs, const std::vector<PatchSystem>& systems,
                   const std::vector<Eigen::VectorXd>& coefficients);

/// ||u - reference||_E / ||reference||_E on the given discretization.
double relative_energy_error(const std::vector<PatchDiscretization>& discs, const std::vector<PatchSystem>& systems,
                             const std::vector<Eigen::VectorXd>& u, const std::vector<Eigen::VectorXd>& reference);

}  // namespace ietidp

#endif  // IETIDP_IETIDP_HPP
