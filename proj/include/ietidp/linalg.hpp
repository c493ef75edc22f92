#ifndef IETIDP_LINALG_HPP
#define IETIDP_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "ietidp/errors.hpp"

namespace ietidp {

using SparseMatrix = Eigen::SparseMatrix<double>;
using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Sparse LDL^T factorization of a symmetric positive definite matrix.
class SpdFactorization {
 public:
  SpdFactorization() = default;
  explicit SpdFactorization(const SparseMatrix& A);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const;
  Eigen::Index rows() const { return n_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  Eigen::Index n_ = 0;
};

/// Sparse LU factorization of a nonsingular (typically symmetric indefinite) matrix.
class IndefiniteFactorization {
 public:
  IndefiniteFactorization() = default;
  explicit IndefiniteFactorization(const SparseMatrix& A);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const;
  Eigen::Index rows() const { return n_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  Eigen::Index n_ = 0;
};

inline SpdFactorization factor_spd(const SparseMatrix& A) { return SpdFactorization(A); }
inline IndefiniteFactorization factor_symmetric_indefinite(const SparseMatrix& A) {
  return IndefiniteFactorization(A);
}

/// Extreme eigenvalues of a symmetric tridiagonal matrix.
template <typename Scalar>
struct EigenRange {
  Scalar min;
  Scalar max;
};

/// Extreme eigenvalues of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `offdiag` (size diag.size()-1), by Sturm-sequence
/// bisection to absolute tolerance `tol`.
template <typename Scalar>
EigenRange<Scalar> tridiag_eigs(const std::vector<Scalar>& diag, const std::vector<Scalar>& offdiag,
                                Scalar tol = Scalar(1e-12)) {
  const std::size_t n = diag.size();
  if (n == 0) throw ArgumentError("tridiag_eigs: empty matrix");
  if (offdiag.size() + 1 != n) throw ArgumentError("tridiag_eigs: off-diagonal has wrong length");

  // Gershgorin interval.
  Scalar lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    Scalar r(0);
    if (i > 0) r += std::abs(offdiag[i - 1]);
    if (i + 1 < n) r += std::abs(offdiag[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }

  // Number of eigenvalues strictly below x.
  auto count_below = [&](Scalar x) {
    int count = 0;
    Scalar d(1);
    for (std::size_t i = 0; i < n; ++i) {
      const Scalar b2 = i > 0 ? offdiag[i - 1] * offdiag[i - 1] : Scalar(0);
      d = diag[i] - x - (i > 0 ? b2 / d : Scalar(0));
      if (d == Scalar(0)) d = -std::numeric_limits<Scalar>::epsilon() * (std::abs(x) + Scalar(1));
      if (d < Scalar(0)) ++count;
    }
    return count;
  };

  auto kth = [&](int k) {  // k-th smallest eigenvalue, 0-based
    Scalar a = lo, b = hi;
    while (b - a > tol) {
      const Scalar mid = (a + b) / Scalar(2);
      if (mid <= a || mid >= b) break;
      if (count_below(mid) > k)
        b = mid;
      else
        a = mid;
    }
    return (a + b) / Scalar(2);
  };
  return {kth(0), kth(static_cast<int>(n) - 1)};
}

struct PcgOptions {
  double rel_tol = 1e-6;
  int max_iter = 1000;
};

/// Result of a preconditioned conjugate gradient run.
///
/// The Lanczos tridiagonal matrix is assembled from the CG step lengths and
/// its extreme eigenvalues estimate the spectrum of the preconditioned operator.
struct PcgOutcome {
  Eigen::VectorXd solution;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // ||r_k|| / ||r_0||, starting with 1
  std::vector<double> lanczos_diag;
  std::vector<double> lanczos_offdiag;
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  double kappa = 1.0;
};

/// Preconditioned CG for A x = b, stopped when ||b - A x_k|| <= rel_tol * ||b - A x_0||.
///
/// Throws IndefiniteOperatorError if p^T A p <= 0 before convergence. Reaching
/// max_iter returns an outcome with converged == false.
PcgOutcome pcg(const LinearOperator& apply_A, const LinearOperator& apply_M, const Eigen::VectorXd& b,
               const Eigen::VectorXd& x0, const PcgOptions& options = {});

}  // namespace ietidp

#endif  // IETIDP_LINALG_HPP
